#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "duplex/compiler.hpp"
#include "duplex/wire.hpp"

namespace duplex {

// --- bench cases -------------------------------------------------------------

struct Anchors {
    std::optional<double> t_ue;    // user-end time (normal/pause)
    std::optional<double> t_int;   // semantic interrupt anchor
    std::optional<double> t_bc_s;  // backchannel utterance start
    std::optional<double> t_bc_e;  // backchannel utterance end
};

struct BenchCase {
    std::string id;
    std::string scenario;  // normal | pause | interrupt | backchannel, or empty
    std::string pattern;   // single | multi | backchannel_action, or empty
    std::vector<UserWord> user_words;
    std::vector<std::string> history;  // prior turns, used by prefill
    Anchors anchors;
    std::vector<ActionObject> gt_actions;
    double audio_end_s = 0;
};

inline void validate_case(const BenchCase& c) {
    if (c.audio_end_s <= 0) throw std::invalid_argument("case " + c.id + ": non-positive audio_end_s");
    auto need = [&](const std::optional<double>& v, const char* name) {
        if (!v) throw std::invalid_argument("case " + c.id + ": missing anchor " + name);
        if (*v < 0 || *v > c.audio_end_s + kClockEps)
            throw std::invalid_argument("case " + c.id + ": anchor " + name + " outside audio");
    };
    if (c.scenario == "normal" || c.scenario == "pause") need(c.anchors.t_ue, "t_ue");
    if (c.scenario == "interrupt") need(c.anchors.t_int, "t_int");
    if (c.scenario == "backchannel") {
        need(c.anchors.t_bc_s, "t_bc_s");
        need(c.anchors.t_bc_e, "t_bc_e");
    }
}

// --- policies ----------------------------------------------------------------

struct StepOutput {
    TA4Unit assistant;
    std::vector<Token> action;
};

// Pluggable duplex policy, stepped once per chunk in order.
class Policy {
public:
    virtual ~Policy() = default;
    virtual void reset() {}
    virtual void prefill(const std::vector<std::string>& history) { (void)history; }
    virtual StepOutput step(const UserSegment& user) = 0;
};

class AlwaysSilentPolicy final : public Policy {
public:
    StepOutput step(const UserSegment&) override { return {TA4Unit::silence(), {}}; }
};

class EagerSpeakerPolicy final : public Policy {
public:
    void reset() override { k_ = 0; }
    StepOutput step(const UserSegment&) override {
        ++k_;
        return {TA4Unit::spoken("嗯"), {}};
    }

private:
    long k_ = 0;
};

// Speaks from a scripted onset chunk and never stops, whatever the user does.
class NeverYieldPolicy final : public Policy {
public:
    explicit NeverYieldPolicy(long onset_chunk = 0) : onset_(onset_chunk) {}
    void reset() override { k_ = 0; }
    StepOutput step(const UserSegment&) override {
        StepOutput out;
        out.assistant = (k_ >= onset_) ? TA4Unit::spoken("嗯") : TA4Unit::silence();
        ++k_;
        return out;
    }

private:
    long onset_;
    long k_ = 0;
};

// Replays a compiled trace chunk by chunk, padding with silence past its end.
class TraceReplayPolicy final : public Policy {
public:
    explicit TraceReplayPolicy(ChunkTrace trace) : trace_(std::move(trace)) {}
    void reset() override { k_ = 0; }
    StepOutput step(const UserSegment&) override {
        if (k_ < static_cast<long>(trace_.chunks.size())) {
            const auto& c = trace_.chunks[static_cast<size_t>(k_++)];
            return {c.assistant, c.action};
        }
        ++k_;
        return {TA4Unit::silence(), {}};
    }

private:
    ChunkTrace trace_;
    long k_ = 0;
};

inline const std::vector<std::string>& builtin_policy_names() {
    static const std::vector<std::string> names = {
        "trace_replay", "always_silent", "never_yield", "eager_speaker"};
    return names;
}

// Scripted policies only; trace_replay needs a per-case compiled trace and is
// built by the caller.
inline std::unique_ptr<Policy> make_builtin_policy(const std::string& name) {
    if (name == "always_silent") return std::make_unique<AlwaysSilentPolicy>();
    if (name == "never_yield") return std::make_unique<NeverYieldPolicy>();
    if (name == "eager_speaker") return std::make_unique<EagerSpeakerPolicy>();
    throw std::invalid_argument("unknown policy: " + name);
}

// --- event log ---------------------------------------------------------------

struct Event {
    double t = 0;
    std::string kind;  // speak | stop | interrupt | backchannel | response | toolcall | malformed
    nlohmann::json payload;

    friend bool operator==(const Event&, const Event&) = default;
};

using EventLog = std::vector<Event>;

struct PredictedCall {
    ActionObject action;
    double anchor_s = 0;
};

inline std::vector<PredictedCall> extract_tool_calls(const EventLog& log) {
    std::vector<PredictedCall> out;
    for (const auto& e : log) {
        if (e.kind != "toolcall") continue;
        PredictedCall p;
        p.anchor_s = e.t;
        p.action.name = e.payload.value("name", std::string());
        if (e.payload.contains("arguments")) {
            const auto& args = e.payload.at("arguments");
            if (args.is_string()) {
                if (!args.get<std::string>().empty())
                    p.action.parameters[""] = args.get<std::string>();
            } else if (args.is_object()) {
                for (auto it = args.begin(); it != args.end(); ++it)
                    p.action.parameters[it.key()] =
                        it.value().is_string() ? it.value().get<std::string>() : it.value().dump();
            }
        }
        p.action.planning = e.payload.value("planning", std::string());
        out.push_back(std::move(p));
    }
    return out;
}

// --- session runner ----------------------------------------------------------

// Steps a policy through a case on the chunk clock and derives the event log:
// speak/stop state transitions plus control labels and completed tool-call
// blocks, each stamped with its anchor-chunk time.
inline EventLog run_session(Policy& policy, const BenchCase& bench, bool prefill,
                            const ClockConfig& cfg = {}) {
    validate_case(bench);
    policy.reset();
    if (prefill) policy.prefill(bench.history);

    const long k_max = chunk_count(bench.audio_end_s, cfg);
    EventLog log;
    bool speaking = false;

    // Action-lane segmentation state. A segment opens at its first token and
    // closes at a control label or a balanced tool-call block; its anchor is
    // the chunk where the first token landed.
    std::optional<long> seg_anchor;
    std::vector<Token> planning_tokens;
    std::vector<Token> body_tokens;
    bool in_block = false;

    auto reset_segment = [&] {
        seg_anchor.reset();
        planning_tokens.clear();
        body_tokens.clear();
        in_block = false;
    };

    for (long k = 0; k < k_max; ++k) {
        const double t_k = chunk_start_time(k, cfg);

        UserSegment user;
        for (const auto& w : bench.user_words)
            if (chunk_index(w.onset_s, cfg) == k) user.transcript_hint.emplace_back(w.text, w.onset_s);

        StepOutput out = policy.step(user);

        if (static_cast<int>(out.action.size()) > cfg.action_budget) {
            log.push_back({t_k, "malformed",
                           {{"reason", "action budget exceeded"},
                            {"tokens", out.action.size()}}});
            out.action.resize(static_cast<size_t>(cfg.action_budget));
        }

        const bool now_speaking = is_speaking(out.assistant);
        if (now_speaking != speaking) {
            log.push_back({t_k, now_speaking ? "speak" : "stop", {}});
            speaking = now_speaking;
        }

        for (const auto& tok : out.action) {
            if (!seg_anchor) seg_anchor = k;
            if (tok.kind == TokenKind::control_label) {
                std::string name = tok.value.substr(1, tok.value.size() - 2);
                log.push_back({chunk_start_time(*seg_anchor, cfg), name,
                               {{"planning", join_text_tokens(planning_tokens)}}});
                reset_segment();
            } else if (tok.is_marker(marker::toolcall_begin)) {
                if (in_block) {
                    log.push_back({t_k, "malformed", {{"reason", "nested toolcall"}}});
                    reset_segment();
                } else {
                    in_block = true;
                }
            } else if (tok.is_marker(marker::toolcall_end)) {
                if (!in_block) {
                    log.push_back({t_k, "malformed", {{"reason", "toolcall close without open"}}});
                    reset_segment();
                } else {
                    nlohmann::json payload;
                    payload["planning"] = join_text_tokens(planning_tokens);
                    std::string body = join_text_tokens(body_tokens);
                    try {
                        auto j = nlohmann::json::parse(body);
                        payload["name"] = j.value("function", std::string());
                        payload["arguments"] = j.value("arguments", nlohmann::json(""));
                    } catch (const nlohmann::json::exception&) {
                        payload["name"] = "";
                        payload["arguments"] = body;
                        payload["parse_error"] = true;
                    }
                    log.push_back({chunk_start_time(*seg_anchor, cfg), "toolcall", payload});
                    reset_segment();
                }
            } else {
                (in_block ? body_tokens : planning_tokens).push_back(tok);
            }
        }
    }
    return log;
}

// --- JSONL forms -------------------------------------------------------------

inline void to_json(nlohmann::json& j, const BenchCase& c) {
    j = nlohmann::json{{"id", c.id}, {"audio_end_s", c.audio_end_s}};
    if (!c.scenario.empty()) j["scenario"] = c.scenario;
    if (!c.pattern.empty()) j["pattern"] = c.pattern;
    auto& uw = j["user_words"] = nlohmann::json::array();
    for (const auto& w : c.user_words) uw.push_back({w.text, w.onset_s, w.offset_s});
    if (!c.history.empty()) j["history"] = c.history;
    nlohmann::json a = nlohmann::json::object();
    if (c.anchors.t_ue) a["t_ue"] = *c.anchors.t_ue;
    if (c.anchors.t_int) a["t_int"] = *c.anchors.t_int;
    if (c.anchors.t_bc_s) a["t_bc_s"] = *c.anchors.t_bc_s;
    if (c.anchors.t_bc_e) a["t_bc_e"] = *c.anchors.t_bc_e;
    j["anchors"] = a;
    j["gt_actions"] = c.gt_actions;
}

inline void from_json(const nlohmann::json& j, BenchCase& c) {
    c.id = j.at("id").get<std::string>();
    c.audio_end_s = j.at("audio_end_s").get<double>();
    c.scenario = j.value("scenario", std::string());
    c.pattern = j.value("pattern", std::string());
    c.user_words.clear();
    for (const auto& w : j.value("user_words", nlohmann::json::array()))
        c.user_words.push_back({w.at(0).get<std::string>(), w.at(1).get<double>(), w.at(2).get<double>()});
    c.history = j.value("history", std::vector<std::string>{});
    c.anchors = {};
    if (j.contains("anchors")) {
        const auto& a = j.at("anchors");
        if (a.contains("t_ue")) c.anchors.t_ue = a.at("t_ue").get<double>();
        if (a.contains("t_int")) c.anchors.t_int = a.at("t_int").get<double>();
        if (a.contains("t_bc_s")) c.anchors.t_bc_s = a.at("t_bc_s").get<double>();
        if (a.contains("t_bc_e")) c.anchors.t_bc_e = a.at("t_bc_e").get<double>();
    }
    c.gt_actions.clear();
    if (j.contains("gt_actions")) c.gt_actions = j.at("gt_actions").get<std::vector<ActionObject>>();
}

inline void to_json(nlohmann::json& j, const Event& e) {
    j = nlohmann::json{{"t", e.t}, {"kind", e.kind}};
    if (!e.payload.is_null() && !(e.payload.is_object() && e.payload.empty()))
        j["payload"] = e.payload;
}

inline void from_json(const nlohmann::json& j, Event& e) {
    e.t = j.at("t").get<double>();
    e.kind = j.at("kind").get<std::string>();
    e.payload = j.value("payload", nlohmann::json());
}

}  // namespace duplex
