#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "duplex/engine.hpp"

namespace duplex {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
// Tolerance for window membership; anchors and event times are clock multiples
// but arrive through floating-point arithmetic.
inline constexpr double kWindowEps = 1e-9;

struct WindowRule {
    std::string scenario;
    double lo = 0;
    double hi = kInf;
    std::string target_event;  // speak | stop | backchannel
    double delay_anchor = 0;
};

// Per-scenario accuracy window and delay anchor.
inline WindowRule window_rule(const std::string& scenario, const Anchors& a) {
    auto req = [&](const std::optional<double>& v, const char* name) -> double {
        if (!v) throw std::invalid_argument(std::string("missing anchor ") + name + " for " + scenario);
        return *v;
    };
    if (scenario == "normal" || scenario == "pause") {
        double t_ue = req(a.t_ue, "t_ue");
        return {scenario, t_ue - 0.2, kInf, "speak", t_ue};
    }
    if (scenario == "interrupt") {
        double t_int = req(a.t_int, "t_int");
        return {scenario, t_int - 1.0, t_int + 2.0, "stop", t_int};
    }
    if (scenario == "backchannel") {
        double bc_s = req(a.t_bc_s, "t_bc_s");
        double bc_e = req(a.t_bc_e, "t_bc_e");
        return {scenario, bc_s - 0.2, bc_e + 2.0, "backchannel", bc_e};
    }
    throw std::invalid_argument("unknown scenario: " + scenario);
}

struct CaseScore {
    bool hit = false;
    std::optional<double> delay_s;  // present iff hit and a delay is defined
};

enum class ScoreMode { labeled, relaxed };

// First event of the scenario's target type inside the window. Relaxed mode
// accepts any speak/stop event in the backchannel window (label-less
// baselines) and reports no delay.
inline CaseScore score_turn_taking(const EventLog& log, const BenchCase& bench, ScoreMode mode) {
    WindowRule rule = window_rule(bench.scenario, bench.anchors);
    const bool relax_bc = mode == ScoreMode::relaxed && bench.scenario == "backchannel";

    std::optional<double> best;
    for (const auto& e : log) {
        bool type_ok = relax_bc ? (e.kind == "speak" || e.kind == "stop") : (e.kind == rule.target_event);
        if (!type_ok) continue;
        if (e.t < rule.lo - kWindowEps || e.t > rule.hi + kWindowEps) continue;
        if (!best || e.t < *best) best = e.t;
    }
    CaseScore score;
    score.hit = best.has_value();
    if (score.hit && !relax_bc) score.delay_s = std::fabs(*best - rule.delay_anchor);
    return score;
}

// --- tool-call matching ------------------------------------------------------

using ArgumentJudge =
    std::function<bool(const std::map<std::string, std::string>&, const std::map<std::string, std::string>&)>;

inline std::string normalize_arg(const std::string& s) {
    std::string out;
    for (char ch : s) {
        if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') continue;
        out += static_cast<char>((ch >= 'A' && ch <= 'Z') ? ch - 'A' + 'a' : ch);
    }
    return out;
}

// Default judge: both empty, or case- and whitespace-normalized equality.
inline bool default_argument_judge(const std::map<std::string, std::string>& pred,
                                   const std::map<std::string, std::string>& gt) {
    if (pred.empty() && gt.empty()) return true;
    if (pred.size() != gt.size()) return false;
    auto pit = pred.begin();
    for (auto git = gt.begin(); git != gt.end(); ++git, ++pit) {
        if (normalize_arg(pit->first) != normalize_arg(git->first)) return false;
        if (normalize_arg(pit->second) != normalize_arg(git->second)) return false;
    }
    return true;
}

struct ToolMatchConfig {
    double early_slack_s = 1.0;
    double late_slack_s = 3.0;
    ArgumentJudge argument_judge = default_argument_judge;
    bool optimal_assignment = false;  // greedy in gt order by default
};

struct ToolMatchResult {
    bool case_hit = false;
    std::vector<std::pair<size_t, size_t>> matched;  // (gt index, pred index)
    std::vector<double> delays;                      // per matched pair
};

inline bool timing_legal(double anchor_s, double gt_offset_s, double audio_end_s,
                         const ToolMatchConfig& cfg) {
    return anchor_s >= gt_offset_s - cfg.early_slack_s - kWindowEps &&
           anchor_s <= audio_end_s + cfg.late_slack_s + kWindowEps;
}

// Greedy matching in ground-truth order over unmatched predictions; every pair
// must satisfy name equality, the argument judge, and the timing bounds.
inline ToolMatchResult match_tool_calls(const std::vector<PredictedCall>& pred,
                                        const std::vector<ActionObject>& gt,
                                        const ToolMatchConfig& cfg, double audio_end_s) {
    ToolMatchResult res;
    std::vector<bool> used(pred.size(), false);
    for (size_t g = 0; g < gt.size(); ++g) {
        std::optional<size_t> pick;
        for (size_t p = 0; p < pred.size(); ++p) {
            if (used[p]) continue;
            if (pred[p].action.name != gt[g].name) continue;
            if (!cfg.argument_judge(pred[p].action.parameters, gt[g].parameters)) continue;
            if (!timing_legal(pred[p].anchor_s, gt[g].offset_s, audio_end_s, cfg)) continue;
            // earliest legal prediction
            if (!pick || pred[p].anchor_s < pred[*pick].anchor_s) pick = p;
        }
        if (pick) {
            used[*pick] = true;
            res.matched.emplace_back(g, *pick);
            res.delays.push_back(std::fabs(pred[*pick].anchor_s - gt[g].offset_s));
        }
    }
    res.case_hit = res.matched.size() == gt.size() && !gt.empty();
    return res;
}

// --- aggregation -------------------------------------------------------------

struct GroupReport {
    std::string group;
    size_t cases = 0;
    size_t hits = 0;
    double accuracy_pct = 0;
    std::optional<double> mean_delay_s;  // absent when no hit carries a delay
};

inline GroupReport aggregate(const std::string& group, const std::vector<CaseScore>& scores) {
    GroupReport r;
    r.group = group;
    r.cases = scores.size();
    double delay_sum = 0;
    size_t delay_n = 0;
    for (const auto& s : scores) {
        if (s.hit) ++r.hits;
        if (s.delay_s) { delay_sum += *s.delay_s; ++delay_n; }
    }
    r.accuracy_pct = r.cases ? 100.0 * static_cast<double>(r.hits) / static_cast<double>(r.cases) : 0.0;
    if (delay_n) r.mean_delay_s = delay_sum / static_cast<double>(delay_n);
    return r;
}

inline std::string format_report(const std::vector<GroupReport>& rows) {
    std::ostringstream os;
    os << std::left;
    size_t w = 12;
    for (const auto& r : rows) w = std::max(w, r.group.size() + 2);
    os.width(static_cast<std::streamsize>(w));
    os << "Scenario";
    os << "Cases   Acc.(%)   Delay (s)\n";
    for (const auto& r : rows) {
        os.width(static_cast<std::streamsize>(w));
        os << r.group;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%-8zu%-10.2f", r.cases, r.accuracy_pct);
        os << buf;
        if (r.mean_delay_s)
            std::snprintf(buf, sizeof buf, "%.2f", *r.mean_delay_s), os << buf;
        else
            os << "N/A";
        os << '\n';
    }
    return os.str();
}

inline void to_json(nlohmann::json& j, const GroupReport& r) {
    j = nlohmann::json{{"group", r.group},
                       {"cases", r.cases},
                       {"hits", r.hits},
                       {"accuracy_pct", r.accuracy_pct}};
    if (r.mean_delay_s) j["mean_delay_s"] = *r.mean_delay_s;
    else j["mean_delay_s"] = nullptr;
}

}  // namespace duplex
