#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "duplex/scheduler.hpp"
#include "duplex/wire.hpp"

namespace duplex {

struct CompileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& known_tasks() {
    static const std::vector<std::string> tasks = {
        "dialogue", "asr_human", "asr_assistant", "interpret",
        "interrupt", "backchannel", "pause", "toolcall"};
    return tasks;
}

// Task-conditioned system prompt; interrupt/backchannel/pause substitute the
// assistant-speaker placeholder.
inline std::string resolve_system_prompt(const std::string& task,
                                         const std::optional<std::string>& speaker = {}) {
    if (task == "dialogue") return "";
    if (task == "asr_human") return "请记录下你所听到的语音内容，只记录用户说的内容。";
    if (task == "asr_assistant") return "请记录下你所听到的语音内容，只记录助手说的内容。";
    if (task == "interpret") return "请翻译用户说的内容。";
    if (task == "toolcall")
        return "你是一个专注于与人互动的 AI，既能聊天，也能使用工具来解决用户的问题。";
    if (task == "interrupt" || task == "backchannel" || task == "pause") {
        if (!speaker || speaker->empty())
            throw CompileError("task '" + task + "' requires a speaker name");
        return "你是一个 AI 语音助手，用 " + *speaker + " 的声音来说话。";
    }
    throw CompileError("unknown task: " + task);
}

struct UserWord {
    std::string text;
    double onset_s = 0;
    double offset_s = 0;
};

struct ScriptToken {
    std::string text;
    double speak_onset_s = 0;
};

struct SessionSpec {
    std::string task = "dialogue";
    std::optional<std::string> speaker;
    std::optional<std::string> system_prompt;  // overrides the task default when set
    std::vector<UserWord> user_words;
    std::vector<ScriptToken> assistant_script;
    std::vector<ActionObject> actions;
    double duration_s = 0;
    int tts_pad_chunks = 3;  // audible trail after the final text anchor
};

inline long snap_offset(double offset_s, const ClockConfig& cfg = {}) {
    return chunk_index(offset_s, cfg);
}

inline void validate_spec(const SessionSpec& spec, const ClockConfig& cfg) {
    bool known = false;
    for (const auto& t : known_tasks()) known |= (t == spec.task);
    if (!known) throw CompileError("unknown task: " + spec.task);
    if (spec.duration_s <= 0) throw CompileError("non-positive duration");
    double prev_end = 0;
    for (const auto& w : spec.user_words) {
        if (w.onset_s < 0 || w.offset_s > spec.duration_s + kClockEps || w.offset_s < w.onset_s)
            throw CompileError("user word '" + w.text + "' outside [0, duration]");
        if (w.onset_s + kClockEps < prev_end)
            throw CompileError("user words overlap at '" + w.text + "'");
        prev_end = w.offset_s;
    }
    double prev_onset = -1;
    for (const auto& s : spec.assistant_script) {
        if (s.speak_onset_s < 0 || s.speak_onset_s > spec.duration_s + kClockEps)
            throw CompileError("assistant token '" + s.text + "' outside [0, duration]");
        if (s.speak_onset_s < prev_onset) throw CompileError("assistant script not sorted");
        prev_onset = s.speak_onset_s;
    }
    for (const auto& a : spec.actions) {
        if (a.offset_s < 0 || a.offset_s > spec.duration_s + kClockEps)
            throw CompileError("action " + std::to_string(a.id) + " offset outside [0, duration]");
        if (is_control_name(a.name) && !a.parameters.empty())
            throw CompileError("control action " + std::to_string(a.id) + " carries parameters");
    }
    (void)cfg;
}

// ASR re-emission lag, applied on both sides of the conversation.
inline constexpr int kAsrLagChunks = 2;

inline ChunkTrace compile(const SessionSpec& spec, const ClockConfig& cfg = {}) {
    validate_spec(spec, cfg);
    const long n = chunk_count(spec.duration_s, cfg);

    ChunkTrace trace;
    trace.meta.task = spec.task;
    trace.meta.system_prompt =
        spec.system_prompt ? *spec.system_prompt : resolve_system_prompt(spec.task, spec.speaker);
    trace.meta.clock = cfg;

    // Assistant anchors, left-aligned at their speak-onset chunks; same-chunk
    // tokens merge into one anchor.
    std::map<long, std::string> anchors;
    for (const auto& s : spec.assistant_script)
        anchors[chunk_index(s.speak_onset_s, cfg)] += s.text;

    long pad_from = -1, pad_to = -1;
    if (!anchors.empty() && spec.tts_pad_chunks > 0) {
        pad_from = anchors.rbegin()->first + 1;
        pad_to = std::min<long>(pad_from + spec.tts_pad_chunks - 1, n - 1);
    }

    // Action lane: explicit actions plus per-task delayed ASR re-emission.
    ActionQueue queue(cfg);
    long next_id = 0;
    for (const auto& a : spec.actions) {
        queue.enqueue(a);
        next_id = std::max(next_id, a.id + 1);
    }
    auto enqueue_asr = [&](const std::map<long, std::string>& merged) {
        for (const auto& [chunk, text] : merged) {
            ActionObject a;
            a.id = next_id++;
            a.name = std::string(kAsrName);
            a.planning = text;
            a.offset_s = chunk_start_time(chunk, cfg);
            queue.enqueue(a);
        }
    };
    if (spec.task == "asr_human" || spec.task == "interpret") {
        std::map<long, std::string> merged;  // emission chunk -> merged transcript
        for (const auto& w : spec.user_words)
            merged[chunk_index(w.onset_s, cfg) + kAsrLagChunks] += w.text;
        enqueue_asr(merged);
    } else if (spec.task == "asr_assistant") {
        std::map<long, std::string> merged;
        for (const auto& s : spec.assistant_script)
            merged[chunk_index(s.speak_onset_s, cfg) + kAsrLagChunks] += s.text;
        enqueue_asr(merged);
    }

    trace.chunks.reserve(static_cast<size_t>(n));
    for (long c = 0; c < n; ++c) {
        Chunk ch;
        ch.index = c;
        for (const auto& w : spec.user_words)
            if (chunk_index(w.onset_s, cfg) == c)
                ch.user.transcript_hint.emplace_back(w.text, w.onset_s);
        if (auto it = anchors.find(c); it != anchors.end())
            ch.assistant = TA4Unit::spoken(it->second);
        else if (c >= pad_from && c <= pad_to)
            ch.assistant = TA4Unit::pad();
        else
            ch.assistant = TA4Unit::silence();
        ch.action = queue.emit_for_chunk(c);
        trace.chunks.push_back(std::move(ch));
    }

    if (!queue.drained()) {
        std::string ids;
        for (long id : queue.undrained_ids()) ids += (ids.empty() ? "" : ", ") + std::to_string(id);
        throw CompileError("action channel cannot drain within " + std::to_string(n) +
                           " chunks; undrained action ids: " + ids);
    }
    return trace;
}

// --- JSON (de)serialization of session specs (JSONL, one object per line) ----

inline void to_json(nlohmann::json& j, const ActionObject& a) {
    j = nlohmann::json{{"id", a.id}, {"name", a.name}, {"offset_s", a.offset_s}};
    if (!a.planning.empty()) j["planning"] = a.planning;
    if (!a.parameters.empty()) j["parameters"] = a.parameters;
}

inline void from_json(const nlohmann::json& j, ActionObject& a) {
    a.id = j.at("id").get<long>();
    a.name = j.at("name").get<std::string>();
    a.offset_s = j.at("offset_s").get<double>();
    a.planning = j.value("planning", std::string());
    if (j.contains("parameters"))
        a.parameters = j.at("parameters").get<std::map<std::string, std::string>>();
}

inline void to_json(nlohmann::json& j, const SessionSpec& s) {
    j = nlohmann::json{{"task", s.task}, {"duration_s", s.duration_s},
                       {"tts_pad_chunks", s.tts_pad_chunks}};
    if (s.speaker) j["speaker"] = *s.speaker;
    if (s.system_prompt) j["system_prompt"] = *s.system_prompt;
    auto& uw = j["user_words"] = nlohmann::json::array();
    for (const auto& w : s.user_words) uw.push_back({w.text, w.onset_s, w.offset_s});
    auto& as = j["assistant_script"] = nlohmann::json::array();
    for (const auto& t : s.assistant_script) as.push_back({t.text, t.speak_onset_s});
    j["actions"] = s.actions;
}

inline void from_json(const nlohmann::json& j, SessionSpec& s) {
    s.task = j.at("task").get<std::string>();
    s.duration_s = j.at("duration_s").get<double>();
    s.tts_pad_chunks = j.value("tts_pad_chunks", 3);
    if (j.contains("speaker")) s.speaker = j.at("speaker").get<std::string>();
    if (j.contains("system_prompt")) s.system_prompt = j.at("system_prompt").get<std::string>();
    s.user_words.clear();
    for (const auto& w : j.value("user_words", nlohmann::json::array()))
        s.user_words.push_back({w.at(0).get<std::string>(), w.at(1).get<double>(), w.at(2).get<double>()});
    s.assistant_script.clear();
    for (const auto& t : j.value("assistant_script", nlohmann::json::array()))
        s.assistant_script.push_back({t.at(0).get<std::string>(), t.at(1).get<double>()});
    s.actions.clear();
    if (j.contains("actions")) s.actions = j.at("actions").get<std::vector<ActionObject>>();
}

}  // namespace duplex
