#pragma once

#include <random>
#include <string>
#include <vector>

#include "duplex/compiler.hpp"
#include "duplex/engine.hpp"
#include "duplex/registry.hpp"

namespace duplex {

inline const std::vector<std::string>& known_scenarios() {
    static const std::vector<std::string> s = {"normal", "pause", "interrupt", "backchannel"};
    return s;
}

inline const std::vector<std::string>& known_patterns() {
    static const std::vector<std::string> s = {"single", "multi", "backchannel_action"};
    return s;
}

namespace detail {

inline const std::vector<std::string>& user_word_bank() {
    static const std::vector<std::string> w = {
        "今天", "天气", "不错", "我们", "出去", "走走", "顺便", "找个", "地方",
        "吃饭", "然后", "回家", "休息", "明天", "还要", "上班", "路上", "聊聊"};
    return w;
}

inline const std::vector<std::string>& assistant_word_bank() {
    static const std::vector<std::string> w = {
        "好", "的", "我", "觉", "得", "这", "个", "主", "意", "很", "不", "错"};
    return w;
}

inline const std::vector<std::string>& backchannel_bank() {
    static const std::vector<std::string> w = {"没错", "嗯嗯", "对的", "是的"};
    return w;
}

struct ToolTemplate {
    const char* name;
    const char* arg;
};

inline const std::vector<ToolTemplate>& tool_templates() {
    static const std::vector<ToolTemplate> t = {
        {"set_car_setting", "AC=24"},  {"play_media", "Beatles"},
        {"navigate", "home"},          {"query_weather", "Beijing"},
        {"open_app", "maps"},          {"increase_system_setting", "volume"},
        {"search_food", "noodles"},    {"make_call", "Alice"},
        {"next_track", ""},            {"query_arrival_time", ""}};
    return t;
}

}  // namespace detail

// Synthetic speaking rate for textual word timings: 4 tokens per second.
inline constexpr double kTokensPerSecond = 4.0;
inline constexpr double kWordLen = 1.0 / kTokensPerSecond;

// Deterministic synthetic case generation. `kind` is a turn-taking scenario or
// a tool-call pattern name.
inline std::vector<BenchCase> generate_cases(const std::string& kind, int n, uint64_t seed,
                                             const ToolRegistry* registry = nullptr) {
    std::mt19937_64 rng(seed ^ std::hash<std::string>{}(kind));
    auto uniform = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    auto pick = [&](const auto& v) { return v[rng() % v.size()]; };

    const bool is_scenario =
        std::find(known_scenarios().begin(), known_scenarios().end(), kind) != known_scenarios().end();
    const bool is_pattern =
        std::find(known_patterns().begin(), known_patterns().end(), kind) != known_patterns().end();
    if (!is_scenario && !is_pattern) throw std::invalid_argument("unknown case kind: " + kind);

    std::vector<BenchCase> out;
    out.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        BenchCase c;
        c.id = kind + "-" + std::to_string(i);
        c.history = {"用户: 我们聊聊周末的安排吧。", "助手: 好的，你想做什么？"};

        auto put_words = [&](double start, int count) {
            double t = start;
            for (int w = 0; w < count; ++w) {
                c.user_words.push_back({pick(detail::user_word_bank()), t, t + kWordLen});
                t += kWordLen;
            }
            return t;
        };

        if (kind == "normal") {
            c.scenario = "normal";
            double end = put_words(uniform(0.2, 0.6), 3 + static_cast<int>(rng() % 4));
            c.anchors.t_ue = end;
            c.audio_end_s = end + 2.0;
        } else if (kind == "pause") {
            c.scenario = "pause";
            double mid = put_words(uniform(0.2, 0.5), 2 + static_cast<int>(rng() % 3));
            double gap = uniform(0.5, 1.2);  // intra-turn hesitation >= 0.5 s
            double end = put_words(mid + gap, 2 + static_cast<int>(rng() % 3));
            c.anchors.t_ue = end;
            c.audio_end_s = end + 2.0;
        } else if (kind == "interrupt") {
            c.scenario = "interrupt";
            // acknowledgement, then a real new thought at t_int
            double ack_start = uniform(0.3, 0.8);
            double ack_end = ack_start + 2 * kWordLen;
            c.user_words.push_back({"你说", ack_start, ack_start + kWordLen});
            c.user_words.push_back({"得对", ack_start + kWordLen, ack_end});
            double t_int = ack_end + uniform(0.05, 0.3);
            put_words(t_int, 3 + static_cast<int>(rng() % 3));
            c.anchors.t_int = t_int;
            c.audio_end_s = t_int + 3.0;
        } else if (kind == "backchannel") {
            c.scenario = "backchannel";
            double bc_s = uniform(0.8, 2.0);
            std::string word = pick(detail::backchannel_bank());
            c.user_words.push_back({word, bc_s, bc_s + 2 * kWordLen});
            c.anchors.t_bc_s = bc_s;
            c.anchors.t_bc_e = bc_s + 2 * kWordLen;
            c.audio_end_s = *c.anchors.t_bc_e + 3.0;
        } else {
            c.pattern = kind;
            int count = kind == "multi" ? 2 + static_cast<int>(rng() % 2) : 1;
            double off = uniform(1.0, 2.0);
            for (int a = 0; a < count; ++a) {
                auto tmpl = pick(detail::tool_templates());
                if (registry && !registry->contains(tmpl.name))
                    throw std::invalid_argument(std::string("template tool not in registry: ") + tmpl.name);
                ActionObject act;
                act.id = a + 1;
                act.name = tmpl.name;
                act.planning = "好的";
                if (tmpl.arg[0] != '\0') act.parameters[""] = tmpl.arg;
                act.offset_s = off;
                c.gt_actions.push_back(std::move(act));
                off += uniform(0.8, 1.4);  // strictly increasing, queue drains between
            }
            put_words(0.2, 3 + static_cast<int>(rng() % 3));
            if (kind == "backchannel_action") {
                double bc_s = c.gt_actions.front().offset_s - 0.4;
                c.anchors.t_bc_s = bc_s;
                c.anchors.t_bc_e = bc_s + 0.4;
            }
            c.audio_end_s = c.gt_actions.back().offset_s + 2.5;
        }
        out.push_back(std::move(c));
    }
    return out;
}

// Ground-truth session spec for a case: compiled and replayed through the
// engine it behaves exactly as the scenario demands, which is what the scorer
// oracle tests rely on.
inline SessionSpec oracle_spec(const BenchCase& c, const ClockConfig& cfg = {}) {
    SessionSpec spec;
    spec.duration_s = c.audio_end_s;
    spec.tts_pad_chunks = 0;
    spec.speaker = "默认";
    const auto& bank = detail::assistant_word_bank();
    auto speak_range = [&](long from_chunk, long to_chunk) {
        for (long k = from_chunk; k <= to_chunk; ++k)
            spec.assistant_script.push_back(
                {bank[static_cast<size_t>(k) % bank.size()], chunk_start_time(k, cfg)});
    };
    const long last = chunk_count(c.audio_end_s, cfg) - 1;

    if (c.scenario == "normal" || c.scenario == "pause") {
        spec.task = "dialogue";
        long onset = chunk_index(*c.anchors.t_ue, cfg) + 1;  // first full chunk after user end
        speak_range(onset, std::min(onset + 5, last));
    } else if (c.scenario == "interrupt") {
        spec.task = "interrupt";
        long k_int = chunk_index(*c.anchors.t_int, cfg);
        speak_range(0, k_int);  // yields right after the interrupt chunk
        ActionObject a;
        a.id = 1;
        a.name = "interrupt";
        a.offset_s = *c.anchors.t_int;
        spec.actions.push_back(a);
    } else if (c.scenario == "backchannel") {
        spec.task = "backchannel";
        speak_range(0, last);  // speech is never interrupted
        ActionObject a;
        a.id = 1;
        a.name = "backchannel";
        a.offset_s = *c.anchors.t_bc_e;
        spec.actions.push_back(a);
    } else {
        spec.task = "toolcall";
        speak_range(0, last);
        spec.actions = c.gt_actions;
    }
    return spec;
}

}  // namespace duplex
