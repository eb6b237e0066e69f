// Shared test helpers: random instance generators and the single-tape
// reference emitter used as the scheduling oracle. Kept independent of
// ActionQueue's internals on purpose.
#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "duplex/scheduler.hpp"
#include "duplex/wire.hpp"

namespace testsupport {

using namespace duplex;

// Flat-tape oracle: actions sorted by (offset, id) form one global token tape;
// each chunk takes up to `budget` tokens from the front, and a token becomes
// available only once its action's trigger chunk has been reached.
inline std::vector<std::vector<Token>> reference_emit(std::vector<ActionObject> actions,
                                                      const ClockConfig& cfg, long n_chunks) {
    std::sort(actions.begin(), actions.end(), [](const ActionObject& a, const ActionObject& b) {
        return std::tie(a.offset_s, a.id) < std::tie(b.offset_s, b.id);
    });
    struct TapeTok {
        Token tok;
        long trigger;
    };
    std::vector<TapeTok> tape;
    for (const auto& a : actions) {
        long trig = chunk_index(a.offset_s, cfg);
        for (const auto& t : expand_action(a)) tape.push_back({t, trig});
    }
    std::vector<std::vector<Token>> out(static_cast<size_t>(n_chunks));
    size_t cursor = 0;
    for (long c = 0; c < n_chunks; ++c) {
        int left = cfg.action_budget;
        while (left > 0 && cursor < tape.size() && tape[cursor].trigger <= c) {
            out[static_cast<size_t>(c)].push_back(tape[cursor].tok);
            ++cursor;
            --left;
        }
    }
    return out;
}

inline std::string random_cjk_text(std::mt19937_64& rng, int len) {
    static const std::vector<std::string> bank = {"好", "的", "打", "开", "空", "调", "温",
                                                  "度", "音", "乐", "导", "航", "回", "家"};
    std::string s;
    for (int i = 0; i < len; ++i) s += bank[rng() % bank.size()];
    return s;
}

inline ActionObject random_action(std::mt19937_64& rng, long id, double max_offset) {
    ActionObject a;
    a.id = id;
    a.offset_s = (static_cast<double>(rng() % 1000) / 1000.0) * max_offset;
    switch (rng() % 4) {
        case 0:
            a.name = "response";
            break;
        case 1:
            a.name = "backchannel";
            break;
        case 2:
            a.name = "asr";
            a.planning = random_cjk_text(rng, 1 + static_cast<int>(rng() % 4));
            break;
        default:
            a.name = "set_car_setting";
            a.planning = random_cjk_text(rng, static_cast<int>(rng() % 12));
            a.parameters[""] = "AC=" + std::to_string(16 + rng() % 14);
            break;
    }
    return a;
}

// Random valid trace: random TA4 units plus an action lane produced by the
// FIFO queue from random actions. Horizon is extended until the queue drains.
inline ChunkTrace random_trace(std::mt19937_64& rng, const ClockConfig& cfg = {},
                               long max_chunks = 64, int max_actions = 5) {
    long n = 4 + static_cast<long>(rng() % static_cast<unsigned long>(max_chunks - 4));
    std::vector<ActionObject> actions;
    int n_actions = static_cast<int>(rng() % static_cast<unsigned long>(max_actions + 1));
    for (int i = 0; i < n_actions; ++i)
        actions.push_back(random_action(rng, i + 1, chunk_start_time(n - 1, cfg)));

    for (;;) {
        ActionQueue q(cfg);
        for (const auto& a : actions) q.enqueue(a);
        std::vector<std::vector<Token>> lanes;
        for (long c = 0; c < n; ++c) lanes.push_back(q.emit_for_chunk(c));
        if (!q.drained()) {
            n += 8;
            continue;
        }
        ChunkTrace trace;
        trace.meta.clock = cfg;
        for (long c = 0; c < n; ++c) {
            Chunk ch;
            ch.index = c;
            switch (rng() % 4) {
                case 0: ch.assistant = TA4Unit::spoken(random_cjk_text(rng, 1 + static_cast<int>(rng() % 3))); break;
                case 1: ch.assistant = TA4Unit::pad(rng() % 2 == 0); break;
                default: ch.assistant = TA4Unit::silence(); break;
            }
            ch.action = lanes[static_cast<size_t>(c)];
            trace.chunks.push_back(std::move(ch));
        }
        return trace;
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace testsupport
