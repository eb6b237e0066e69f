#pragma once

#include <cmath>
#include <stdexcept>

namespace duplex {

// The conversational clock. One chunk is chunk_ms of wall time and carries one
// frame of all three channels.
struct ClockConfig {
    int chunk_ms = 160;
    int user_stride_ms = 80;
    int audio_stride_ms = 40;
    int user_feats_per_chunk = 2;
    int audio_tokens_per_chunk = 4;
    int action_budget = 10;

    double chunk_s() const { return chunk_ms / 1000.0; }

    bool consistent() const {
        return chunk_ms == user_feats_per_chunk * user_stride_ms &&
               chunk_ms == audio_tokens_per_chunk * audio_stride_ms &&
               action_budget >= 1;
    }
};

// Guards against double rounding at chunk boundaries (times are handled as
// seconds but are conceptually clock multiples).
inline constexpr double kClockEps = 1e-9;

inline long chunk_index(double t_s, const ClockConfig& cfg = {}) {
    if (t_s < 0) throw std::domain_error("chunk_index: negative time");
    return static_cast<long>(std::floor(t_s / cfg.chunk_s() + kClockEps));
}

inline double chunk_start_time(long index, const ClockConfig& cfg = {}) {
    return static_cast<double>(index) * cfg.chunk_s();
}

inline long chunk_count(double duration_s, const ClockConfig& cfg = {}) {
    if (duration_s < 0) throw std::domain_error("chunk_count: negative duration");
    return static_cast<long>(std::ceil(duration_s / cfg.chunk_s() - kClockEps));
}

}  // namespace duplex
