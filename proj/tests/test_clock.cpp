#include <doctest.h>

#include <random>

#include "duplex/clock.hpp"

using namespace duplex;

TEST_CASE("chunk_index floors onto the conversational clock") {
    CHECK(chunk_index(0.48) == 3);
    CHECK(chunk_index(0.0) == 0);
    CHECK(chunk_index(0.1599) == 0);
    CHECK(chunk_index(0.16) == 1);
    CHECK_THROWS_AS(chunk_index(-0.01), std::domain_error);
}

TEST_CASE("chunk_start_time brackets every nonnegative time") {
    std::mt19937_64 rng(7);
    ClockConfig cfg;
    for (int i = 0; i < 2000; ++i) {
        double t = static_cast<double>(rng() % 1000000) / 10000.0;
        long c = chunk_index(t, cfg);
        CHECK(chunk_start_time(c, cfg) <= t + kClockEps);
        CHECK(t < chunk_start_time(c + 1, cfg) + kClockEps);
    }
}

TEST_CASE("a trace of N chunks spans N x 0.16 s under the default config") {
    ClockConfig cfg;
    CHECK(cfg.consistent());
    CHECK(chunk_count(1.44, cfg) == 9);
    CHECK(chunk_count(0.8, cfg) == 5);
    CHECK(chunk_start_time(9, cfg) == doctest::Approx(1.44));
}

TEST_CASE("non-default clock stays consistent") {
    ClockConfig cfg;
    cfg.chunk_ms = 80;
    cfg.user_stride_ms = 40;
    cfg.audio_stride_ms = 20;
    CHECK(cfg.consistent());
    CHECK(chunk_index(0.48, cfg) == 6);
}
