#include <doctest.h>

#include "duplex/casegen.hpp"
#include "duplex/registry.hpp"

using namespace duplex;

TEST_CASE("generation is reproducible for a fixed seed") {
    auto a = generate_cases("normal", 20, 123);
    auto b = generate_cases("normal", 20, 123);
    REQUIRE(a.size() == 20);
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].id == b[i].id);
        CHECK(a[i].audio_end_s == b[i].audio_end_s);
        CHECK(*a[i].anchors.t_ue == *b[i].anchors.t_ue);
    }
    auto c = generate_cases("normal", 20, 124);
    CHECK(c[0].audio_end_s != a[0].audio_end_s);
}

TEST_CASE("pause cases contain an intra-turn silence of at least 0.5 s") {
    for (const auto& c : generate_cases("pause", 50, 7)) {
        double max_gap = 0;
        for (size_t i = 1; i < c.user_words.size(); ++i)
            max_gap = std::max(max_gap, c.user_words[i].onset_s - c.user_words[i - 1].offset_s);
        CHECK(max_gap >= 0.5);
    }
}

TEST_CASE("multi-action cases carry 2-3 actions with strictly increasing offsets") {
    for (const auto& c : generate_cases("multi", 50, 11)) {
        REQUIRE(c.gt_actions.size() >= 2);
        REQUIRE(c.gt_actions.size() <= 3);
        for (size_t i = 1; i < c.gt_actions.size(); ++i)
            CHECK(c.gt_actions[i].offset_s > c.gt_actions[i - 1].offset_s);
    }
}

TEST_CASE("generated tool names exist in the shipped registry") {
    auto reg = load_tool_registry(DUPLEX_DATA_DIR "/tool_registry.json");
    for (const char* kind : {"single", "multi", "backchannel_action"})
        for (const auto& c : generate_cases(kind, 30, 2, &reg))
            for (const auto& a : c.gt_actions) CHECK(reg.contains(a.name));
}

TEST_CASE("every generated case has a compilable oracle spec") {
    for (const char* kind : {"normal", "pause", "interrupt", "backchannel", "single", "multi",
                             "backchannel_action"}) {
        for (const auto& c : generate_cases(kind, 10, 31)) {
            validate_case(c);
            auto trace = compile(oracle_spec(c));
            CHECK(trace.chunks.size() == static_cast<size_t>(chunk_count(c.audio_end_s)));
        }
    }
}

TEST_CASE("unknown kind is rejected") {
    CHECK_THROWS_AS(generate_cases("speedrun", 1, 0), std::invalid_argument);
}
