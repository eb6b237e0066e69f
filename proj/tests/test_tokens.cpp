#include <doctest.h>

#include "duplex/tokens.hpp"

using namespace duplex;

TEST_CASE("CJK text splits one token per grapheme") {
    auto t = split_text("今天天气");
    REQUIRE(t.size() == 4);
    CHECK(t[0] == "今");
    CHECK(t[3] == "气");
}

TEST_CASE("non-CJK text splits on whitespace") {
    auto t = split_text("play the  beatles");
    REQUIRE(t.size() == 3);
    CHECK(t[0] == "play");
    CHECK(t[2] == "beatles");
}

TEST_CASE("mixed text keeps ascii runs intact around CJK") {
    auto t = split_text("AC=26度");
    REQUIRE(t.size() == 2);
    CHECK(t[0] == "AC=26");
    CHECK(t[1] == "度");
}

TEST_CASE("fullwidth punctuation counts as its own token") {
    auto t = split_text("用户感到有点冷，应该打开空调开暖");
    CHECK(t.size() == 16);
}

TEST_CASE("join_text restores spaces only between ascii tokens") {
    CHECK(join_text({"play", "the", "beatles"}) == "play the beatles");
    CHECK(join_text({"空", "调"}) == "空调");
    CHECK(join_text({"AC=26", "度", "打开"}) == "AC=26度打开");
    // split/join round-trip; a space next to a wide grapheme is not preserved
    std::string s = "打开空调temperature 26度";
    CHECK(join_text(split_text(s)) == s);
}

TEST_CASE("marker and label vocabulary is closed") {
    CHECK(is_known_marker("<|action_end|>"));
    CHECK(is_known_marker("<vad_silence>"));
    CHECK_FALSE(is_known_marker("<interrupt>"));
    CHECK(is_known_label("<interrupt>"));
    CHECK(is_known_label("<backchannel>"));
    CHECK(is_known_label("<response>"));
    CHECK_FALSE(is_known_label("<pause>"));
}
