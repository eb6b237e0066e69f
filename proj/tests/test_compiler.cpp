#include <doctest.h>

#include "duplex/compiler.hpp"
#include "support.hpp"

using namespace duplex;

namespace {

// User-channel transcription session: three user words, two assistant anchors.
SessionSpec user_asr_session() {
    SessionSpec s;
    s.task = "asr_human";
    s.duration_s = 9 * 0.16;
    s.tts_pad_chunks = 1;
    s.user_words = {{"今天", 0.0, 0.16}, {"天气很", 0.16, 0.32}, {"好", 0.32, 0.48}};
    s.assistant_script = {{"确", 4 * 0.16}, {"实", 5 * 0.16}};
    return s;
}

std::string action_text(const Chunk& c) { return join_text_tokens(c.action); }

}  // namespace

TEST_CASE("snap_offset") {
    CHECK(snap_offset(0.50) == 3);
    CHECK(snap_offset(0.0) == 0);
    CHECK(snap_offset(1.27) == 7);
}

TEST_CASE("resolve_system_prompt") {
    CHECK(resolve_system_prompt("dialogue") == "");
    CHECK(resolve_system_prompt("asr_human") == "请记录下你所听到的语音内容，只记录用户说的内容。");
    CHECK(resolve_system_prompt("interrupt", std::string("小明")) ==
          "你是一个 AI 语音助手，用 小明 的声音来说话。");
    CHECK_THROWS_AS(resolve_system_prompt("interrupt"), CompileError);
    CHECK_THROWS_AS(resolve_system_prompt("nonsense"), CompileError);
}

TEST_CASE("user transcript re-emits at a fixed +2 chunk lag") {
    auto trace = compile(user_asr_session());
    REQUIRE(trace.chunks.size() == 9);
    CHECK(action_text(trace.chunks[0]).empty());
    CHECK(action_text(trace.chunks[1]).empty());
    CHECK(action_text(trace.chunks[2]) == "今天");
    CHECK(action_text(trace.chunks[3]) == "天气很");
    CHECK(action_text(trace.chunks[4]) == "好");
    for (size_t i = 5; i < 9; ++i) CHECK(trace.chunks[i].action.empty());

    // assistant anchors left-aligned, one trailing pad chunk, silence elsewhere
    CHECK(trace.chunks[4].assistant == TA4Unit::spoken("确"));
    CHECK(trace.chunks[5].assistant == TA4Unit::spoken("实"));
    CHECK(trace.chunks[6].assistant.anchor == AnchorKind::tts_pad);
    CHECK(trace.chunks[7].assistant == TA4Unit::silence());
    CHECK(trace.chunks[8].assistant == TA4Unit::silence());

    // transcript hints ride the user channel at their onset chunks
    REQUIRE(trace.chunks[0].user.transcript_hint.size() == 1);
    CHECK(trace.chunks[0].user.transcript_hint[0].first == "今天");
}

TEST_CASE("same-chunk transcript tokens merge into one re-emission") {
    SessionSpec s;
    s.task = "asr_human";
    s.duration_s = 0.96;
    s.tts_pad_chunks = 0;
    s.user_words = {{"你", 0.0, 0.05}, {"好", 0.05, 0.10}};  // both in chunk 0
    auto trace = compile(s);
    CHECK(action_text(trace.chunks[2]) == "你好");
    CHECK(trace.chunks[3].action.empty());
}

TEST_CASE("assistant transcript re-emits at speech chunk + 2") {
    SessionSpec s;
    s.task = "asr_assistant";
    s.duration_s = 9 * 0.16;
    s.tts_pad_chunks = 1;
    s.assistant_script = {{"确", 4 * 0.16}, {"实", 5 * 0.16}};
    auto trace = compile(s);
    CHECK(action_text(trace.chunks[6]) == "确");
    CHECK(action_text(trace.chunks[7]) == "实");
}

TEST_CASE("empty 0.8 s session compiles to 5 all-silent chunks") {
    SessionSpec s;
    s.task = "dialogue";
    s.duration_s = 0.8;
    auto trace = compile(s);
    REQUIRE(trace.chunks.size() == 5);
    for (const auto& c : trace.chunks) {
        CHECK(c.assistant == TA4Unit::silence());
        CHECK(c.action.empty());
    }
    CHECK(trace.meta.system_prompt.empty());
}

TEST_CASE("tool-call session: spill, cross-chunk block, trailing pads") {
    SessionSpec s;
    s.task = "toolcall";
    s.duration_s = 16 * 0.16;
    s.tts_pad_chunks = 3;
    s.user_words = {{"车里", 0.0, 0.16}, {"真冷", 0.16, 0.32}, {"啊", 0.32, 0.48}};
    ActionObject a;
    a.id = 1;
    a.name = "set_car_setting";
    a.planning = "用户感到有点冷，应该打开空调开暖风";
    a.parameters[""] = "AC=26度";
    a.offset_s = 0.48;  // chunk 3
    s.actions = {a};
    s.assistant_script = {{"我", 4 * 0.16},  {"明白", 5 * 0.16}, {"了", 6 * 0.16},
                          {"这就", 7 * 0.16}, {"帮", 8 * 0.16},  {"你", 9 * 0.16},
                          {"打开", 10 * 0.16}, {"空调", 11 * 0.16}};

    auto trace = compile(s);
    REQUIRE(trace.chunks.size() == 16);

    // planning starts at its snapped offset chunk and fills the budget
    CHECK(trace.chunks[3].action.size() == 10);
    CHECK(trace.chunks[2].action.empty());

    long open_chunk = -1, close_chunk = -1;
    for (const auto& c : trace.chunks)
        for (const auto& t : c.action) {
            if (t.is_marker(marker::toolcall_begin)) open_chunk = c.index;
            if (t.is_marker(marker::toolcall_end)) close_chunk = c.index;
        }
    CHECK(open_chunk > 3 - 1);
    CHECK(close_chunk > open_chunk);  // block closes in a later chunk

    // three audible pad chunks after the last anchor, then silence
    CHECK(trace.chunks[12].assistant.anchor == AnchorKind::tts_pad);
    CHECK(trace.chunks[13].assistant.anchor == AnchorKind::tts_pad);
    CHECK(trace.chunks[14].assistant.anchor == AnchorKind::tts_pad);
    CHECK(trace.chunks[15].assistant == TA4Unit::silence());

    // compiled traces always round-trip through the codec
    auto decoded = decode_trace(encode_trace(trace));
    for (size_t i = 0; i < trace.chunks.size(); ++i) {
        CHECK(decoded.chunks[i].assistant == trace.chunks[i].assistant);
        CHECK(decoded.chunks[i].action == trace.chunks[i].action);
    }
}

TEST_CASE("undrainable action channel is a compile error") {
    SessionSpec s;
    s.task = "toolcall";
    s.duration_s = 0.32;  // 2 chunks
    ActionObject a;
    a.id = 7;
    a.name = "navigate";
    a.planning = "这是一段非常非常长的规划文本完全塞不进两个块";
    a.parameters[""] = "home";
    a.offset_s = 0.0;
    s.actions = {a};
    CHECK_THROWS_WITH_AS(compile(s), doctest::Contains("7"), CompileError);
}

TEST_CASE("compile is deterministic") {
    auto a = compile(user_asr_session());
    auto b = compile(user_asr_session());
    CHECK(a.chunks == b.chunks);
}

TEST_CASE("interpret compiles like asr_human with its own prompt") {
    auto s = user_asr_session();
    s.task = "interpret";
    auto trace = compile(s);
    CHECK(join_text_tokens(trace.chunks[2].action) == "今天");
    CHECK(trace.meta.system_prompt == "请翻译用户说的内容。");
}

TEST_CASE("session spec JSON round-trips") {
    auto s = user_asr_session();
    ActionObject a;
    a.id = 2;
    a.name = "response";
    a.offset_s = 1.0;
    s.actions = {a};
    nlohmann::json j = s;
    auto back = j.get<SessionSpec>();
    CHECK(back.task == s.task);
    CHECK(back.user_words.size() == s.user_words.size());
    CHECK(back.actions == s.actions);
    CHECK(compile(back).chunks == compile(s).chunks);
}
