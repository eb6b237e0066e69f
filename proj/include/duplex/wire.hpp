#pragma once

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "duplex/chunk.hpp"

namespace duplex {

struct TraceMeta {
    std::string task;
    std::string system_prompt;
    ClockConfig clock;

    friend bool operator==(const TraceMeta&, const TraceMeta&) = default;
};

struct ChunkTrace {
    std::vector<Chunk> chunks;
    TraceMeta meta;

    friend bool operator==(const ChunkTrace&, const ChunkTrace&) = default;
};

struct EncodeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DecodeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kUserFeatToken = "U";

// --- encoding ----------------------------------------------------------------

inline std::vector<Token> encode_chunk(const Chunk& c, const ClockConfig& cfg = {}) {
    auto violations = validate_chunk(c, cfg);
    if (!violations.empty())
        throw EncodeError("encode_chunk: " + violations.front().what);

    std::vector<Token> out;
    out.push_back(Token::mark(marker::user_audio_begin));
    for (int i = 0; i < cfg.user_feats_per_chunk; ++i)
        out.push_back(Token::text(std::string(kUserFeatToken)));
    out.push_back(Token::mark(marker::user_audio_end));
    out.push_back(Token::mark(marker::assistant_audio_begin));
    switch (c.assistant.anchor) {
        case AnchorKind::text: out.push_back(Token::text(c.assistant.text)); break;
        case AnchorKind::vad_silence: out.push_back(Token::mark(marker::vad_silence)); break;
        case AnchorKind::tts_pad: out.push_back(Token::mark(marker::tts_pad)); break;
    }
    for (uint8_t v : c.assistant.voiced)
        out.push_back(Token::audio(v != 0));
    out.push_back(Token::mark(marker::assistant_audio_end));
    for (const auto& t : c.action) out.push_back(t);
    out.push_back(Token::mark(marker::action_end));
    return out;
}

inline std::vector<Token> encode_trace(const ChunkTrace& trace) {
    std::vector<Token> out;
    for (const auto& c : trace.chunks) {
        auto frame = encode_chunk(c, trace.meta.clock);
        out.insert(out.end(), frame.begin(), frame.end());
    }
    return out;
}

// --- streaming parser --------------------------------------------------------

struct ParseEvent {
    enum class Kind { chunk_complete, toolcall_open, toolcall_close, malformed };
    Kind kind;
    Chunk chunk;          // chunk_complete
    std::string reason;   // malformed
    size_t position = 0;  // token index in the stream
};

// Incremental chunk-frame parser. Tool-call bracketing is tracked across chunk
// boundaries; on a grammar violation the parser reports a malformed event and
// resynchronizes at the next user-begin marker.
class StreamParser {
public:
    explicit StreamParser(ClockConfig cfg = {}) : cfg_(cfg) {}

    std::vector<ParseEvent> feed(const Token& tok) {
        std::vector<ParseEvent> events;
        feed_impl(tok, events);
        ++pos_;
        return events;
    }

    std::vector<ParseEvent> feed_all(const std::vector<Token>& toks) {
        std::vector<ParseEvent> events;
        for (const auto& t : toks) {
            feed_impl(t, events);
            ++pos_;
        }
        return events;
    }

    // True when the parser sits at a chunk boundary with no open tool call.
    bool at_clean_boundary() const { return state_ == State::expect_user_begin && !toolcall_open_; }
    bool toolcall_open() const { return toolcall_open_; }
    long chunks_completed() const { return next_index_; }

private:
    enum class State {
        expect_user_begin,
        user_feats,
        expect_assistant_begin,
        expect_anchor,
        audio_codes,
        action,
        resync,
    };

    void fail(std::vector<ParseEvent>& events, std::string reason) {
        events.push_back({ParseEvent::Kind::malformed, {}, std::move(reason), pos_});
        state_ = State::resync;
        toolcall_open_ = false;
    }

    void feed_impl(const Token& tok, std::vector<ParseEvent>& events) {
        switch (state_) {
            case State::resync:
                if (tok.is_marker(marker::user_audio_begin)) {
                    begin_chunk();
                    state_ = State::user_feats;
                }
                return;
            case State::expect_user_begin:
                if (!tok.is_marker(marker::user_audio_begin))
                    return fail(events, "expected user-begin marker, got '" + tok.value + "'");
                begin_chunk();
                state_ = State::user_feats;
                return;
            case State::user_feats:
                if (tok.is_marker(marker::user_audio_end)) {
                    if (feat_count_ != cfg_.user_feats_per_chunk)
                        return fail(events, "user segment arity " + std::to_string(feat_count_));
                    state_ = State::expect_assistant_begin;
                    return;
                }
                if (tok.kind == TokenKind::marker)
                    return fail(events, "unexpected marker in user segment: " + tok.value);
                ++feat_count_;
                if (feat_count_ > cfg_.user_feats_per_chunk)
                    return fail(events, "user segment arity overflow");
                return;
            case State::expect_assistant_begin:
                if (!tok.is_marker(marker::assistant_audio_begin))
                    return fail(events, "expected assistant-begin marker, got '" + tok.value + "'");
                state_ = State::expect_anchor;
                return;
            case State::expect_anchor:
                if (tok.is_marker(marker::vad_silence)) {
                    cur_.assistant.anchor = AnchorKind::vad_silence;
                } else if (tok.is_marker(marker::tts_pad)) {
                    cur_.assistant.anchor = AnchorKind::tts_pad;
                } else if (tok.kind == TokenKind::text) {
                    cur_.assistant.anchor = AnchorKind::text;
                    cur_.assistant.text = tok.value;
                } else {
                    return fail(events, "bad TA4 anchor: " + tok.value);
                }
                state_ = State::audio_codes;
                return;
            case State::audio_codes:
                if (tok.is_marker(marker::assistant_audio_end)) {
                    if (static_cast<int>(cur_.assistant.voiced.size()) != cfg_.audio_tokens_per_chunk)
                        return fail(events, "TA4 arity " + std::to_string(cur_.assistant.voiced.size()));
                    state_ = State::action;
                    return;
                }
                if (tok.kind != TokenKind::audio_code)
                    return fail(events, "expected audio code, got '" + tok.value + "'");
                cur_.assistant.voiced.push_back(tok.value == audio_voiced_code ? 1 : 0);
                if (static_cast<int>(cur_.assistant.voiced.size()) > cfg_.audio_tokens_per_chunk)
                    return fail(events, "TA4 arity overflow");
                return;
            case State::action:
                if (tok.is_marker(marker::action_end)) {
                    // A tool-call block may stay open across the chunk boundary.
                    if (static_cast<int>(cur_.action.size()) > cfg_.action_budget)
                        return fail(events, "action budget exceeded");
                    cur_.index = next_index_++;
                    events.push_back({ParseEvent::Kind::chunk_complete, cur_, {}, pos_});
                    state_ = State::expect_user_begin;
                    return;
                }
                if (tok.is_marker(marker::toolcall_begin)) {
                    if (toolcall_open_) return fail(events, "nested toolcall");
                    toolcall_open_ = true;
                    cur_.action.push_back(tok);
                    events.push_back({ParseEvent::Kind::toolcall_open, {}, {}, pos_});
                    return;
                }
                if (tok.is_marker(marker::toolcall_end)) {
                    if (!toolcall_open_) return fail(events, "toolcall close without open");
                    toolcall_open_ = false;
                    cur_.action.push_back(tok);
                    events.push_back({ParseEvent::Kind::toolcall_close, {}, {}, pos_});
                    return;
                }
                if (tok.kind == TokenKind::marker)
                    return fail(events, "unexpected marker on action channel: " + tok.value);
                if (tok.kind == TokenKind::audio_code)
                    return fail(events, "audio code on action channel");
                cur_.action.push_back(tok);
                return;
        }
    }

    void begin_chunk() {
        cur_ = Chunk{};
        cur_.assistant.voiced.clear();
        feat_count_ = 0;
    }

    ClockConfig cfg_;
    State state_ = State::expect_user_begin;
    Chunk cur_;
    int feat_count_ = 0;
    bool toolcall_open_ = false;
    long next_index_ = 0;
    size_t pos_ = 0;
};

// --- whole-stream decode -----------------------------------------------------

inline ChunkTrace decode_trace(const std::vector<Token>& stream, const ClockConfig& cfg = {}) {
    StreamParser p(cfg);
    ChunkTrace trace;
    trace.meta.clock = cfg;
    auto events = p.feed_all(stream);
    for (const auto& e : events) {
        if (e.kind == ParseEvent::Kind::malformed)
            throw DecodeError("decode_trace: " + e.reason + " at token " + std::to_string(e.position));
        if (e.kind == ParseEvent::Kind::chunk_complete)
            trace.chunks.push_back(e.chunk);
    }
    if (!p.at_clean_boundary())
        throw DecodeError("decode_trace: truncated stream");
    return trace;
}

// --- textual wire form -------------------------------------------------------

// One chunk frame per line, tokens separated by single spaces, UTF-8.
inline std::string wire_to_text(const ChunkTrace& trace) {
    std::string out;
    for (const auto& c : trace.chunks) {
        auto frame = encode_chunk(c, trace.meta.clock);
        for (size_t i = 0; i < frame.size(); ++i) {
            if (i) out += ' ';
            out += frame[i].value;
        }
        out += '\n';
    }
    return out;
}

inline Token classify_wire_token(const std::string& s) {
    if (is_known_marker(s)) return Token::mark(s);
    if (is_known_label(s)) return Token::control(s);
    if (s == audio_silence_code || s == audio_voiced_code)
        return {TokenKind::audio_code, s};
    return Token::text(s);
}

inline std::vector<Token> wire_from_text(std::string_view text) {
    std::vector<Token> out;
    std::string cur;
    for (char ch : text) {
        if (ch == ' ' || ch == '\n' || ch == '\r' || ch == '\t') {
            if (!cur.empty()) { out.push_back(classify_wire_token(cur)); cur.clear(); }
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(classify_wire_token(cur));
    return out;
}

}  // namespace duplex
