#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "duplex/clock.hpp"
#include "duplex/tokens.hpp"

namespace duplex {

enum class AnchorKind : uint8_t { text, vad_silence, tts_pad };

// Assistant per-chunk unit: one text anchor plus four audio codes. Arity is a
// validated invariant, not a structural one, so a malformed parse stays
// representable.
struct TA4Unit {
    AnchorKind anchor = AnchorKind::vad_silence;
    std::string text;                    // set iff anchor == text
    std::vector<uint8_t> voiced{0, 0, 0, 0};  // per-code audibility, 2-symbol codebook

    static TA4Unit silence() { return {}; }
    static TA4Unit spoken(std::string t) {
        return {AnchorKind::text, std::move(t), {1, 1, 1, 1}};
    }
    static TA4Unit pad(bool audible = true) {
        uint8_t v = audible ? 1 : 0;
        return {AnchorKind::tts_pad, {}, {v, v, v, v}};
    }

    friend bool operator==(const TA4Unit&, const TA4Unit&) = default;
};

// True iff the unit carries audible content: a text anchor always does, a
// trailing pad does when any code is voiced, a silence anchor never does.
inline bool is_speaking(const TA4Unit& u) {
    switch (u.anchor) {
        case AnchorKind::text: return true;
        case AnchorKind::vad_silence: return false;
        case AnchorKind::tts_pad:
            return std::any_of(u.voiced.begin(), u.voiced.end(), [](uint8_t v) { return v != 0; });
    }
    return false;
}

// User-side chunk content. Features are opaque placeholders; the transcript
// hint is annotation only and never reaches the wire.
struct UserSegment {
    std::vector<std::pair<std::string, double>> transcript_hint;  // (token, onset_s)

    friend bool operator==(const UserSegment&, const UserSegment&) = default;
};

inline constexpr std::string_view kAsrName = "asr";

inline bool is_control_name(std::string_view name) {
    return name == "response" || name == "interrupt" || name == "backchannel" ||
           name == kAsrName;
}

// One queued unit on the action channel.
struct ActionObject {
    long id = 0;
    std::string name;                               // tool name or control name
    std::string planning;                           // optional rationale / transcript
    std::map<std::string, std::string> parameters;  // empty for control/asr
    double offset_s = 0.0;

    friend bool operator==(const ActionObject&, const ActionObject&) = default;
};

struct Chunk {
    long index = 0;
    UserSegment user;
    TA4Unit assistant;
    std::vector<Token> action;  // post-budget; excludes the terminating <|action_end|>

    friend bool operator==(const Chunk&, const Chunk&) = default;
};

struct Violation {
    std::string what;
};

inline std::vector<Violation> validate_chunk(const Chunk& c, const ClockConfig& cfg = {}) {
    std::vector<Violation> out;
    if (static_cast<int>(c.action.size()) > cfg.action_budget)
        out.push_back({"budget exceeded: " + std::to_string(c.action.size()) + " action tokens, budget " +
                       std::to_string(cfg.action_budget)});
    if (c.assistant.voiced.size() != static_cast<size_t>(cfg.audio_tokens_per_chunk))
        out.push_back({"TA4 arity: " + std::to_string(c.assistant.voiced.size()) + " audio codes, expected " +
                       std::to_string(cfg.audio_tokens_per_chunk)});
    if (c.assistant.anchor == AnchorKind::vad_silence) {
        for (uint8_t v : c.assistant.voiced)
            if (v) { out.push_back({"vad_silence anchor with voiced audio code"}); break; }
    }
    if (c.index < 0) out.push_back({"negative chunk index"});
    for (const auto& t : c.action) {
        if (t.kind == TokenKind::marker && !is_known_marker(t.value))
            out.push_back({"unknown marker in action: " + t.value});
        if (t.kind == TokenKind::control_label && !is_known_label(t.value))
            out.push_back({"unknown control label: " + t.value});
        if (t.kind == TokenKind::audio_code)
            out.push_back({"audio code on action channel"});
    }
    return out;
}

}  // namespace duplex
