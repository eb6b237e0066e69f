#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace duplex {

// Wire markers. These strings appear verbatim in the textual wire format.
namespace marker {
inline constexpr std::string_view user_audio_begin      = "<|user_audio_begin|>";
inline constexpr std::string_view user_audio_end        = "<|user_audio_end|>";
inline constexpr std::string_view assistant_audio_begin = "<|assistant_audio_begin|>";
inline constexpr std::string_view assistant_audio_end   = "<|assistant_audio_end|>";
inline constexpr std::string_view action_end            = "<|action_end|>";
inline constexpr std::string_view toolcall_begin        = "<|toolcall_begin|>";
inline constexpr std::string_view toolcall_end          = "<|toolcall_end|>";
inline constexpr std::string_view vad_silence           = "<vad_silence>";
inline constexpr std::string_view tts_pad               = "<tts_pad>";
}  // namespace marker

namespace label {
inline constexpr std::string_view interrupt   = "<interrupt>";
inline constexpr std::string_view backchannel = "<backchannel>";
inline constexpr std::string_view response    = "<response>";
}  // namespace label

inline constexpr std::array<std::string_view, 9> all_markers = {
    marker::user_audio_begin, marker::user_audio_end,
    marker::assistant_audio_begin, marker::assistant_audio_end,
    marker::action_end, marker::toolcall_begin, marker::toolcall_end,
    marker::vad_silence, marker::tts_pad};

inline constexpr std::array<std::string_view, 3> all_labels = {
    label::interrupt, label::backchannel, label::response};

enum class TokenKind : uint8_t { marker, text, control_label, audio_code };

// Synthetic two-symbol audio codebook.
inline constexpr std::string_view audio_silence_code = "a0";
inline constexpr std::string_view audio_voiced_code  = "a1";

struct Token {
    TokenKind kind = TokenKind::text;
    std::string value;

    static Token text(std::string v) { return {TokenKind::text, std::move(v)}; }
    static Token mark(std::string_view v) { return {TokenKind::marker, std::string(v)}; }
    static Token control(std::string_view v) { return {TokenKind::control_label, std::string(v)}; }
    static Token audio(bool voiced) {
        return {TokenKind::audio_code, std::string(voiced ? audio_voiced_code : audio_silence_code)};
    }

    bool is_marker(std::string_view m) const { return kind == TokenKind::marker && value == m; }
    bool is_silence_code() const { return kind == TokenKind::audio_code && value == audio_silence_code; }

    friend bool operator==(const Token&, const Token&) = default;
};

inline bool is_known_marker(std::string_view s) {
    for (auto m : all_markers)
        if (s == m) return true;
    return false;
}

inline bool is_known_label(std::string_view s) {
    for (auto l : all_labels)
        if (s == l) return true;
    return false;
}

// --- UTF-8 helpers -----------------------------------------------------------

inline size_t utf8_seq_len(unsigned char lead) {
    if (lead < 0x80) return 1;
    if ((lead >> 5) == 0x6) return 2;
    if ((lead >> 4) == 0xE) return 3;
    if ((lead >> 3) == 0x1E) return 4;
    return 1;  // treat invalid lead bytes as single chars
}

inline uint32_t utf8_decode(std::string_view s, size_t pos, size_t len) {
    unsigned char c0 = static_cast<unsigned char>(s[pos]);
    if (len == 1) return c0;
    uint32_t cp = c0 & (0x7F >> len);
    for (size_t i = 1; i < len && pos + i < s.size(); ++i)
        cp = (cp << 6) | (static_cast<unsigned char>(s[pos + i]) & 0x3F);
    return cp;
}

// Wide/CJK codepoints tokenize one grapheme per token; everything else splits
// on whitespace.
inline bool is_wide_cp(uint32_t cp) {
    return (cp >= 0x2E80 && cp <= 0x303F) ||   // radicals, kana punctuation, CJK punctuation
           (cp >= 0x3040 && cp <= 0x30FF) ||   // hiragana, katakana
           (cp >= 0x3400 && cp <= 0x4DBF) ||   // CJK ext A
           (cp >= 0x4E00 && cp <= 0x9FFF) ||   // CJK unified
           (cp >= 0xF900 && cp <= 0xFAFF) ||   // CJK compat
           (cp >= 0xFF00 && cp <= 0xFF60) ||   // fullwidth forms
           (cp >= 0x20000 && cp <= 0x2FA1F);   // CJK ext B+
}

// Splits free text into counting units: one token per wide (CJK) grapheme,
// whitespace-separated words otherwise. Markers are never split (callers
// tokenize marker strings as single tokens).
inline std::vector<std::string> split_text(std::string_view text) {
    std::vector<std::string> out;
    std::string run;
    size_t i = 0;
    while (i < text.size()) {
        size_t n = utf8_seq_len(static_cast<unsigned char>(text[i]));
        if (i + n > text.size()) n = 1;
        uint32_t cp = utf8_decode(text, i, n);
        if (cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r') {
            if (!run.empty()) { out.push_back(std::move(run)); run.clear(); }
        } else if (is_wide_cp(cp)) {
            if (!run.empty()) { out.push_back(std::move(run)); run.clear(); }
            out.emplace_back(text.substr(i, n));
        } else {
            run.append(text.substr(i, n));
        }
        i += n;
    }
    if (!run.empty()) out.push_back(std::move(run));
    return out;
}

inline bool starts_wide(std::string_view s) {
    if (s.empty()) return false;
    size_t n = utf8_seq_len(static_cast<unsigned char>(s[0]));
    if (n > s.size()) return false;
    return is_wide_cp(utf8_decode(s, 0, n));
}

inline bool ends_wide(std::string_view s) {
    if (s.empty()) return false;
    // walk to last codepoint
    size_t i = 0, last = 0, lastn = 1;
    while (i < s.size()) {
        size_t n = utf8_seq_len(static_cast<unsigned char>(s[i]));
        if (i + n > s.size()) n = 1;
        last = i; lastn = n;
        i += n;
    }
    return is_wide_cp(utf8_decode(s, last, lastn));
}

// Inverse of split_text up to whitespace: a space is restored between two
// adjacent tokens only when neither side is wide.
inline std::string join_text(const std::vector<std::string>& tokens) {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0 && !ends_wide(tokens[i - 1]) && !starts_wide(tokens[i]))
            out += ' ';
        out += tokens[i];
    }
    return out;
}

inline std::string join_text_tokens(const std::vector<Token>& tokens) {
    std::vector<std::string> vals;
    vals.reserve(tokens.size());
    for (const auto& t : tokens) vals.push_back(t.value);
    return join_text(vals);
}

}  // namespace duplex
