#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "duplex/chunk.hpp"
#include "duplex/clock.hpp"

namespace duplex {

// Canonical phrases preceding each control label on the action channel. The
// paraphrase for a given action is picked by id so expansion stays a pure
// function of the object.
inline const std::vector<std::string>& control_phrases(std::string_view name) {
    static const std::vector<std::string> response = {
        "用户发言结束", "检测到表达完毕", "接收到完整内容"};
    static const std::vector<std::string> interrupt = {
        "检测到用户插话", "识别到插话意图", "检测到有效发言"};
    static const std::vector<std::string> backchannel = {
        "检测到附和语气", "识别到轻微反馈", "用户仅做确认"};
    static const std::vector<std::string> none = {};
    if (name == "response") return response;
    if (name == "interrupt") return interrupt;
    if (name == "backchannel") return backchannel;
    return none;
}

// JSON body of a tool call, fixed key order {"function", "arguments"}, a space
// after each colon and comma. Single-entry maps keyed by "" serialize as a bare
// string argument; anything else becomes an object.
inline std::string toolcall_json_body(const ActionObject& a) {
    std::string args;
    if (a.parameters.empty()) {
        args = "\"\"";
    } else if (a.parameters.size() == 1 && a.parameters.begin()->first.empty()) {
        args = nlohmann::json(a.parameters.begin()->second).dump();
    } else {
        std::string obj = "{";
        bool first = true;
        for (const auto& [k, v] : a.parameters) {
            if (!first) obj += ", ";
            first = false;
            obj += nlohmann::json(k).dump() + ": " + nlohmann::json(v).dump();
        }
        obj += "}";
        args = obj;
    }
    return "{\"function\": " + nlohmann::json(a.name).dump() + ", \"arguments\": " + args + "}";
}

// Deterministic token expansion of one action object.
//   tool:    planning ++ <|toolcall_begin|> ++ body ++ <|toolcall_end|>
//   control: planning phrase ++ label token
//   asr:     transcript tokens
inline std::vector<Token> expand_action(const ActionObject& a) {
    std::vector<Token> out;
    if (a.name == kAsrName) {
        for (auto& w : split_text(a.planning)) out.push_back(Token::text(std::move(w)));
        return out;
    }
    if (is_control_name(a.name)) {
        std::string phrase = a.planning;
        if (phrase.empty()) {
            const auto& table = control_phrases(a.name);
            if (!table.empty())
                phrase = table[static_cast<size_t>(a.id % static_cast<long>(table.size()))];
        }
        for (auto& w : split_text(phrase)) out.push_back(Token::text(std::move(w)));
        out.push_back(Token::control("<" + a.name + ">"));
        return out;
    }
    for (auto& w : split_text(a.planning)) out.push_back(Token::text(std::move(w)));
    out.push_back(Token::mark(marker::toolcall_begin));
    for (auto& w : split_text(toolcall_json_body(a))) out.push_back(Token::text(std::move(w)));
    out.push_back(Token::mark(marker::toolcall_end));
    return out;
}

struct ScheduleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Single FIFO queue on the action channel, keyed by (trigger chunk, id). Emits
// at most `budget` tokens per chunk; a later action never emits while an
// earlier one still has tokens in flight.
class ActionQueue {
public:
    explicit ActionQueue(ClockConfig cfg = {}) : cfg_(cfg) {}

    void enqueue(const ActionObject& a) {
        for (const auto& p : pending_)
            if (p.action.id == a.id)
                throw ScheduleError("duplicate action id " + std::to_string(a.id));
        if (emitted_first_chunk_.count(a.id) || (in_flight_ && in_flight_->action.id == a.id))
            throw ScheduleError("duplicate action id " + std::to_string(a.id));
        Entry e{a, chunk_index(a.offset_s, cfg_), expand_action(a)};
        // Trigger-time order, ties broken by id.
        auto it = std::upper_bound(pending_.begin(), pending_.end(), e,
                                   [](const Entry& x, const Entry& y) {
                                       return std::tie(x.action.offset_s, x.action.id) <
                                              std::tie(y.action.offset_s, y.action.id);
                                   });
        pending_.insert(it, std::move(e));
    }

    // Tokens for chunk idx; idx must be strictly increasing across calls.
    std::vector<Token> emit_for_chunk(long idx) {
        if (idx < 0 || idx <= last_idx_)
            throw ScheduleError("emit_for_chunk: non-monotone chunk index");
        last_idx_ = idx;

        std::vector<Token> out;
        int budget = cfg_.action_budget;
        while (budget > 0) {
            if (!in_flight_) {
                if (pending_.empty() || pending_.front().trigger_chunk > idx) break;
                in_flight_ = pending_.front();
                pending_.pop_front();
                emitted_first_chunk_[in_flight_->action.id] = idx;
            }
            auto& fl = *in_flight_;
            while (budget > 0 && fl.cursor < fl.tokens.size()) {
                out.push_back(fl.tokens[fl.cursor++]);
                --budget;
            }
            if (fl.cursor == fl.tokens.size()) in_flight_.reset();
            else break;
        }
        return out;
    }

    // Chunk where the action's first token was emitted; its realized trigger
    // time for scoring.
    long anchor_chunk(long action_id) const {
        auto it = emitted_first_chunk_.find(action_id);
        if (it == emitted_first_chunk_.end())
            throw ScheduleError("anchor_chunk: action " + std::to_string(action_id) + " never emitted");
        return it->second;
    }

    bool drained() const { return pending_.empty() && !in_flight_; }

    std::vector<long> undrained_ids() const {
        std::vector<long> out;
        if (in_flight_) out.push_back(in_flight_->action.id);
        for (const auto& e : pending_) out.push_back(e.action.id);
        return out;
    }

    const ClockConfig& clock() const { return cfg_; }

private:
    struct Entry {
        ActionObject action;
        long trigger_chunk = 0;
        std::vector<Token> tokens;
        size_t cursor = 0;
    };

    ClockConfig cfg_;
    std::deque<Entry> pending_;
    std::optional<Entry> in_flight_;
    std::map<long, long> emitted_first_chunk_;
    long last_idx_ = -1;
};

}  // namespace duplex
