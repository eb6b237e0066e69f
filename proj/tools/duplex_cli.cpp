// Command-line front end: compile session specs to wire traces, validate wire
// streams, generate benchmark cases, run policies, and score.

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "duplex/casegen.hpp"
#include "duplex/compiler.hpp"
#include "duplex/engine.hpp"
#include "duplex/registry.hpp"
#include "duplex/scorer.hpp"
#include "duplex/wire.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIncomplete = 2;

duplex::ClockConfig clock_from_env() {
    duplex::ClockConfig cfg;
    if (const char* ms = std::getenv("DUPLEX_CLOCK_MS")) {
        int v = std::atoi(ms);
        if (v >= 4 && v % 4 == 0) {
            cfg.chunk_ms = v;
            cfg.user_stride_ms = v / 2;
            cfg.audio_stride_ms = v / 4;
        } else {
            throw std::runtime_error(std::string("DUPLEX_CLOCK_MS must be a positive multiple of 4, got '") + ms + "'");
        }
    }
    return cfg;
}

std::vector<nlohmann::json> read_jsonl(const std::string& path, int* bad_lines = nullptr) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<nlohmann::json> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            std::cerr << path << ":" << lineno << ": bad JSON: " << e.what() << "\n";
            if (bad_lines) ++*bad_lines;
        }
    }
    return out;
}

int cmd_compile(const std::string& specs_path, const std::string& out_path) {
    auto cfg = clock_from_env();
    int failures = 0;
    auto lines = read_jsonl(specs_path, &failures);

    std::ostringstream wire;
    size_t total_chunks = 0, total_action_tokens = 0, total_assistant_text = 0;
    int lineno = 0;
    for (const auto& j : lines) {
        ++lineno;
        try {
            auto spec = j.get<duplex::SessionSpec>();
            auto trace = duplex::compile(spec, cfg);
            wire << duplex::wire_to_text(trace) << "\n";
            total_chunks += trace.chunks.size();
            for (const auto& c : trace.chunks) {
                total_action_tokens += c.action.size();
                if (c.assistant.anchor == duplex::AnchorKind::text) ++total_assistant_text;
            }
        } catch (const std::exception& e) {
            std::cerr << specs_path << ": session " << lineno << ": " << e.what() << "\n";
            ++failures;
        }
    }
    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "cannot write " << out_path << "\n";
        return kExitValidation;
    }
    out << wire.str();
    std::cout << "sessions: " << lines.size() - static_cast<size_t>(failures)
              << "  chunks: " << total_chunks
              << "  action tokens: " << total_action_tokens
              << "  assistant text anchors: " << total_assistant_text << "\n";
    return failures ? kExitValidation : kExitOk;
}

int cmd_validate(const std::string& wire_path) {
    auto cfg = clock_from_env();
    std::ifstream in(wire_path);
    if (!in) {
        std::cerr << "cannot open " << wire_path << "\n";
        return kExitValidation;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    auto tokens = duplex::wire_from_text(buf.str());
    duplex::StreamParser parser(cfg);
    size_t chunks = 0, malformed = 0;
    for (const auto& e : parser.feed_all(tokens)) {
        if (e.kind == duplex::ParseEvent::Kind::chunk_complete) ++chunks;
        if (e.kind == duplex::ParseEvent::Kind::malformed) {
            ++malformed;
            std::cerr << "malformed at token " << e.position << ": " << e.reason << "\n";
        }
    }
    if (!parser.at_clean_boundary()) {
        ++malformed;
        std::cerr << "stream ends mid-chunk\n";
    }
    std::cout << "chunks: " << chunks << "  malformed: " << malformed << "\n";
    return malformed ? kExitValidation : kExitOk;
}

int cmd_gen_cases(const std::string& kind, int n, uint64_t seed, const std::string& out_path,
                  const std::string& registry_path) {
    duplex::ToolRegistry reg;
    const duplex::ToolRegistry* regp = nullptr;
    if (!registry_path.empty()) {
        reg = duplex::load_tool_registry(registry_path);
        regp = &reg;
    }
    auto cases = duplex::generate_cases(kind, n, seed, regp);
    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "cannot write " << out_path << "\n";
        return kExitValidation;
    }
    for (const auto& c : cases) out << nlohmann::json(c).dump() << "\n";
    std::cout << "wrote " << cases.size() << " cases to " << out_path << "\n";
    return kExitOk;
}

int cmd_schedule_dump(const std::string& specs_path) {
    auto cfg = clock_from_env();
    auto lines = read_jsonl(specs_path);
    int session = 0;
    for (const auto& j : lines) {
        ++session;
        auto spec = j.get<duplex::SessionSpec>();
        duplex::ActionQueue queue(cfg);
        long next_id = 0;
        for (const auto& a : spec.actions) {
            queue.enqueue(a);
            next_id = std::max(next_id, a.id + 1);
        }
        std::cout << "# session " << session << "\n";
        const long n = duplex::chunk_count(spec.duration_s, cfg);
        for (long c = 0; c < n; ++c) {
            auto toks = queue.emit_for_chunk(c);
            if (toks.empty()) continue;
            std::cout << "chunk " << c << ":";
            for (const auto& t : toks) std::cout << " " << t.value;
            std::cout << "\n";
        }
        if (!queue.drained()) std::cout << "undrained actions remain\n";
    }
    return kExitOk;
}

struct ScoredCase {
    std::string group;
    duplex::CaseScore score;
    bool errored = false;
};

int cmd_score(const std::string& cases_path, const std::string& policy_name, bool prefill,
              const std::string& mode_name, int jobs, const std::string& json_out) {
    auto cfg = clock_from_env();
    auto mode = mode_name == "relaxed" ? duplex::ScoreMode::relaxed : duplex::ScoreMode::labeled;

    std::vector<duplex::BenchCase> cases;
    for (const auto& j : read_jsonl(cases_path)) {
        auto c = j.get<duplex::BenchCase>();
        // No-prefill protocol covers only the scenarios every system supports.
        if (!prefill && !c.scenario.empty() && c.scenario != "normal" && c.scenario != "pause")
            continue;
        cases.push_back(std::move(c));
    }

    std::vector<ScoredCase> results(cases.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i = next.fetch_add(1); i < cases.size(); i = next.fetch_add(1)) {
            const auto& c = cases[i];
            ScoredCase r;
            r.group = c.scenario.empty() ? c.pattern : c.scenario;
            try {
                std::unique_ptr<duplex::Policy> policy;
                if (policy_name == "trace_replay") {
                    auto trace = duplex::compile(duplex::oracle_spec(c, cfg), cfg);
                    policy = std::make_unique<duplex::TraceReplayPolicy>(std::move(trace));
                } else {
                    policy = duplex::make_builtin_policy(policy_name);
                }
                auto log = duplex::run_session(*policy, c, prefill, cfg);
                if (!c.scenario.empty()) {
                    r.score = duplex::score_turn_taking(log, c, mode);
                } else {
                    auto pred = duplex::extract_tool_calls(log);
                    auto m = duplex::match_tool_calls(pred, c.gt_actions, duplex::ToolMatchConfig{},
                                                      c.audio_end_s);
                    r.score.hit = m.case_hit;
                    if (m.case_hit && !m.delays.empty()) {
                        double sum = 0;
                        for (double d : m.delays) sum += d;
                        r.score.delay_s = sum / static_cast<double>(m.delays.size());
                    }
                }
            } catch (const std::exception& e) {
                std::cerr << "case " << c.id << ": " << e.what() << " (scored as miss)\n";
                r.errored = true;
            }
            results[i] = std::move(r);
        }
    };
    jobs = std::max(1, jobs);
    std::vector<std::thread> pool;
    for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::map<std::string, std::vector<duplex::CaseScore>> by_group;
    size_t errored = 0;
    for (const auto& r : results) {
        by_group[r.group].push_back(r.score);
        if (r.errored) ++errored;
    }
    std::vector<duplex::GroupReport> rows;
    for (const auto& [group, scores] : by_group) rows.push_back(duplex::aggregate(group, scores));
    std::cout << duplex::format_report(rows);

    if (!json_out.empty()) {
        std::ofstream out(json_out);
        out << nlohmann::json(rows).dump(2) << "\n";
    }
    return errored ? kExitIncomplete : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Duplex chunk-protocol toolkit"};
    app.require_subcommand(1);

    auto* compile = app.add_subcommand("compile", "Compile session specs (JSONL) to a wire trace file");
    std::string specs_path, out_path = "traces.wire";
    compile->add_option("specs", specs_path, "session specs, one JSON object per line")->required();
    compile->add_option("-o,--out", out_path, "output wire file");

    auto* validate = app.add_subcommand("validate", "Parse a wire file and report malformed frames");
    std::string wire_path;
    validate->add_option("wire", wire_path, "textual wire file")->required();

    auto* gen = app.add_subcommand("gen-cases", "Generate synthetic benchmark cases");
    std::string kind = "normal", cases_out = "cases.jsonl", registry_path;
    int n = 300;
    uint64_t seed = 0;
    gen->add_option("-s,--scenario", kind, "scenario or tool-call pattern");
    gen->add_option("-n", n, "number of cases");
    gen->add_option("--seed", seed, "RNG seed");
    gen->add_option("-o,--out", cases_out, "output JSONL file");
    gen->add_option("--registry", registry_path, "tool registry JSON (validates template names)");

    auto* dump = app.add_subcommand("schedule-dump", "Print per-chunk action-channel emissions");
    std::string dump_specs;
    dump->add_option("specs", dump_specs, "session specs JSONL")->required();

    auto* score = app.add_subcommand("score", "Run a policy over cases and score");
    std::string cases_path, policy = "trace_replay", prefill_s = "on", mode = "labeled", json_out;
    int jobs = 1;
    score->add_option("--cases", cases_path, "bench cases JSONL")->required();
    score->add_option("--policy", policy, "trace_replay | always_silent | never_yield | eager_speaker");
    score->add_option("--prefill", prefill_s, "on | off")->check(CLI::IsMember({"on", "off"}));
    score->add_option("--mode", mode, "labeled | relaxed")->check(CLI::IsMember({"labeled", "relaxed"}));
    score->add_option("--jobs", jobs, "worker threads");
    score->add_option("--json", json_out, "also write the report as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*compile) return cmd_compile(specs_path, out_path);
        if (*validate) return cmd_validate(wire_path);
        if (*gen) return cmd_gen_cases(kind, n, seed, cases_out, registry_path);
        if (*dump) return cmd_schedule_dump(dump_specs);
        if (*score) return cmd_score(cases_path, policy, prefill_s == "on", mode, jobs, json_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}
