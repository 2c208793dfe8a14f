// adkit.cpp
// Command-line front end: code generators and analysis, antidistinguishability
// checks, protocol runs, bound calculators, and the conjecture scan.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error,
//             3 indeterminate verdict, 4 conjecture counterexample.

#include <array>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "adkit/antidist.hpp"
#include "adkit/codes.hpp"
#include "adkit/experiments.hpp"
#include "adkit/protocols.hpp"
#include "adkit/rng.hpp"
#include "adkit/serialization.hpp"

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Context {
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "json";
    adkit::SdpOptions sdp;
    int workers = 0;
    int exit_code = 0;
};

void emit(const Context& ctx, const std::string& content) {
    if (ctx.out.empty()) {
        std::fwrite(content.data(), 1, content.size(), stdout);
    } else {
        adkit::write_file_atomic(ctx.out, content);
    }
}

void emit_json(const Context& ctx, const json& j) { emit(ctx, j.dump(2) + "\n"); }

std::vector<int> parse_index_list(const std::string& text) {
    std::vector<int> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string field = text.substr(start, comma - start);
        int v = 0;
        const auto r = std::from_chars(field.data(), field.data() + field.size(), v);
        if (r.ec != std::errc{} || r.ptr != field.data() + field.size() || v < 1) {
            throw UsageError("expected a comma-separated list of positive indices, got '" + text +
                             "'");
        }
        out.push_back(v);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw UsageError("empty index list");
    return out;
}

std::array<int, 3> parse_triple(const std::string& text) {
    const std::vector<int> ids = parse_index_list(text);
    if (ids.size() != 3) throw UsageError("--triple needs exactly three indices");
    return {ids[0], ids[1], ids[2]};
}

void output_code(const Context& ctx, const adkit::SphericalCode& code) {
    emit(ctx, adkit::code_to_json(code).dump(2) + "\n");
}

json report_to_json(const adkit::CodeReport& r) {
    return json{{"size", r.size},
                {"coherence", r.coherence},
                {"coherence_squared", r.coherence_squared},
                {"welch_rhs", r.welch_rhs},
                {"welch_satisfied", r.welch_satisfied},
                {"argmax_pair", {r.argmax_pair.first, r.argmax_pair.second}}};
}

std::string report_to_csv(const adkit::CodeReport& r) {
    return "size,coherence,coherence_squared,welch_rhs,welch_satisfied,argmax_i,argmax_j\n" +
           std::to_string(r.size) + ',' + adkit::format_double(r.coherence) + ',' +
           adkit::format_double(r.coherence_squared) + ',' + adkit::format_double(r.welch_rhs) +
           ',' + (r.welch_satisfied ? "true" : "false") + ',' +
           std::to_string(r.argmax_pair.first) + ',' + std::to_string(r.argmax_pair.second) + '\n';
}

// Positional that is either an integer size or a path to a code file.
int resolve_size(const std::string& arg) {
    int size = 0;
    const auto r = std::from_chars(arg.data(), arg.data() + arg.size(), size);
    if (r.ec == std::errc{} && r.ptr == arg.data() + arg.size()) {
        if (size < 3) throw std::invalid_argument("|S| must be at least 3");
        return size;
    }
    return adkit::load_code(arg).size();
}

json transcripts_summary(long trials, long errors, int bits) {
    return json{{"trials", trials},
                {"errors", errors},
                {"error_rate", trials > 0 ? static_cast<double>(errors) / trials : 0.0},
                {"bits", bits}};
}

void run_antidist_check(Context& ctx, const std::string& path, const std::string& indices_arg,
                        bool all_triples, bool certificates) {
    const adkit::SphericalCode code = adkit::load_code(path);
    if (all_triples == !indices_arg.empty()) {
        throw UsageError("pass exactly one of --indices or --all-triples");
    }
    if (all_triples) {
        std::string lines;
        long total = 0, anti = 0, not_anti = 0, indet = 0;
        for (int i = 1; i <= code.size(); ++i) {
            for (int j = i + 1; j <= code.size(); ++j) {
                for (int k = j + 1; k <= code.size(); ++k) {
                    const std::array<adkit::Vector, 3> states{code.state(i), code.state(j),
                                                              code.state(k)};
                    const adkit::ExclusionResult res = adkit::exclusion_sdp(states, ctx.sdp);
                    ++total;
                    switch (res.status) {
                        case adkit::ExclusionStatus::antidistinguishable: ++anti; break;
                        case adkit::ExclusionStatus::not_antidistinguishable: ++not_anti; break;
                        case adkit::ExclusionStatus::indeterminate: ++indet; break;
                    }
                    json line{{"indices", {i, j, k}},
                              {"status", adkit::to_string(res.status)},
                              {"primal_value", res.primal_value},
                              {"dual_value", res.dual_value}};
                    lines += line.dump() + "\n";
                }
            }
        }
        lines += json{{"triples", total},
                      {"antidistinguishable", anti},
                      {"not_antidistinguishable", not_anti},
                      {"indeterminate", indet}}
                     .dump() +
                 "\n";
        emit(ctx, lines);
        if (indet > 0) ctx.exit_code = 3;
        return;
    }

    const std::vector<int> indices = parse_index_list(indices_arg);
    if (indices.size() < 2) throw UsageError("--indices needs at least two indices");
    std::vector<adkit::Vector> states;
    for (int i : indices) states.push_back(code.state(i));
    const adkit::ExclusionResult res = adkit::exclusion_sdp(states, ctx.sdp);
    json j = adkit::exclusion_result_to_json(res, certificates);
    j["indices"] = indices;
    emit_json(ctx, j);
    if (res.status == adkit::ExclusionStatus::indeterminate) ctx.exit_code = 3;
}

void run_protocol_quantum(Context& ctx, const std::string& path, std::optional<int> alice,
                          const std::string& triple_arg, long trials, bool exhaustive) {
    const adkit::SphericalCode code = adkit::load_code(path);
    if (exhaustive) {
        const adkit::QuantumSweepSummary s = adkit::quantum_exhaustive_sweep(code, ctx.sdp);
        emit_json(ctx, json{{"instances", s.instances},
                            {"violating_instances", s.violating_instances},
                            {"max_self_probability", s.max_self_probability},
                            {"qubits", s.qubits}});
        return;
    }
    if (!alice || triple_arg.empty()) {
        throw UsageError("protocol quantum needs --i and --triple (or --exhaustive)");
    }
    const adkit::RelationInstance inst =
        adkit::RelationInstance::make(code.size(), *alice, parse_triple(triple_arg));
    const std::array<adkit::Vector, 3> states{code.state(inst.bob_triple[0]),
                                              code.state(inst.bob_triple[1]),
                                              code.state(inst.bob_triple[2])};
    const adkit::Povm povm = adkit::antidistinguishing_povm(states, ctx.sdp);

    json exact = json::object();
    for (const auto& [z, p] : adkit::quantum_one_way_exact(code, inst, povm)) {
        exact[std::to_string(z)] = p;
    }
    adkit::RngStream rng(ctx.seed, 0);
    json transcripts = json::array();
    long errors = 0;
    int bits = 0;
    for (long t = 0; t < trials; ++t) {
        const adkit::Transcript tr = adkit::quantum_one_way_sample(code, inst, rng, povm);
        if (!tr.relation_satisfied) ++errors;
        bits = tr.total_bits;
        if (t < 16) transcripts.push_back(adkit::transcript_to_json(tr));
    }
    emit_json(ctx, json{{"exact", std::move(exact)},
                        {"transcripts", std::move(transcripts)},
                        {"summary", transcripts_summary(trials, errors, bits)}});
}

void run_protocol_two_way(Context& ctx, const std::string& size_arg, std::optional<int> alice,
                          const std::string& triple_arg, bool exhaustive) {
    const int size = resolve_size(size_arg);
    if (exhaustive) {
        const adkit::TwoWaySweepSummary s = adkit::two_way_exhaustive_sweep(size);
        emit_json(ctx, json{{"instances", s.instances},
                            {"errors", s.errors},
                            {"total_bits", s.total_bits}});
        return;
    }
    if (!alice || triple_arg.empty()) {
        throw UsageError("protocol two-way needs --i and --triple (or --exhaustive)");
    }
    const adkit::RelationInstance inst =
        adkit::RelationInstance::make(size, *alice, parse_triple(triple_arg));
    emit_json(ctx, adkit::transcript_to_json(adkit::two_way_protocol(inst)));
}

void run_protocol_bounded(Context& ctx, const std::string& size_arg, int blocks,
                          std::optional<int> alice, const std::string& triple_arg, long trials,
                          bool exhaustive) {
    const int size = resolve_size(size_arg);
    if (trials < 1) throw UsageError("--trials must be positive");
    if (exhaustive) {
        if (size > 20) {
            throw std::invalid_argument(
                "exhaustive bounded-error sweep is limited to |S| <= 20; pass --i/--triple");
        }
        double worst_rate = -1.0;
        json worst;
        long pair_index = 0;
        for (int j = 1; j <= size; ++j)
            for (int k = j + 1; k <= size; ++k)
                for (int m = k + 1; m <= size; ++m)
                    for (int i = 1; i <= size; ++i) {
                        const adkit::RelationInstance inst =
                            adkit::RelationInstance::make(size, i, {j, k, m});
                        adkit::RngStream rng(ctx.seed,
                                             adkit::mix64(0x626f756e64ULL + pair_index++));
                        long errors = 0;
                        for (long t = 0; t < trials; ++t) {
                            if (!adkit::bounded_error_one_way(inst, blocks, rng)
                                     .relation_satisfied) {
                                ++errors;
                            }
                        }
                        const double rate = static_cast<double>(errors) / trials;
                        if (rate > worst_rate) {
                            worst_rate = rate;
                            worst = json{{"i", i}, {"triple", {j, k, m}}, {"error_rate", rate}};
                        }
                    }
        emit_json(ctx, json{{"K", blocks},
                            {"trials_per_pair", trials},
                            {"worst_case", std::move(worst)},
                            {"bits", adkit::ceil_log2(blocks)}});
        return;
    }
    if (!alice || triple_arg.empty()) {
        throw UsageError("protocol bounded needs --i and --triple (or --exhaustive)");
    }
    const adkit::RelationInstance inst =
        adkit::RelationInstance::make(size, *alice, parse_triple(triple_arg));
    adkit::RngStream rng(ctx.seed, 0);
    json transcripts = json::array();
    long errors = 0;
    int bits = 0;
    for (long t = 0; t < trials; ++t) {
        const adkit::Transcript tr = adkit::bounded_error_one_way(inst, blocks, rng);
        if (!tr.relation_satisfied) ++errors;
        bits = tr.total_bits;
        if (t < 16) transcripts.push_back(adkit::transcript_to_json(tr));
    }
    emit_json(ctx, json{{"transcripts", std::move(transcripts)},
                        {"summary", transcripts_summary(trials, errors, bits)}});
}

void run_bounds(Context& ctx, std::optional<int> dim, std::optional<long> size) {
    if (!dim && !size) throw UsageError("bounds needs --dim and/or --size");
    json j = json::object();
    if (size) j["one_way_lower_bound_bits"] = adkit::one_way_lower_bound_bits(*size);
    if (dim) {
        j["cap_bound_size"] = adkit::cap_bound_size(*dim);
        j["cap_lower_bound_bits"] = adkit::cap_lower_bound_bits(*dim);
        j["qubits"] = adkit::ceil_log2(*dim);
        if (size && *size > 1) {
            j["welch_rhs"] = static_cast<double>(*size - *dim) /
                             (static_cast<double>(*dim) * static_cast<double>(*size - 1));
        }
    }
    if (ctx.format == "csv") {
        std::string header, row;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!header.empty()) {
                header += ',';
                row += ',';
            }
            header += it.key();
            row += it.value().is_number_float() ? adkit::format_double(it.value().get<double>())
                                                : it.value().dump();
        }
        emit(ctx, header + '\n' + row + '\n');
    } else {
        emit_json(ctx, j);
    }
}

void run_scan(Context& ctx, const std::vector<int>& dims, int trials) {
    adkit::ScanConfig cfg;
    cfg.dims = dims;
    cfg.trials_per_dim = trials;
    cfg.seed = ctx.seed;
    cfg.sdp = ctx.sdp;
    cfg.workers = ctx.workers;
    cfg.output_path = ctx.out;

    const std::vector<adkit::ScanRecord> records = adkit::conjecture_scan(cfg);
    if (ctx.out.empty()) {
        emit(ctx, adkit::records_to_csv(records));
        const json sidecar = adkit::records_sidecar_json(records);
        if (!sidecar["counterexamples"].empty() || !sidecar["boundary_cases"].empty() ||
            !sidecar["indeterminates"].empty()) {
            std::cerr << sidecar.dump(2) << '\n';
        }
    } else {
        adkit::emit_records(records, ctx.out);
    }
    for (const adkit::ScanRecord& r : records) {
        if (!r.counterexamples.empty()) {
            std::cerr << "conjecture counterexample found at d=" << r.d << '\n';
            ctx.exit_code = 4;
        }
    }
}

} // namespace

int main(int argc, char** argv) {
    Context ctx;
    CLI::App app{"antidistinguishability, spherical codes, and the relation-task protocols"};
    app.require_subcommand(1);
    app.add_option("--seed", ctx.seed, "RNG seed (64-bit)")
        ->envname("ANTIDIST_SEED")
        ->capture_default_str();
    app.add_option("--out", ctx.out, "output path (default: stdout; written atomically)");
    app.add_option("--format", ctx.format, "output format for flat reports")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    app.add_option("--sdp-tol", ctx.sdp.stop_tol, "SDP stopping tolerance")
        ->capture_default_str();
    app.add_option("--verdict-tol", ctx.sdp.verdict_tol, "classification band for verdicts")
        ->capture_default_str();
    app.add_option("--max-iterations", ctx.sdp.max_iterations, "SDP iteration cap")
        ->capture_default_str();

    // codes
    auto* codes = app.add_subcommand("codes", "construct and analyze spherical codes");
    codes->require_subcommand(1);
    codes->add_subcommand("sic3", "the 9-vector equiangular code in d=3")->callback([&] {
        output_code(ctx, adkit::sic3());
    });
    {
        auto* cmd = codes->add_subcommand("mub", "union of d+1 mutually unbiased bases (prime d)");
        auto d = std::make_shared<int>(0);
        cmd->add_option("d", *d, "prime dimension")->required();
        cmd->callback([&ctx, d] { output_code(ctx, adkit::mub_union(*d)); });
    }
    {
        auto* cmd = codes->add_subcommand("missing-basis", "d states each avoiding one basis axis");
        auto d = std::make_shared<int>(0);
        cmd->add_option("d", *d, "dimension (>= 2)")->required();
        cmd->callback([&ctx, d] { output_code(ctx, adkit::missing_basis_family(*d)); });
    }
    {
        auto* cmd = codes->add_subcommand("rademacher", "greedy random sign-vector code");
        auto d = std::make_shared<int>(0);
        auto n = std::make_shared<int>(0);
        auto delta = std::make_shared<double>(0.0);
        auto attempts = std::make_shared<long>(0);
        cmd->add_option("d", *d, "dimension")->required();
        cmd->add_option("n", *n, "target size")->required();
        cmd->add_option("delta", *delta, "coherence bound in (0, 1)")->required();
        cmd->add_option("--max-attempts", *attempts, "sampling budget (default 1000 * n)");
        cmd->callback([&ctx, d, n, delta, attempts] {
            adkit::RngStream rng(ctx.seed, 0);
            output_code(ctx, adkit::random_rademacher_code(*d, *n, *delta, rng, *attempts));
        });
    }
    {
        auto* cmd = codes->add_subcommand("haar", "independent Haar-random states");
        auto d = std::make_shared<int>(0);
        auto n = std::make_shared<int>(0);
        cmd->add_option("d", *d, "dimension")->required();
        cmd->add_option("n", *n, "number of states")->required();
        cmd->callback([&ctx, d, n] {
            adkit::RngStream rng(ctx.seed, 0);
            output_code(ctx, adkit::haar_random_set(*d, *n, rng));
        });
    }
    {
        auto* cmd = codes->add_subcommand("analyze", "coherence and Welch-bound report");
        auto path = std::make_shared<std::string>();
        cmd->add_option("file", *path, "code JSON file")->required();
        cmd->callback([&ctx, path] {
            const adkit::CodeReport r = adkit::analyze(adkit::load_code(*path));
            if (ctx.format == "csv") {
                emit(ctx, report_to_csv(r));
            } else {
                emit_json(ctx, report_to_json(r));
            }
        });
    }

    // antidist
    auto* anti = app.add_subcommand("antidist", "state-exclusion verdicts with certificates");
    anti->require_subcommand(1);
    {
        auto* cmd = anti->add_subcommand("check", "decide antidistinguishability of states");
        auto path = std::make_shared<std::string>();
        auto indices = std::make_shared<std::string>();
        auto all = std::make_shared<bool>(false);
        auto certs = std::make_shared<bool>(false);
        cmd->add_option("file", *path, "code JSON file")->required();
        cmd->add_option("--indices", *indices, "comma-separated 1-based state indices");
        cmd->add_flag("--all-triples", *all, "stream one verdict per triple");
        cmd->add_flag("--certificates", *certs, "embed the POVM and dual certificate");
        cmd->callback([&ctx, path, indices, all, certs] {
            run_antidist_check(ctx, *path, *indices, *all, *certs);
        });
    }

    // protocol
    auto* proto = app.add_subcommand("protocol", "run the relation-task protocols");
    proto->require_subcommand(1);
    {
        auto* cmd = proto->add_subcommand("quantum", "one-way quantum protocol (zero error)");
        auto path = std::make_shared<std::string>();
        auto alice = std::make_shared<int>(0);
        auto triple = std::make_shared<std::string>();
        auto trials = std::make_shared<long>(1);
        auto exhaustive = std::make_shared<bool>(false);
        cmd->add_option("code", *path, "code JSON file")->required();
        auto* alice_opt = cmd->add_option("--i", *alice, "Alice's index");
        cmd->add_option("--triple", *triple, "Bob's indices j,k,m");
        cmd->add_option("--trials", *trials, "sampled runs")->capture_default_str();
        cmd->add_flag("--exhaustive", *exhaustive, "sweep every input pair");
        cmd->callback([&ctx, path, alice, triple, trials, exhaustive, alice_opt] {
            run_protocol_quantum(ctx, *path,
                                 alice_opt->count() ? std::optional<int>(*alice) : std::nullopt,
                                 *triple, *trials, *exhaustive);
        });
    }
    {
        auto* cmd = proto->add_subcommand("two-way", "two-round classical protocol (zero error)");
        auto size_arg = std::make_shared<std::string>();
        auto alice = std::make_shared<int>(0);
        auto triple = std::make_shared<std::string>();
        auto exhaustive = std::make_shared<bool>(false);
        cmd->add_option("size", *size_arg, "|S| (power of two) or a code JSON file")->required();
        auto* alice_opt = cmd->add_option("--i", *alice, "Alice's index");
        cmd->add_option("--triple", *triple, "Bob's indices j,k,m");
        cmd->add_flag("--exhaustive", *exhaustive, "sweep every input pair");
        cmd->callback([&ctx, size_arg, alice, triple, exhaustive, alice_opt] {
            run_protocol_two_way(ctx, *size_arg,
                                 alice_opt->count() ? std::optional<int>(*alice) : std::nullopt,
                                 *triple, *exhaustive);
        });
    }
    {
        auto* cmd = proto->add_subcommand("bounded", "one-way classical protocol, bounded error");
        auto size_arg = std::make_shared<std::string>();
        auto blocks = std::make_shared<int>(0);
        auto alice = std::make_shared<int>(0);
        auto triple = std::make_shared<std::string>();
        auto trials = std::make_shared<long>(1000);
        auto exhaustive = std::make_shared<bool>(false);
        cmd->add_option("size", *size_arg, "|S| or a code JSON file")->required();
        cmd->add_option("--K", *blocks, "number of partition blocks")->required();
        auto* alice_opt = cmd->add_option("--i", *alice, "Alice's index");
        cmd->add_option("--triple", *triple, "Bob's indices j,k,m");
        cmd->add_option("--trials", *trials, "shared-randomness draws")->capture_default_str();
        cmd->add_flag("--exhaustive", *exhaustive, "sweep every input pair (small |S| only)");
        cmd->callback([&ctx, size_arg, blocks, alice, triple, trials, exhaustive, alice_opt] {
            run_protocol_bounded(ctx, *size_arg, *blocks,
                                 alice_opt->count() ? std::optional<int>(*alice) : std::nullopt,
                                 *triple, *trials, *exhaustive);
        });
    }

    // bounds
    {
        auto* cmd = app.add_subcommand("bounds", "communication bounds for a size or dimension");
        auto dim = std::make_shared<int>(0);
        auto size = std::make_shared<long>(0);
        auto* dim_opt = cmd->add_option("--dim", *dim, "Hilbert-space dimension d");
        auto* size_opt = cmd->add_option("--size", *size, "code size |S|");
        cmd->callback([&ctx, dim, size, dim_opt, size_opt] {
            run_bounds(ctx, dim_opt->count() ? std::optional<int>(*dim) : std::nullopt,
                       size_opt->count() ? std::optional<long>(*size) : std::nullopt);
        });
    }

    // scan
    {
        auto* cmd = app.add_subcommand("scan", "Haar-random antidistinguishability scan");
        auto dims = std::make_shared<std::vector<int>>(std::vector<int>{2, 3, 4, 5});
        auto trials = std::make_shared<int>(2000);
        cmd->add_option("--dims", *dims, "dimensions to scan")
            ->delimiter(',')
            ->capture_default_str();
        cmd->add_option("--trials", *trials, "trials per dimension")->capture_default_str();
        cmd->add_option("--workers", ctx.workers, "worker threads (0 = auto)")
            ->capture_default_str();
        cmd->callback([&ctx, dims, trials] { run_scan(ctx, *dims, *trials); });
    }

    // global flags (--seed, --out, ...) are accepted anywhere on the line
    const std::function<void(CLI::App*)> enable_fallthrough = [&](CLI::App* node) {
        node->fallthrough();
        for (CLI::App* sub : node->get_subcommands([](CLI::App*) { return true; })) {
            enable_fallthrough(sub);
        }
    };
    enable_fallthrough(&app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return ctx.exit_code;
}
