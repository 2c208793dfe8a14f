// experiments.hpp
// The antidistinguishability conjecture scan: for each dimension d, draw sets
// of d Haar-random states, solve the exclusion SDP, and track the minimum of
// alpha = max pairwise overlap over sets that are not antidistinguishable. A
// counterexample would be a not-antidistinguishable set with alpha at or below
// (d-2)/(d-1); anything within 1e-9 of that boundary is reported separately as
// boundary-indeterminate rather than as a refutation.
//
// Trials use per-trial RNG streams keyed by (d, trial index), and aggregation
// is order-independent, so results are identical for any worker count.

#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "adkit/antidist.hpp"
#include "adkit/codes.hpp"
#include "adkit/rng.hpp"
#include "adkit/serialization.hpp"

namespace adkit {

struct ScanConfig {
    std::vector<int> dims{2, 3, 4, 5};
    int trials_per_dim = 2000;
    std::uint64_t seed = 0;
    std::string output_path;  // empty: caller renders the records itself
    SdpOptions sdp;
    int workers = 0;  // 0 = hardware concurrency
};

struct FlaggedTrial {
    int d = 0;
    long trial = 0;
    double alpha = 0.0;
    double exclusion_error = 0.0;  // certified dual lower bound on the SDP value
    std::vector<Vector> states;
};

struct ScanRecord {
    int d = 0;
    long n_trials = 0;
    long n_antidist = 0;
    long n_not_antidist = 0;
    long n_indeterminate = 0;
    std::optional<double> min_alpha_not_antidist;
    double conjecture_threshold = 0.0;  // (d-2)/(d-1)
    std::vector<FlaggedTrial> counterexamples;   // alpha <= threshold - 1e-9
    std::vector<FlaggedTrial> boundary_cases;    // |alpha - threshold| <= 1e-9
    std::vector<FlaggedTrial> indeterminates;
};

inline std::uint64_t trial_stream_id(int d, long trial) {
    return mix64((static_cast<std::uint64_t>(static_cast<unsigned>(d)) << 40) ^
                 static_cast<std::uint64_t>(trial));
}

namespace detail {

struct TrialOutcome {
    ExclusionStatus status = ExclusionStatus::indeterminate;
    double alpha = 0.0;
    double certified_error = 0.0;
};

inline double max_pairwise_overlap(const std::vector<Vector>& states) {
    double worst = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i)
        for (std::size_t j = i + 1; j < states.size(); ++j)
            worst = std::max(worst, std::abs(inner_product(states[i], states[j])));
    return worst;
}

inline std::vector<Vector> scan_trial_states(int d, long trial, std::uint64_t seed) {
    RngStream rng(seed, trial_stream_id(d, trial));
    return haar_random_set(d, d, rng).vectors;
}

// Dynamic-schedule parallel loop; each index writes only its own slot, so the
// outcome is independent of scheduling.
template <typename Fn>
void parallel_for(long count, int workers, Fn&& body) {
    if (workers <= 0) {
        workers = static_cast<int>(std::thread::hardware_concurrency());
        if (workers < 1) workers = 1;
    }
    workers = static_cast<int>(std::min<long>(workers, count));
    if (workers <= 1) {
        for (long t = 0; t < count; ++t) body(t);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        while (true) {
            const long t = next.fetch_add(1);
            if (t >= count) break;
            try {
                body(t);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                break;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(run);
    for (std::thread& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace detail

inline std::vector<ScanRecord> conjecture_scan(const ScanConfig& cfg) {
    if (cfg.trials_per_dim < 1) {
        throw std::invalid_argument("conjecture_scan: trials_per_dim must be positive");
    }
    for (int d : cfg.dims) {
        if (d < 2) throw std::invalid_argument("conjecture_scan: dimensions must be >= 2");
    }

    std::vector<ScanRecord> records;
    for (int d : cfg.dims) {
        const long trials = cfg.trials_per_dim;
        std::vector<detail::TrialOutcome> outcomes(static_cast<std::size_t>(trials));
        detail::parallel_for(trials, cfg.workers, [&](long t) {
            const std::vector<Vector> states = detail::scan_trial_states(d, t, cfg.seed);
            const ExclusionResult res = exclusion_sdp(states, cfg.sdp);
            outcomes[static_cast<std::size_t>(t)] = {res.status,
                                                     detail::max_pairwise_overlap(states),
                                                     res.dual_value};
        });

        ScanRecord rec;
        rec.d = d;
        rec.n_trials = trials;
        rec.conjecture_threshold = static_cast<double>(d - 2) / (d - 1);
        for (long t = 0; t < trials; ++t) {
            const detail::TrialOutcome& out = outcomes[static_cast<std::size_t>(t)];
            switch (out.status) {
                case ExclusionStatus::antidistinguishable:
                    ++rec.n_antidist;
                    break;
                case ExclusionStatus::indeterminate:
                    ++rec.n_indeterminate;
                    rec.indeterminates.push_back(
                        {d, t, out.alpha, 0.0, detail::scan_trial_states(d, t, cfg.seed)});
                    break;
                case ExclusionStatus::not_antidistinguishable: {
                    ++rec.n_not_antidist;
                    if (!rec.min_alpha_not_antidist || out.alpha < *rec.min_alpha_not_antidist) {
                        rec.min_alpha_not_antidist = out.alpha;
                    }
                    if (out.alpha <= rec.conjecture_threshold + 1e-9) {
                        FlaggedTrial flagged{d, t, out.alpha, out.certified_error,
                                             detail::scan_trial_states(d, t, cfg.seed)};
                        if (out.alpha <= rec.conjecture_threshold - 1e-9) {
                            rec.counterexamples.push_back(std::move(flagged));
                        } else {
                            rec.boundary_cases.push_back(std::move(flagged));
                        }
                    }
                    break;
                }
            }
        }
        records.push_back(std::move(rec));
    }
    return records;
}

inline std::string records_to_csv(std::span<const ScanRecord> records) {
    std::string out = "d,n_trials,n_antidist,n_not_antidist,n_indeterminate,min_alpha,threshold\n";
    for (const ScanRecord& r : records) {
        out += std::to_string(r.d) + ',' + std::to_string(r.n_trials) + ',' +
               std::to_string(r.n_antidist) + ',' + std::to_string(r.n_not_antidist) + ',' +
               std::to_string(r.n_indeterminate) + ',';
        if (r.min_alpha_not_antidist) out += format_double(*r.min_alpha_not_antidist);
        out += ',' + format_double(r.conjecture_threshold) + '\n';
    }
    return out;
}

// Parses the CSV table produced by records_to_csv (the flagged-trial lists
// live in the JSON sidecar, not the CSV).
inline std::vector<ScanRecord> parse_records_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) ||
        line != "d,n_trials,n_antidist,n_not_antidist,n_indeterminate,min_alpha,threshold") {
        throw std::invalid_argument("parse_records_csv: unexpected header");
    }
    std::vector<ScanRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            fields.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (fields.size() != 7) throw std::invalid_argument("parse_records_csv: bad row: " + line);
        auto to_long = [](const std::string& s) {
            long v = 0;
            const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
            if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
                throw std::invalid_argument("parse_records_csv: bad integer: " + s);
            }
            return v;
        };
        auto to_double = [](const std::string& s) {
            double v = 0.0;
            const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
            if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
                throw std::invalid_argument("parse_records_csv: bad real: " + s);
            }
            return v;
        };
        ScanRecord rec;
        rec.d = static_cast<int>(to_long(fields[0]));
        rec.n_trials = to_long(fields[1]);
        rec.n_antidist = to_long(fields[2]);
        rec.n_not_antidist = to_long(fields[3]);
        rec.n_indeterminate = to_long(fields[4]);
        if (!fields[5].empty()) rec.min_alpha_not_antidist = to_double(fields[5]);
        rec.conjecture_threshold = to_double(fields[6]);
        records.push_back(std::move(rec));
    }
    return records;
}

inline nlohmann::json flagged_to_json(const FlaggedTrial& f) {
    return nlohmann::json{{"d", f.d},
                          {"trial", f.trial},
                          {"alpha", f.alpha},
                          {"exclusion_error", f.exclusion_error},
                          {"states", states_to_json(f.states)}};
}

inline nlohmann::json records_sidecar_json(std::span<const ScanRecord> records) {
    nlohmann::json counterexamples = nlohmann::json::array();
    nlohmann::json boundary = nlohmann::json::array();
    nlohmann::json indeterminate = nlohmann::json::array();
    for (const ScanRecord& r : records) {
        for (const FlaggedTrial& f : r.counterexamples) counterexamples.push_back(flagged_to_json(f));
        for (const FlaggedTrial& f : r.boundary_cases) boundary.push_back(flagged_to_json(f));
        for (const FlaggedTrial& f : r.indeterminates) indeterminate.push_back(flagged_to_json(f));
    }
    return nlohmann::json{{"counterexamples", std::move(counterexamples)},
                          {"boundary_cases", std::move(boundary)},
                          {"indeterminates", std::move(indeterminate)}};
}

inline std::string sidecar_path_for(const std::string& csv_path) {
    const std::size_t dot = csv_path.rfind('.');
    const std::size_t slash = csv_path.find_last_of("/\\");
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
        return csv_path.substr(0, dot) + ".json";
    }
    return csv_path + ".json";
}

// CSV table at `path`, flagged state sets in a JSON sidecar next to it.
inline void emit_records(std::span<const ScanRecord> records, const std::string& path) {
    if (path.empty()) throw std::invalid_argument("emit_records: empty output path");
    write_file_atomic(path, records_to_csv(records));
    write_file_atomic(sidecar_path_for(path), records_sidecar_json(records).dump(2) + "\n");
}

} // namespace adkit
