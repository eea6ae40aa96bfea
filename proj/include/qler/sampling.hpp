// Copyright 2026 The qler Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "qler/decoder.hpp"
#include "qler/error.hpp"
#include "qler/parallel.hpp"
#include "qler/propagation.hpp"
#include "qler/rng.hpp"

namespace qler {

struct SamplerConfig {
    std::uint64_t seed = 0;
    int threads = 1;
    std::uint32_t batch = 1000;  // stopping rules are evaluated on batch boundaries
};

/// Monte Carlo tally for one fixed-weight subspace.
struct SubspaceStats {
    std::uint32_t weight = 0;
    std::uint64_t shots = 0;
    std::uint64_t errors = 0;

    double p_hat() const {
        return shots == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(shots);
    }

    void merge(const SubspaceStats& other) {
        require(other.weight == weight, ErrorKind::Internal, "merging stats of different weights");
        shots += other.shots;
        errors += other.errors;
    }
};

enum class StopReason : std::uint8_t { TargetReached, ShotBudgetExhausted, TimeBudgetExhausted };

inline const char* stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::TargetReached: return "target_reached";
        case StopReason::ShotBudgetExhausted: return "shot_budget_exhausted";
        case StopReason::TimeBudgetExhausted: return "time_budget_exhausted";
    }
    return "?";
}

namespace detail {

/// Draws `weight` distinct locations from [0, C) plus one Pauli each, using a
/// sparse partial Fisher-Yates shuffle (O(weight) memory, exact uniformity
/// over location subsets). Consumes, per pick, one bounded draw for the
/// location and one for the Pauli.
inline void draw_fault_set(ShotRng& rng, std::uint32_t num_locations, std::uint32_t weight,
                           std::vector<Fault>& out) {
    out.clear();
    std::unordered_map<std::uint32_t, std::uint32_t> displaced;
    displaced.reserve(weight * 2);
    auto value_at = [&displaced](std::uint32_t i) {
        auto it = displaced.find(i);
        return it == displaced.end() ? i : it->second;
    };
    for (std::uint32_t k = 0; k < weight; ++k) {
        std::uint32_t j = k + static_cast<std::uint32_t>(rng.next_below(num_locations - k));
        std::uint32_t picked = value_at(j);
        displaced[j] = value_at(k);
        Pauli pauli = static_cast<Pauli>(rng.next_below(3));
        out.push_back(Fault{picked, pauli});
    }
}

/// Shared per-thread shot kernel: draw, evaluate, decode, compare.
class ShotKernel {
  public:
    ShotKernel(const PropagationTable& table, const Decoder& decoder)
        : table_(table),
          decoder_(decoder),
          det_(table.det_words(), 0),
          obs_(table.obs_words(), 0),
          pred_(table.obs_words(), 0) {}

    bool run_subspace_shot(std::uint64_t seed, std::uint32_t weight, std::uint64_t shot) {
        ShotRng rng(seed, RngDomain::Subspace, weight, shot);
        draw_fault_set(rng, table_.num_locations, weight, faults_);
        return evaluate_and_decode();
    }

    /// Baseline i.i.d. shot: every location independently faults with
    /// probability p; faulting locations are found by geometric skipping, so
    /// the cost per shot is O(faults + decode), not O(C). Returns whether the
    /// shot was a logical error and reports the realized weight.
    bool run_baseline_shot(std::uint64_t seed, double p, std::uint64_t shot,
                           std::uint32_t& realized_weight) {
        ShotRng rng(seed, RngDomain::Baseline, 0, shot);
        faults_.clear();
        if (p > 0) {
            const double log_keep = std::log1p(-p);
            double position = -1;
            while (true) {
                double u = 1.0 - rng.next_double();  // in (0, 1]
                double skip = std::floor(std::log(u) / log_keep);
                position += 1.0 + skip;
                if (!(position < static_cast<double>(table_.num_locations))) {
                    break;
                }
                Pauli pauli = static_cast<Pauli>(rng.next_below(3));
                faults_.push_back(Fault{static_cast<std::uint32_t>(position), pauli});
            }
        }
        realized_weight = static_cast<std::uint32_t>(faults_.size());
        return evaluate_and_decode();
    }

    bool run_explicit(const std::vector<Fault>& faults) {
        faults_ = faults;
        return evaluate_and_decode();
    }

  private:
    bool evaluate_and_decode() {
        table_.evaluate_into(faults_, det_.data(), obs_.data());
        decoder_.predict_into(det_.data(), pred_.data());
        for (std::size_t w = 0; w < obs_.size(); ++w) {
            if (obs_[w] != pred_[w]) {
                return true;
            }
        }
        return false;
    }

    const PropagationTable& table_;
    const Decoder& decoder_;
    std::vector<Fault> faults_;
    std::vector<std::uint64_t> det_, obs_, pred_;
};

}  // namespace detail

/// Samples `shots` uniform weight-w fault sets and counts logical errors.
/// Shot indices run [first_shot, first_shot + shots); results depend only on
/// (seed, weight, shot index), so thread count never changes the tally and
/// later calls can extend the same stream by passing the next first_shot.
inline SubspaceStats sample_weight_w(const PropagationTable& table, const Decoder& decoder,
                                     std::uint32_t weight, std::uint64_t shots,
                                     const SamplerConfig& cfg, std::uint64_t first_shot = 0) {
    require(weight <= table.num_locations, ErrorKind::WeightOutOfRange,
            "weight " + std::to_string(weight) + " exceeds the " +
                std::to_string(table.num_locations) + " available fault locations");
    std::atomic<std::uint64_t> errors{0};
    parallel_for_range(first_shot, first_shot + shots, cfg.threads,
                       [&](std::uint64_t begin, std::uint64_t end, int) {
                           detail::ShotKernel kernel(table, decoder);
                           std::uint64_t local = 0;
                           for (std::uint64_t shot = begin; shot < end; ++shot) {
                               local += kernel.run_subspace_shot(cfg.seed, weight, shot);
                           }
                           errors.fetch_add(local, std::memory_order_relaxed);
                       });
    return SubspaceStats{weight, shots, errors.load()};
}

struct UntilErrorsResult {
    SubspaceStats stats;
    StopReason stop_reason = StopReason::TargetReached;
};

/// Keeps sampling weight-w batches until strictly more than `target_errors`
/// logical errors have been seen, or `max_shots` is reached. Work is done in
/// fixed batches of cfg.batch shots with the stop rule checked on batch
/// boundaries, so the outcome is reproducible for any thread count.
inline UntilErrorsResult sample_until_errors(const PropagationTable& table, const Decoder& decoder,
                                             std::uint32_t weight, std::uint64_t target_errors,
                                             std::uint64_t max_shots, const SamplerConfig& cfg,
                                             std::uint64_t first_shot = 0) {
    UntilErrorsResult result;
    result.stats.weight = weight;
    std::uint64_t next_shot = first_shot;
    const std::uint64_t batch = cfg.batch > 0 ? cfg.batch : 1000;
    while (result.stats.shots < max_shots) {
        std::uint64_t take = std::min<std::uint64_t>(batch, max_shots - result.stats.shots);
        SubspaceStats got = sample_weight_w(table, decoder, weight, take, cfg, next_shot);
        next_shot += take;
        result.stats.shots += got.shots;
        result.stats.errors += got.errors;
        if (result.stats.errors > target_errors) {
            result.stop_reason = StopReason::TargetReached;
            return result;
        }
    }
    result.stop_reason = StopReason::ShotBudgetExhausted;
    return result;
}

/// Exact weight-w tally by brute-force enumeration of every location subset
/// and every Pauli assignment from `paulis`. Only feasible for tiny circuits;
/// used as a ground-truth oracle and for exhaustive tables.
inline SubspaceStats exhaustive_weight_w(const PropagationTable& table, const Decoder& decoder,
                                         std::uint32_t weight,
                                         const std::vector<Pauli>& paulis = {Pauli::X, Pauli::Y,
                                                                             Pauli::Z}) {
    require(weight <= table.num_locations, ErrorKind::WeightOutOfRange,
            "weight exceeds location count");
    detail::ShotKernel kernel(table, decoder);
    SubspaceStats stats{weight, 0, 0};
    std::vector<Fault> faults(weight);
    std::vector<std::uint32_t> combo(weight);

    auto assign_paulis = [&](auto&& self, std::uint32_t k) -> void {
        if (k == weight) {
            stats.shots += 1;
            stats.errors += kernel.run_explicit(faults);
            return;
        }
        for (Pauli p : paulis) {
            faults[k] = Fault{combo[k], p};
            self(self, k + 1);
        }
    };
    auto choose = [&](auto&& self, std::uint32_t start, std::uint32_t k) -> void {
        if (k == weight) {
            assign_paulis(assign_paulis, 0);
            return;
        }
        for (std::uint32_t loc = start; loc + (weight - k) <= table.num_locations; ++loc) {
            combo[k] = loc;
            self(self, loc + 1, k + 1);
        }
    };
    if (weight == 0) {
        assign_paulis(assign_paulis, 0);
    } else {
        choose(choose, 0, 0);
    }
    return stats;
}

/// P[Binomial(C, p) = w], evaluated in log space so huge C and tiny p cannot
/// underflow intermediate terms.
inline double binomial_weight_probability(std::uint64_t num_locations, double p, std::uint64_t w) {
    require(p >= 0.0 && p <= 1.0, ErrorKind::DomainError, "probability out of [0,1]");
    require(w <= num_locations, ErrorKind::DomainError, "weight exceeds location count");
    if (p == 0.0) {
        return w == 0 ? 1.0 : 0.0;
    }
    if (p == 1.0) {
        return w == num_locations ? 1.0 : 0.0;
    }
    double n = static_cast<double>(num_locations);
    double k = static_cast<double>(w);
    double log_choose = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    return std::exp(log_choose + k * std::log(p) + (n - k) * std::log1p(-p));
}

struct BaselineStop {
    std::uint64_t max_errors = 100;
    std::uint64_t max_shots = std::uint64_t{1} << 62;
    double max_seconds = 0;  // 0 disables the wall-clock stop (non-reproducible)
};

/// Result of i.i.d. baseline sampling at physical rate p.
struct BaselineResult {
    std::uint64_t shots = 0;
    std::uint64_t errors = 0;
    StopReason stop_reason = StopReason::TargetReached;
    std::map<std::uint32_t, std::uint64_t> weight_histogram;  // realized weight incl. 0

    double p_l() const {
        return shots == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(shots);
    }
};

/// Independent per-location fault injection at rate p (each faulting location
/// takes X, Y, or Z uniformly), decoded shot by shot, until `stop` triggers.
/// Error/shot stops are checked on batch boundaries and are exactly
/// reproducible; the optional wall-clock stop is not.
inline BaselineResult sample_baseline(const PropagationTable& table, const Decoder& decoder,
                                      double p, const BaselineStop& stop, const SamplerConfig& cfg,
                                      std::uint64_t first_shot = 0) {
    require(p >= 0.0 && p < 1.0, ErrorKind::ConfigError, "physical rate must be in [0,1)");
    BaselineResult result;
    const std::uint64_t batch = cfg.batch > 0 ? cfg.batch : 1000;
    auto start_time = std::chrono::steady_clock::now();
    std::uint64_t next_shot = first_shot;
    int workers = cfg.threads > 1 ? cfg.threads : 1;

    while (result.shots < stop.max_shots) {
        std::uint64_t take = std::min<std::uint64_t>(batch, stop.max_shots - result.shots);
        std::vector<std::uint64_t> errors(static_cast<std::size_t>(workers), 0);
        std::vector<std::map<std::uint32_t, std::uint64_t>> histograms(
            static_cast<std::size_t>(workers));
        parallel_for_range(next_shot, next_shot + take, workers,
                           [&](std::uint64_t begin, std::uint64_t end, int worker) {
                               detail::ShotKernel kernel(table, decoder);
                               auto& histogram = histograms[static_cast<std::size_t>(worker)];
                               std::uint64_t local_errors = 0;
                               for (std::uint64_t shot = begin; shot < end; ++shot) {
                                   std::uint32_t w = 0;
                                   local_errors += kernel.run_baseline_shot(cfg.seed, p, shot, w);
                                   histogram[w] += 1;
                               }
                               errors[static_cast<std::size_t>(worker)] = local_errors;
                           });
        next_shot += take;
        result.shots += take;
        for (int t = 0; t < workers; ++t) {
            result.errors += errors[static_cast<std::size_t>(t)];
            for (const auto& [w, count] : histograms[static_cast<std::size_t>(t)]) {
                result.weight_histogram[w] += count;
            }
        }
        if (result.errors >= stop.max_errors) {
            result.stop_reason = StopReason::TargetReached;
            return result;
        }
        if (stop.max_seconds > 0) {
            double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                           start_time)
                                 .count();
            if (elapsed >= stop.max_seconds) {
                result.stop_reason = StopReason::TimeBudgetExhausted;
                return result;
            }
        }
    }
    result.stop_reason = StopReason::ShotBudgetExhausted;
    return result;
}

/// CSV exchange format for per-subspace tallies. Header is fixed; p_hat is
/// redundant (errors/samples) but kept for human consumption and round-trips
/// at full double precision.
inline void write_subspace_csv(std::ostream& out, const std::vector<SubspaceStats>& rows) {
    out << "weight,samples,errors,p_hat\n";
    for (const SubspaceStats& row : rows) {
        std::ostringstream p;
        p.precision(17);
        p << row.p_hat();
        out << row.weight << ',' << row.shots << ',' << row.errors << ',' << p.str() << '\n';
    }
}

inline std::vector<SubspaceStats> read_subspace_csv(std::istream& in) {
    std::vector<SubspaceStats> rows;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (!header_seen) {
            require(line == "weight,samples,errors,p_hat", ErrorKind::FormatError,
                    "expected header 'weight,samples,errors,p_hat'", line_no);
            header_seen = true;
            continue;
        }
        SubspaceStats row;
        double p_hat_ignored = 0;
        char c1, c2, c3;
        std::istringstream fields(line);
        fields >> row.weight >> c1 >> row.shots >> c2 >> row.errors >> c3 >> p_hat_ignored;
        require(static_cast<bool>(fields) && c1 == ',' && c2 == ',' && c3 == ',',
                ErrorKind::FormatError, "bad subspace CSV row '" + line + "'", line_no);
        require(row.errors <= row.shots, ErrorKind::FormatError,
                "row has more errors than samples", line_no);
        rows.push_back(row);
    }
    require(header_seen, ErrorKind::FormatError, "empty subspace CSV");
    return rows;
}

}  // namespace qler
