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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "qler/decoder.hpp"
#include "qler/error.hpp"
#include "qler/propagation.hpp"
#include "qler/sampling.hpp"
#include "qler/scurve.hpp"

namespace qler {

/// Knobs of the staged rare-event estimator.
struct PipelineConfig {
    double p = 5e-4;                           // physical per-location rate
    std::uint64_t seed = 0;
    int threads = 1;
    std::uint32_t batch = 1000;
    std::uint64_t errors_per_subspace = 30;    // stage-2/3 stopping target (exceed it)
    std::uint64_t max_shots_per_subspace = 1'000'000;
    std::uint64_t probe_shots = 1000;          // per probe during the search stage
    double gamma = 1.0;                        // sweet-point strictness
    std::uint32_t max_subspaces = 10;          // planned-weight budget
    ModelVariant variant = ModelVariant::PowerTail;
    double shape = 0.5;
    bool weighted_fit = true;
};

/// Per-weight tally with provenance: probed during the search stage and/or
/// deliberately sampled as a planned subspace.
struct SubspaceRecord {
    SubspaceStats stats;
    bool planned = false;
    bool budget_exhausted = false;
};

struct EstimateOutcome {
    double p_l = 0;
    std::uint64_t w_min = 0;
    std::uint64_t w_max = 0;
};

struct EstimateReport {
    // circuit facts
    std::string circuit_digest;
    std::uint32_t num_locations = 0;
    std::uint32_t num_detectors = 0;
    std::uint32_t num_observables = 0;
    std::uint32_t t = 0;

    PipelineConfig config;

    // stage outputs
    std::uint32_t w_err = 0;
    std::uint32_t w_sat = 0;
    std::vector<std::uint32_t> planned_weights;  // stage-2 seeds + stage-3 additions, in order
    std::vector<SubspaceRecord> subspaces;       // all sampled weights, ascending

    FitResult fit;
    EstimateOutcome estimate;

    std::uint64_t total_shots = 0;
    std::uint64_t total_errors = 0;
    bool budget_exhausted = false;  // any subspace stopped on its shot budget
};

/// Critical-region extrapolation: total logical error rate under i.i.d.
/// per-location noise, summing f(w) * P[Binomial(C, p) = w] over the +-5 sigma
/// window around the mean weight C*p, clamped below at t+1 (weights in the
/// fault-tolerant zone contribute nothing) and above at C.
inline EstimateOutcome estimate_logical_error_rate(const SCurveModel& model,
                                                   std::uint64_t num_locations, double p) {
    require(num_locations > 0, ErrorKind::ConfigError, "empty circuit");
    require(p > 0 && p < 1, ErrorKind::ConfigError, "physical rate must be in (0,1)");
    double c = static_cast<double>(num_locations);
    double mean = c * p;
    double sigma = std::sqrt(c * p * (1.0 - p));
    double lo = std::floor(mean - 5.0 * sigma);
    double hi = std::ceil(mean + 5.0 * sigma);
    std::uint64_t t_floor = static_cast<std::uint64_t>(std::llround(model.t));
    std::uint64_t w_min = t_floor + 1;
    if (lo > static_cast<double>(w_min)) {
        w_min = static_cast<std::uint64_t>(lo);
    }
    std::uint64_t w_max = num_locations;
    if (hi < static_cast<double>(w_max)) {
        w_max = static_cast<std::uint64_t>(hi);
    }
    EstimateOutcome out;
    out.w_min = w_min;
    out.w_max = w_max;
    double total = 0;
    for (std::uint64_t w = w_min; w <= w_max; ++w) {
        total += eval_f(model, static_cast<double>(w)) *
                 binomial_weight_probability(num_locations, p, w);
    }
    out.p_l = total;
    return out;
}

namespace detail {

/// Tracks per-weight sampling state so repeated visits to a weight extend its
/// shot stream instead of replaying it.
class SubspaceLedger {
  public:
    SubspaceLedger(const PropagationTable& table, const Decoder& decoder,
                   const PipelineConfig& cfg)
        : table_(table), decoder_(decoder), cfg_(cfg) {
        sampler_.seed = cfg.seed;
        sampler_.threads = cfg.threads;
        sampler_.batch = cfg.batch;
    }

    /// Ensures at least `shots` total shots at this weight.
    const SubspaceStats& probe(std::uint32_t weight, std::uint64_t shots) {
        Entry& e = entries_[weight];
        e.stats.weight = weight;
        if (e.stats.shots < shots) {
            std::uint64_t take = shots - e.stats.shots;
            SubspaceStats got =
                sample_weight_w(table_, decoder_, weight, take, sampler_, e.next_shot);
            e.next_shot += take;
            e.stats.shots += got.shots;
            e.stats.errors += got.errors;
        }
        return e.stats;
    }

    /// Samples this weight in batches until its error tally strictly exceeds
    /// the per-subspace target or its total shots reach the budget.
    const SubspaceStats& ensure_errors(std::uint32_t weight) {
        Entry& e = entries_[weight];
        e.stats.weight = weight;
        e.planned = true;
        const std::uint64_t batch = cfg_.batch > 0 ? cfg_.batch : 1000;
        while (e.stats.errors <= cfg_.errors_per_subspace &&
               e.stats.shots < cfg_.max_shots_per_subspace) {
            std::uint64_t take =
                std::min<std::uint64_t>(batch, cfg_.max_shots_per_subspace - e.stats.shots);
            SubspaceStats got =
                sample_weight_w(table_, decoder_, weight, take, sampler_, e.next_shot);
            e.next_shot += take;
            e.stats.shots += got.shots;
            e.stats.errors += got.errors;
        }
        e.budget_exhausted = e.stats.errors <= cfg_.errors_per_subspace;
        return e.stats;
    }

    /// Fit inputs: every sampled weight, probes included. Usability (p_hat
    /// in (0, 0.45], above the threshold) is the fitter's own contract.
    std::vector<FitPoint> fit_points() const {
        std::vector<FitPoint> pts;
        for (const auto& [w, e] : entries_) {
            if (e.stats.shots > 0) {
                pts.push_back(FitPoint{static_cast<double>(w), e.stats.shots, e.stats.errors});
            }
        }
        return pts;
    }

    std::vector<SubspaceRecord> records() const {
        std::vector<SubspaceRecord> out;
        for (const auto& [w, e] : entries_) {
            out.push_back(SubspaceRecord{e.stats, e.planned, e.budget_exhausted});
        }
        return out;
    }

    bool any_planned_budget_exhausted() const {
        for (const auto& [w, e] : entries_) {
            if (e.planned && e.budget_exhausted) {
                return true;
            }
        }
        return false;
    }

  private:
    struct Entry {
        SubspaceStats stats;
        std::uint64_t next_shot = 0;
        bool planned = false;
        bool budget_exhausted = false;
    };

    const PropagationTable& table_;
    const Decoder& decoder_;
    const PipelineConfig& cfg_;
    SamplerConfig sampler_;
    std::map<std::uint32_t, Entry> entries_;
};

}  // namespace detail

/// Full staged estimation of the logical error rate.
///
/// Stage 1 (search): bisection with fixed-size probes finds w_err, the
/// smallest weight showing any logical error, and w_sat, the largest probed
/// weight with p_hat <= 1/4. Assumes p_hat is monotone in w, which holds for
/// decodable codes.
///
/// Stage 2 (seed): five evenly spaced weights spanning [w_err, w_sat], each
/// sampled until its error count exceeds errors_per_subspace or its shot
/// budget runs out.
///
/// Stage 3 (extend): repeatedly fit the S-curve, locate the sweet point, and
/// step the sampling front down toward it by (w_err - w_sweet)/5 per
/// iteration (at least 1), until the front reaches the sweet point, the
/// planned-subspace budget is exhausted, or a budget-exhausted subspace shows
/// progress is no longer affordable. A fit whose linear solution loses
/// positivity is discarded in favor of the previous valid fit, and one more
/// subspace is forced one weight below the front to regularize the tail.
///
/// The final model extrapolates f(w) across the binomial critical region.
inline EstimateReport run_estimation(const PropagationTable& table, const Decoder& decoder,
                                     std::uint32_t t, const PipelineConfig& cfg) {
    require(cfg.p > 0 && cfg.p < 1, ErrorKind::ConfigError, "physical rate must be in (0,1)");
    require(cfg.max_subspaces >= 5, ErrorKind::ConfigError, "need at least 5 planned subspaces");
    require(table.num_locations > 0, ErrorKind::ConfigError, "circuit has no fault locations");

    EstimateReport report;
    report.circuit_digest = table.circuit_digest;
    report.num_locations = table.num_locations;
    report.num_detectors = table.num_detectors;
    report.num_observables = table.num_observables;
    report.t = t;
    report.config = cfg;

    detail::SubspaceLedger ledger(table, decoder, cfg);
    const std::uint32_t C = table.num_locations;

    // ---- stage 1: locate w_err by bisection ----
    require(ledger.probe(C, cfg.probe_shots).errors > 0, ErrorKind::NoErrorsAnywhere,
            "no logical errors even with every location faulted; nothing to estimate");
    std::uint32_t lo = 1, hi = C;
    while (lo < hi) {
        std::uint32_t mid = lo + (hi - lo) / 2;
        if (ledger.probe(mid, cfg.probe_shots).errors > 0) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    const std::uint32_t w_err = lo;
    report.w_err = w_err;

    // ---- stage 1b: locate w_sat (largest probed weight with p_hat <= 1/4) ----
    std::uint32_t w_sat = w_err;
    if (ledger.probe(w_err, cfg.probe_shots).p_hat() <= 0.25) {
        lo = w_err;
        hi = C;
        while (lo < hi) {
            std::uint32_t mid = lo + (hi - lo + 1) / 2;
            if (ledger.probe(mid, cfg.probe_shots).p_hat() <= 0.25) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        w_sat = lo;
    }
    report.w_sat = w_sat;

    // ---- stage 2: five evenly spaced subspaces across [w_err, w_sat] ----
    std::set<std::uint32_t> planned;
    for (int k = 0; k < 5; ++k) {
        double frac = static_cast<double>(k) / 4.0;
        std::uint32_t w = w_err + static_cast<std::uint32_t>(std::llround(
                                      frac * static_cast<double>(w_sat - w_err)));
        if (planned.insert(w).second) {
            report.planned_weights.push_back(w);
            ledger.ensure_errors(w);
        }
    }

    // ---- stage 3: extend the front toward the sweet point ----
    std::optional<FitResult> last_valid_fit;
    bool forced_tail_subspace = false;
    while (true) {
        FitResult fit;
        try {
            fit = fit_scurve(ledger.fit_points(), cfg.variant, static_cast<double>(t), cfg.shape,
                             FitOptions{cfg.weighted_fit});
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::InsufficientData && last_valid_fit) {
                break;
            }
            throw;
        }
        std::uint32_t w_front = *planned.begin();
        if (fit.positivity_projected) {
            // Keep the previous well-posed fit and regularize with one extra
            // subspace just below the front, then stop extending.
            if (!forced_tail_subspace && w_front > t + 1 && planned.size() < cfg.max_subspaces) {
                forced_tail_subspace = true;
                std::uint32_t w_new = w_front - 1;
                if (planned.insert(w_new).second) {
                    report.planned_weights.push_back(w_new);
                    ledger.ensure_errors(w_new);
                }
                continue;
            }
            if (!last_valid_fit) {
                last_valid_fit = fit;  // degenerate but better than nothing
            }
            break;
        }
        last_valid_fit = fit;
        std::uint64_t w_sweet = compute_w_sweet(fit.model, cfg.gamma);
        if (w_front <= w_sweet || planned.size() >= cfg.max_subspaces) {
            break;
        }
        std::uint32_t step = static_cast<std::uint32_t>(std::max<std::int64_t>(
            1, static_cast<std::int64_t>((w_err - std::min<std::uint64_t>(w_sweet, w_err)) / 5)));
        std::uint64_t proposal = w_front > step ? w_front - step : 1;
        std::uint64_t w_new = std::max<std::uint64_t>({proposal, w_sweet, std::uint64_t{t} + 1, 1});
        if (w_new >= w_front) {
            break;
        }
        const SubspaceStats& added = ledger.ensure_errors(static_cast<std::uint32_t>(w_new));
        planned.insert(static_cast<std::uint32_t>(w_new));
        report.planned_weights.push_back(static_cast<std::uint32_t>(w_new));
        if (added.errors <= cfg.errors_per_subspace) {
            break;  // shot budget exhausted before the error target: stop descending
        }
    }
    require(static_cast<bool>(last_valid_fit), ErrorKind::FitDiverged,
            "no well-posed fit was found at any stage");
    report.fit = *last_valid_fit;

    report.estimate = estimate_logical_error_rate(report.fit.model, C, cfg.p);
    report.subspaces = ledger.records();
    report.budget_exhausted = ledger.any_planned_budget_exhausted();
    for (const SubspaceRecord& r : report.subspaces) {
        report.total_shots += r.stats.shots;
        report.total_errors += r.stats.errors;
    }
    return report;
}

// ---------------------------------------------------------------------------
// JSON serialization of reports (keys are emitted in sorted order, and doubles
// round-trip exactly, so equal reports serialize to identical bytes).
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const SCurveModel& m) {
    return {{"variant", model_variant_name(m.variant)}, {"t", m.t},        {"mu", m.mu},
            {"alpha", m.alpha},                         {"beta", m.beta},  {"shape", m.shape}};
}

inline SCurveModel scurve_model_from_json(const nlohmann::json& j) {
    SCurveModel m;
    m.variant = model_variant_from_name(j.at("variant").get<std::string>());
    m.t = j.at("t").get<double>();
    m.mu = j.at("mu").get<double>();
    m.alpha = j.at("alpha").get<double>();
    m.beta = j.at("beta").get<double>();
    m.shape = j.at("shape").get<double>();
    return m;
}

inline nlohmann::json to_json(const FitResult& fit) {
    return {{"model", to_json(fit.model)},
            {"usable_points", fit.usable_points},
            {"positivity_projected", fit.positivity_projected},
            {"r2_y", fit.r2_y},
            {"r2_p", fit.r2_p}};
}

inline nlohmann::json to_json(const EstimateReport& r) {
    nlohmann::json subspaces = nlohmann::json::array();
    for (const SubspaceRecord& s : r.subspaces) {
        subspaces.push_back({{"weight", s.stats.weight},
                             {"shots", s.stats.shots},
                             {"errors", s.stats.errors},
                             {"p_hat", s.stats.p_hat()},
                             {"planned", s.planned},
                             {"budget_exhausted", s.budget_exhausted}});
    }
    return {
        {"schema_version", "qler-estimate-v1"},
        {"circuit",
         {{"digest", r.circuit_digest},
          {"num_locations", r.num_locations},
          {"num_detectors", r.num_detectors},
          {"num_observables", r.num_observables},
          {"t", r.t}}},
        {"config",
         {{"p", r.config.p},
          {"seed", r.config.seed},
          {"batch", r.config.batch},
          {"errors_per_subspace", r.config.errors_per_subspace},
          {"max_shots_per_subspace", r.config.max_shots_per_subspace},
          {"probe_shots", r.config.probe_shots},
          {"gamma", r.config.gamma},
          {"max_subspaces", r.config.max_subspaces},
          {"variant", model_variant_name(r.config.variant)},
          {"shape", r.config.shape},
          {"weighted_fit", r.config.weighted_fit}}},
        {"stages",
         {{"w_err", r.w_err}, {"w_sat", r.w_sat}, {"planned_weights", r.planned_weights}}},
        {"fit", to_json(r.fit)},
        {"estimate",
         {{"p_l", r.estimate.p_l}, {"w_min", r.estimate.w_min}, {"w_max", r.estimate.w_max}}},
        {"totals",
         {{"shots", r.total_shots},
          {"errors", r.total_errors},
          {"budget_exhausted", r.budget_exhausted}}},
        {"subspaces", subspaces},
    };
}

inline nlohmann::json to_json(const BaselineResult& r, double p, std::uint64_t seed,
                              const std::string& circuit_digest, std::uint32_t num_locations) {
    nlohmann::json histogram = nlohmann::json::array();
    for (const auto& [w, count] : r.weight_histogram) {
        histogram.push_back({{"weight", w}, {"shots", count}});
    }
    return {
        {"schema_version", "qler-baseline-v1"},
        {"circuit", {{"digest", circuit_digest}, {"num_locations", num_locations}}},
        {"config", {{"p", p}, {"seed", seed}}},
        {"totals",
         {{"shots", r.shots},
          {"errors", r.errors},
          {"p_l", r.p_l()},
          {"stop_reason", stop_reason_name(r.stop_reason)}}},
        {"weight_histogram", histogram},
    };
}

}  // namespace qler
