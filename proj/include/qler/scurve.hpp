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
#include <functional>
#include <string>
#include <vector>

#include "qler/error.hpp"

namespace qler {

/// Functional families for the per-weight logical error probability f(w).
/// Both are S-curves: 0 through the fault-tolerant zone w <= t, monotone
/// increasing, saturating at 1/2.
enum class ModelVariant : std::uint8_t {
    /// f(w) = 1 / (2(1 + e^{y(w)})) with y(w) = -(w-mu)/alpha + beta*(w-t)^{-s}:
    /// asymptotically logistic in w with a power-law onset correction. The
    /// shape exponent s defaults to 1/2.
    PowerTail,
    /// f(w) = (1 - exp(-2 mu (w/beta)^alpha)) / 2: a scaled Weibull CDF.
    Weibull,
};

inline const char* model_variant_name(ModelVariant v) {
    return v == ModelVariant::PowerTail ? "power_tail" : "weibull";
}

inline ModelVariant model_variant_from_name(const std::string& name) {
    if (name == "power_tail") {
        return ModelVariant::PowerTail;
    }
    if (name == "weibull") {
        return ModelVariant::Weibull;
    }
    fail(ErrorKind::ConfigError, "unknown model variant '" + name + "'");
}

struct SCurveModel {
    ModelVariant variant = ModelVariant::PowerTail;
    double t = 0;      // fault-tolerant threshold: f = 0 for w <= t
    double mu = 0;     // center (PowerTail) / rate scale (Weibull)
    double alpha = 1;  // inverse slope (PowerTail) / shape (Weibull)
    double beta = 1;   // onset-correction strength (PowerTail) / scale (Weibull)
    double shape = 0.5;  // exponent s of the onset term; PowerTail only

    bool params_valid() const {
        return std::isfinite(mu) && std::isfinite(alpha) && std::isfinite(beta) && alpha > 0 &&
               beta > 0 && (variant == ModelVariant::Weibull || shape > 0) &&
               (variant == ModelVariant::PowerTail || mu > 0);
    }
};

/// Y-domain transform: y = ln(1/(2p) - 1), defined for p in (0, 1/2). Maps the
/// S-curve onto a curve that is asymptotically linear in w, which is what the
/// fitter works on.
inline double y_transform(double p) {
    require(p > 0.0 && p < 0.5, ErrorKind::DomainError,
            "y transform needs p in (0, 1/2), got " + std::to_string(p));
    return std::log((1.0 - 2.0 * p) / (2.0 * p));
}

inline double y_inverse(double y) { return 0.5 / (1.0 + std::exp(y)); }

/// Model value of y(w); requires w > t (PowerTail) / w > 0 (Weibull).
inline double y_value(const SCurveModel& m, double w) {
    if (m.variant == ModelVariant::PowerTail) {
        require(w > m.t, ErrorKind::DomainError, "y(w) needs w > t");
        return -(w - m.mu) / m.alpha + m.beta * std::pow(w - m.t, -m.shape);
    }
    require(w > 0, ErrorKind::DomainError, "y(w) needs w > 0");
    double q = 2.0 * m.mu * std::pow(w / m.beta, m.alpha);
    if (q > 700.0) {
        return -q;  // ln(e^q - 1) == q to double precision
    }
    double em = std::expm1(q);
    require(em > 0, ErrorKind::DomainError, "degenerate Weibull rate");
    return -std::log(em);
}

/// f(w): the modeled probability that a weight-w sample is a logical error.
inline double eval_f(const SCurveModel& m, double w) {
    if (w <= m.t) {
        return 0.0;
    }
    if (m.variant == ModelVariant::PowerTail) {
        double y = y_value(m, w);
        if (y > 700.0) {
            return 0.0;
        }
        return 0.5 / (1.0 + std::exp(y));
    }
    double q = 2.0 * m.mu * std::pow(w / m.beta, m.alpha);
    return -0.5 * std::expm1(-q);
}

struct YDerivatives {
    double y1;
    double y2;
};

/// Closed-form first and second derivatives of y(w).
inline YDerivatives y_derivatives(const SCurveModel& m, double w) {
    if (m.variant == ModelVariant::PowerTail) {
        require(w > m.t, ErrorKind::DomainError, "derivatives need w > t");
        double u = w - m.t;
        double s = m.shape;
        double y1 = -1.0 / m.alpha - m.beta * s * std::pow(u, -s - 1.0);
        double y2 = m.beta * s * (s + 1.0) * std::pow(u, -s - 2.0);
        return {y1, y2};
    }
    require(w > 0, ErrorKind::DomainError, "derivatives need w > 0");
    double q = 2.0 * m.mu * std::pow(w / m.beta, m.alpha);
    double q1 = m.alpha * q / w;
    double q2 = m.alpha * (m.alpha - 1.0) * q / (w * w);
    // y = -ln(e^q - 1); with g = 1/(1 - e^-q): y' = -g q',
    // y'' = -g q'' + g(g-1) q'^2. For large q, 1/expm1(q) underflows to 0 and
    // the expressions reduce to the correct asymptotes y' = -q', y'' = -q''.
    double gm1 = q > 700.0 ? 0.0 : 1.0 / std::expm1(q);
    double g = 1.0 + gm1;
    return {-g * q1, -g * q2 + g * gm1 * q1 * q1};
}

/// Lowest weight still worth sampling: the largest integer w > t whose
/// midpoint curvature y''(w - 1/2) is at least Gamma times the asymptotic
/// slope magnitude 1/alpha. Larger Gamma demands more curvature, pushing the
/// cut closer to the threshold and widening the sampled range.
inline std::uint64_t compute_w_sweet(const SCurveModel& m, double gamma) {
    require(m.variant == ModelVariant::PowerTail, ErrorKind::DomainError,
            "sweet-point rule needs the power-tail model (no asymptotic slope otherwise)");
    require(gamma > 0, ErrorKind::ConfigError, "Gamma must be positive");
    std::uint64_t t_floor = static_cast<std::uint64_t>(std::llround(m.t));
    std::uint64_t w = t_floor + 1;
    std::uint64_t best = w;
    const std::uint64_t cap = t_floor + 10'000'000ull;
    while (w <= cap) {
        double mid = static_cast<double>(w) - 0.5;
        if (mid <= m.t) {
            best = w;
            ++w;
            continue;
        }
        double y2 = y_derivatives(m, mid).y2;
        if (y2 >= gamma / m.alpha) {
            best = w;  // curvature decays monotonically, so keep scanning
            ++w;
        } else {
            break;
        }
    }
    return best;
}

struct WSatResult {
    std::uint64_t w = 0;
    bool capped = false;  // true if the search hit its upper bound
};

/// Largest integer weight with f(w) < 1/4, i.e. the last weight before the
/// curve saturates; equivalently the largest w with y(w) > 0. Monotone
/// bisection; degenerate models that are already >= 1/4 at t+1 report t+1
/// with the capped flag.
inline WSatResult compute_w_sat(const SCurveModel& m) {
    std::uint64_t t_floor =
        m.variant == ModelVariant::PowerTail ? static_cast<std::uint64_t>(std::llround(m.t)) : 0;
    std::uint64_t lo = t_floor + 1;
    if (!(eval_f(m, static_cast<double>(lo)) < 0.25)) {
        return {lo, true};
    }
    std::uint64_t hi = lo + 1;
    const std::uint64_t cap = lo + (std::uint64_t{1} << 40);
    while (eval_f(m, static_cast<double>(hi)) < 0.25) {
        if (hi >= cap) {
            return {hi, true};
        }
        hi = lo + (hi - lo) * 2;
    }
    // invariant: f(lo) < 1/4 <= f(hi)
    while (hi - lo > 1) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        if (eval_f(m, static_cast<double>(mid)) < 0.25) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return {lo, false};
}

/// One fitting point: a sampled weight-w subspace tally.
struct FitPoint {
    double w = 0;
    std::uint64_t samples = 0;
    std::uint64_t errors = 0;

    double p_hat() const {
        return samples == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(samples);
    }
};

struct FitOptions {
    bool weighted = true;
    std::uint32_t max_iterations = 4000;  // for the simplex refinement paths
};

struct FitResult {
    SCurveModel model;
    std::uint32_t usable_points = 0;    // points with p_hat in (0, 0.45]
    bool positivity_projected = false;  // linear solution violated positivity
    double r2_y = 0;                    // Y-domain R^2 over usable points
    double r2_p = 0;                    // p-domain R^2 over all points
};

namespace detail {

/// Solves A x = b (n<=4) by Gaussian elimination with partial pivoting.
inline bool solve_linear(std::vector<std::vector<double>>& a, std::vector<double>& b,
                         std::vector<double>& x) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) {
                pivot = r;
            }
        }
        if (std::fabs(a[pivot][col]) < 1e-300) {
            return false;
        }
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            double factor = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) {
                a[r][c] -= factor * a[col][c];
            }
            b[r] -= factor * b[col];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t r = n; r-- > 0;) {
        double acc = b[r];
        for (std::size_t c = r + 1; c < n; ++c) {
            acc -= a[r][c] * x[c];
        }
        x[r] = acc / a[r][r];
    }
    return true;
}

/// Plain Nelder-Mead simplex minimizer, deterministic.
inline std::vector<double> nelder_mead(const std::vector<double>& init,
                                       const std::vector<double>& step,
                                       const std::function<double(const std::vector<double>&)>& fn,
                                       std::uint32_t max_iterations) {
    const std::size_t n = init.size();
    std::vector<std::vector<double>> pts(n + 1, init);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i + 1][i] += step[i];
    }
    std::vector<double> vals(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        vals[i] = fn(pts[i]);
    }
    for (std::uint32_t iter = 0; iter < max_iterations; ++iter) {
        // order: best .. worst
        std::vector<std::size_t> order(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            order[i] = i;
        }
        std::sort(order.begin(), order.end(),
                  [&vals](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        std::size_t best = order[0], worst = order[n], second_worst = order[n - 1];
        if (std::fabs(vals[worst] - vals[best]) <=
            1e-12 * (std::fabs(vals[best]) + std::fabs(vals[worst])) + 1e-300) {
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) {
                continue;
            }
            for (std::size_t d = 0; d < n; ++d) {
                centroid[d] += pts[i][d] / static_cast<double>(n);
            }
        }
        auto blend = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t d = 0; d < n; ++d) {
                p[d] = centroid[d] + coef * (pts[worst][d] - centroid[d]);
            }
            return p;
        };
        std::vector<double> reflected = blend(-1.0);
        double fr = fn(reflected);
        if (fr < vals[best]) {
            std::vector<double> expanded = blend(-2.0);
            double fe = fn(expanded);
            if (fe < fr) {
                pts[worst] = expanded;
                vals[worst] = fe;
            } else {
                pts[worst] = reflected;
                vals[worst] = fr;
            }
        } else if (fr < vals[second_worst]) {
            pts[worst] = reflected;
            vals[worst] = fr;
        } else {
            std::vector<double> contracted = blend(0.5);
            double fc = fn(contracted);
            if (fc < vals[worst]) {
                pts[worst] = contracted;
                vals[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) {
                        continue;
                    }
                    for (std::size_t d = 0; d < n; ++d) {
                        pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
                    }
                    vals[i] = fn(pts[i]);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (vals[i] < vals[best]) {
            best = i;
        }
    }
    return pts[best];
}

/// Delta-method inverse-variance weight of a Y-domain point:
/// Var[y] ~ (1-p)/(n p (1-2p)^2), so weight = n p (1-2p)^2 / (1-p).
inline double y_point_weight(const FitPoint& pt) {
    double p = pt.p_hat();
    double n = static_cast<double>(pt.samples);
    return n * p * (1.0 - 2.0 * p) * (1.0 - 2.0 * p) / (1.0 - p);
}

struct YData {
    std::vector<double> w, y, weight;
};

/// Points this close to saturation are censored, not informative: the
/// observable |y| is bounded by ~ln(2n) shot noise while the model's y keeps
/// falling linearly in w, so a least-squares residual there is meaningless
/// and a few such points at large w can drag the fitted slope by an order of
/// magnitude. 0.45 sits >3 sigma from 1/2 at the 1000-shot probe size.
constexpr double kSaturationCap = 0.45;

inline YData usable_y_data(const std::vector<FitPoint>& points, double t, ModelVariant variant,
                           bool weighted) {
    YData data;
    for (const FitPoint& pt : points) {
        double p = pt.p_hat();
        if (!(p > 0.0 && p <= kSaturationCap)) {
            continue;
        }
        if (variant == ModelVariant::PowerTail && !(pt.w > t)) {
            continue;
        }
        data.w.push_back(pt.w);
        data.y.push_back(y_transform(p));
        data.weight.push_back(weighted ? y_point_weight(pt) : 1.0);
    }
    return data;
}

inline double weighted_y_sse(const SCurveModel& m, const YData& data) {
    double sse = 0;
    for (std::size_t i = 0; i < data.w.size(); ++i) {
        double resid = data.y[i] - y_value(m, data.w[i]);
        sse += data.weight[i] * resid * resid;
    }
    return std::isfinite(sse) ? sse : 1e300;
}

}  // namespace detail

/// Fits an S-curve model to per-weight tallies in the Y domain.
///
/// Points with p_hat outside (0, 1/2) carry no Y value, and points beyond
/// the saturation cap (p_hat > 0.45) are censored by shot noise; both are
/// excluded from the fit (they still enter the reported p-domain R^2). At
/// least 3 usable points are required.
///
/// PowerTail: y is linear in the parameter vector (a, b, c) over the basis
/// (w, 1, (w-t)^{-s}) with a = -1/alpha, b = mu/alpha, c = beta, so the
/// weighted least-squares problem is solved exactly. If the solution violates
/// positivity (alpha, beta > 0) the fit is redone by a positivity-constrained
/// simplex over (ln alpha, mu, ln beta) and flagged.
///
/// Weibull: initialized by log-log regression of q = -ln(1-2p) against w with
/// beta pinned to t+1, then refined by simplex over (ln mu, ln alpha, ln beta).
inline FitResult fit_scurve(const std::vector<FitPoint>& points, ModelVariant variant, double t,
                            double shape = 0.5, const FitOptions& options = {}) {
    require(shape > 0, ErrorKind::ConfigError, "shape exponent must be positive");
    detail::YData data = detail::usable_y_data(points, t, variant, options.weighted);
    const std::size_t n = data.w.size();
    require(n >= 3, ErrorKind::InsufficientData,
            "need at least 3 points with p_hat in (0, 0.45], have " + std::to_string(n));

    FitResult result;
    result.model.variant = variant;
    result.model.t = t;
    result.model.shape = shape;
    result.usable_points = static_cast<std::uint32_t>(n);

    if (variant == ModelVariant::PowerTail) {
        // Basis functions per point.
        auto basis = [&](std::size_t i, std::size_t k) {
            double u = data.w[i] - t;
            return k == 0 ? data.w[i] : (k == 1 ? 1.0 : std::pow(u, -shape));
        };
        std::vector<std::vector<double>> ata(3, std::vector<double>(3, 0.0));
        std::vector<double> atb(3, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t r = 0; r < 3; ++r) {
                for (std::size_t c = 0; c < 3; ++c) {
                    ata[r][c] += data.weight[i] * basis(i, r) * basis(i, c);
                }
                atb[r] += data.weight[i] * basis(i, r) * data.y[i];
            }
        }
        std::vector<double> coef;
        bool solved = detail::solve_linear(ata, atb, coef);
        require(solved, ErrorKind::FitDiverged, "singular normal equations (degenerate weights)");
        double a = coef[0], b = coef[1], c = coef[2];
        if (a < 0 && c > 0) {
            result.model.alpha = -1.0 / a;
            result.model.mu = -b / a;
            result.model.beta = c;
        } else {
            result.positivity_projected = true;
            SCurveModel probe = result.model;
            double alpha0 = a < 0 ? -1.0 / a : 10.0;
            double beta0 = c > 0 ? c : 1.0;
            double mu0 = a < 0 ? -b / a : data.w[n / 2];
            auto objective = [&](const std::vector<double>& v) {
                SCurveModel m = probe;
                m.alpha = std::exp(v[0]);
                m.mu = v[1];
                m.beta = std::exp(v[2]);
                return detail::weighted_y_sse(m, data);
            };
            std::vector<double> best =
                detail::nelder_mead({std::log(alpha0), mu0, std::log(beta0)}, {0.5, 5.0, 0.5},
                                    objective, options.max_iterations);
            result.model.alpha = std::exp(best[0]);
            result.model.mu = best[1];
            result.model.beta = std::exp(best[2]);
        }
    } else {
        // Initialization: q = 2 mu (w/beta)^alpha => ln q = ln(2mu) - alpha ln beta + alpha ln w.
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double p = y_inverse(data.y[i]);
            double q = -std::log1p(-2.0 * p);
            double lx = std::log(data.w[i]);
            double ly = std::log(q);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        double nn = static_cast<double>(n);
        double denom = nn * sxx - sx * sx;
        double alpha0 = denom != 0 ? (nn * sxy - sx * sy) / denom : 1.0;
        if (!(alpha0 > 0) || !std::isfinite(alpha0)) {
            alpha0 = 1.0;
        }
        double intercept = (sy - alpha0 * sx) / nn;
        double beta0 = t + 1.0;
        double mu0 = 0.5 * std::exp(intercept + alpha0 * std::log(beta0));
        if (!(mu0 > 0) || !std::isfinite(mu0)) {
            mu0 = 0.1;
        }
        SCurveModel probe = result.model;
        auto objective = [&](const std::vector<double>& v) {
            SCurveModel m = probe;
            m.mu = std::exp(v[0]);
            m.alpha = std::exp(v[1]);
            m.beta = std::exp(v[2]);
            return detail::weighted_y_sse(m, data);
        };
        std::vector<double> best = detail::nelder_mead(
            {std::log(mu0), std::log(alpha0), std::log(beta0)}, {0.5, 0.3, 0.5}, objective,
            options.max_iterations);
        result.model.mu = std::exp(best[0]);
        result.model.alpha = std::exp(best[1]);
        result.model.beta = std::exp(best[2]);
    }

    require(result.model.params_valid(), ErrorKind::FitDiverged,
            "fit produced non-finite or non-positive parameters");

    // Y-domain R^2 over usable points.
    double mean_y = 0;
    for (double y : data.y) {
        mean_y += y / static_cast<double>(n);
    }
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double resid = data.y[i] - y_value(result.model, data.w[i]);
        ss_res += resid * resid;
        ss_tot += (data.y[i] - mean_y) * (data.y[i] - mean_y);
    }
    result.r2_y = ss_tot > 0 ? 1.0 - ss_res / ss_tot : (ss_res == 0 ? 1.0 : 0.0);

    // p-domain R^2 over all points.
    double mean_p = 0;
    for (const FitPoint& pt : points) {
        mean_p += pt.p_hat() / static_cast<double>(points.size());
    }
    double pss_res = 0, pss_tot = 0;
    for (const FitPoint& pt : points) {
        double predicted = eval_f(result.model, pt.w);
        pss_res += (pt.p_hat() - predicted) * (pt.p_hat() - predicted);
        pss_tot += (pt.p_hat() - mean_p) * (pt.p_hat() - mean_p);
    }
    result.r2_p = pss_tot > 0 ? 1.0 - pss_res / pss_tot : (pss_res == 0 ? 1.0 : 0.0);
    return result;
}

}  // namespace qler
