/*
   Copyright 2026 The geninv Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "core_ops.hpp"
#include "numerics.hpp"

namespace geninv {

inline double sgn(double x) { return static_cast<double>((x > 0) - (x < 0)); }

/// L_p norm for 1 <= p < inf, max-norm for p = inf.
inline double lp_norm(std::span<const double> v, double p = 2.0) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
    if (p == 2.0) return norm2(v);
    double s = 0.0;
    for (double x : v) s += std::pow(std::abs(x), p);
    return std::pow(s, 1.0 / p);
}

inline double lp_distance(std::span<const double> a, std::span<const double> b, double p = 2.0) {
    Vec d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return lp_norm(d, p);
}

// ---------------------------------------------------------------------------
// One-dimensional operators with known pseudo-inverses

enum class ScalarKind {
    square,
    shifted_square,
    relu,
    hard_threshold,
    soft_threshold,
    tanh,
    sign,
    sign_eps,
    exp,
    sine,
    linear,
    custom_sampled,
};

struct Scalar1DOperator {
    ScalarKind kind = ScalarKind::linear;
    double param = 0.0;  // a for shifted_square and thresholds, epsilon for sign_eps, slope for linear
    // custom_sampled: strictly increasing abscissae with values, linear interpolation, constant outside
    Vec xs, ys;

    static Scalar1DOperator make(ScalarKind kind, double param = 0.0) {
        Scalar1DOperator op{kind, param, {}, {}};
        op.validate();
        return op;
    }

    static Scalar1DOperator sampled(Vec xs, Vec ys) {
        Scalar1DOperator op{ScalarKind::custom_sampled, 0.0, std::move(xs), std::move(ys)};
        op.validate();
        return op;
    }

    void validate() const {
        if (!std::isfinite(param)) throw std::invalid_argument("scalar operator: parameter is not finite");
        switch (kind) {
            case ScalarKind::shifted_square:
                if (param == 0.0) throw std::invalid_argument("shifted_square: a must be nonzero");
                break;
            case ScalarKind::hard_threshold:
            case ScalarKind::soft_threshold:
                if (param < 0.0) throw std::invalid_argument("threshold: a must be non-negative");
                break;
            case ScalarKind::sign_eps:
                if (param <= 0.0) throw std::invalid_argument("sign_eps: epsilon must be positive");
                break;
            case ScalarKind::custom_sampled:
                if (xs.empty() || xs.size() != ys.size())
                    throw std::invalid_argument("custom_sampled: need equally many (nonzero) abscissae and values");
                for (std::size_t i = 1; i < xs.size(); ++i)
                    if (!(xs[i] > xs[i - 1])) throw std::invalid_argument("custom_sampled: abscissae must increase");
                break;
            default:
                break;
        }
    }

    double operator()(double v) const {
        const double a = param;
        switch (kind) {
            case ScalarKind::square: return v * v;
            case ScalarKind::shifted_square: return (v - a) * (v - a);
            case ScalarKind::relu: return std::max(v, 0.0);
            case ScalarKind::hard_threshold: return std::abs(v) >= a ? v : 0.0;
            case ScalarKind::soft_threshold: return sgn(v) * std::max(std::abs(v) - a, 0.0);
            case ScalarKind::tanh: return std::tanh(v);
            case ScalarKind::sign: return sgn(v);
            case ScalarKind::sign_eps: return std::clamp(v / a, -1.0, 1.0);
            case ScalarKind::exp: return std::exp(v);
            case ScalarKind::sine: return std::sin(v);
            case ScalarKind::linear: return a * v;
            case ScalarKind::custom_sampled: {
                if (v <= xs.front()) return ys.front();
                if (v >= xs.back()) return ys.back();
                const auto it = std::upper_bound(xs.begin(), xs.end(), v);
                const std::size_t j = static_cast<std::size_t>(it - xs.begin());
                const double t = (v - xs[j - 1]) / (xs[j] - xs[j - 1]);
                return ys[j - 1] + t * (ys[j] - ys[j - 1]);
            }
        }
        return 0.0;
    }

    VectorOperator as_vector_operator() const {
        return VectorOperator(1, 1, [op = *this](std::span<const double> v) { return Vec{op(v[0])}; });
    }
};

inline std::optional<ScalarKind> parse_scalar_kind(const std::string& name) {
    static const std::pair<const char*, ScalarKind> names[] = {
        {"square", ScalarKind::square},       {"shifted_square", ScalarKind::shifted_square},
        {"relu", ScalarKind::relu},           {"hard", ScalarKind::hard_threshold},
        {"hard_threshold", ScalarKind::hard_threshold}, {"soft", ScalarKind::soft_threshold},
        {"soft_threshold", ScalarKind::soft_threshold}, {"tanh", ScalarKind::tanh},
        {"sign", ScalarKind::sign},           {"sign_eps", ScalarKind::sign_eps},
        {"exp", ScalarKind::exp},             {"sine", ScalarKind::sine},
        {"sin", ScalarKind::sine},            {"linear", ScalarKind::linear},
    };
    for (const auto& [n, k] : names)
        if (name == n) return k;
    return std::nullopt;
}

/// Outcome of a closed-form evaluation.
struct ClosedFormValue {
    enum class Status { value, undefined, nonunique };
    Status status = Status::undefined;
    double value = 0.0;  // for nonunique: the non-negative representative; -value is the other choice

    static ClosedFormValue of(double v) { return {Status::value, v}; }
    static ClosedFormValue undefined_at() { return {Status::undefined, 0.0}; }
    static ClosedFormValue both_signs(double v) { return {Status::nonunique, v}; }
    bool defined() const noexcept { return status != Status::undefined; }
};

/// Pseudo-inverse value from the known closed forms.
inline ClosedFormValue closed_form_pinv(const Scalar1DOperator& op, double w) {
    const double a = op.param;
    switch (op.kind) {
        case ScalarKind::square: {
            const double r = std::sqrt(std::max(w, 0.0));
            return r == 0.0 ? ClosedFormValue::of(0.0) : ClosedFormValue::both_signs(r);
        }
        case ScalarKind::shifted_square: return ClosedFormValue::of(a - sgn(a) * std::sqrt(std::max(w, 0.0)));
        case ScalarKind::relu: return ClosedFormValue::of(std::max(w, 0.0));
        case ScalarKind::hard_threshold:
            return ClosedFormValue::of(std::abs(w) > a / 2 ? sgn(w) * std::max(a, std::abs(w)) : 0.0);
        case ScalarKind::soft_threshold: return ClosedFormValue::of(sgn(w) * (std::abs(w) + a));
        case ScalarKind::tanh:
            if (std::abs(w) >= 1.0) return ClosedFormValue::undefined_at();
            return ClosedFormValue::of(std::atanh(w));
        case ScalarKind::sign:
            if (std::abs(w) > 0.5) return ClosedFormValue::undefined_at();
            return ClosedFormValue::of(0.0);
        case ScalarKind::sign_eps: return ClosedFormValue::of(a * std::clamp(w, -1.0, 1.0));
        case ScalarKind::exp:
            if (w <= 0.0) return ClosedFormValue::undefined_at();
            return ClosedFormValue::of(std::log(w));
        case ScalarKind::sine: return ClosedFormValue::of(std::asin(std::clamp(w, -1.0, 1.0)));
        case ScalarKind::linear: return ClosedFormValue::of(a == 0.0 ? 0.0 : w / a);
        case ScalarKind::custom_sampled:
            throw std::invalid_argument("closed_form_pinv: sampled operators have no closed form; use the grid oracle");
    }
    return ClosedFormValue::undefined_at();
}

/// Candidate inverse on R^n -> R^m; nullopt marks "undefined at w".
using CandidateInverse = std::function<std::optional<Vec>(std::span<const double>)>;

/// Closed form as a candidate inverse; nonunique values resolve to `sign_choice` times the representative.
inline CandidateInverse closed_form_candidate(const Scalar1DOperator& op, double sign_choice = 1.0) {
    return [op, sign_choice](std::span<const double> w) -> std::optional<Vec> {
        const ClosedFormValue r = closed_form_pinv(op, w[0]);
        switch (r.status) {
            case ClosedFormValue::Status::undefined: return std::nullopt;
            case ClosedFormValue::Status::nonunique: return Vec{sign_choice * r.value};
            case ClosedFormValue::Status::value: return Vec{r.value};
        }
        return std::nullopt;
    };
}

// ---------------------------------------------------------------------------
// Grid oracle

enum class TieRule {
    exact,            // residuals tie only within tie_tol
    grid_resolution,  // a point also ties when T, interpolated across half its grid cell, reaches the best residual
};

struct OracleOptions {
    std::vector<std::pair<double, double>> box;  // one closed interval per axis
    double step = 1e-3;
    double norm_p = 2.0;
    TieRule tie_rule = TieRule::grid_resolution;
    double tie_tol = 1e-12;
    std::optional<double> ball_radius;  // keep only grid points with norm <= radius
    std::size_t max_points = 20'000'000;
};

struct OracleResult {
    Vec v;
    double residual = 0.0;
    double norm = 0.0;
};

/// Deterministic best-approximate-solution search over the lattice step*Z^n intersected with a box.
/// T is evaluated once at construction; queries for different targets reuse the table.
class GridBasOracle {
   public:
    GridBasOracle(const VectorOperator& t, OracleOptions opt) : opt_(std::move(opt)), dim_out_(t.dim_out()) {
        if (!(opt_.step > 0.0)) throw std::invalid_argument("grid oracle: step must be positive");
        if (opt_.box.size() != t.dim_in())
            throw std::invalid_argument("grid oracle: box needs one interval per input dimension");
        const std::size_t n = opt_.box.size();
        lo_.resize(n);
        count_.resize(n);
        std::size_t total = 1;
        for (std::size_t i = 0; i < n; ++i) {
            const auto [a, b] = opt_.box[i];
            if (!(a <= b) || !std::isfinite(a) || !std::isfinite(b))
                throw std::invalid_argument("grid oracle: axis " + std::to_string(i) + " has an invalid interval");
            const double first = std::ceil(a / opt_.step - 1e-9);
            const double last = std::floor(b / opt_.step + 1e-9);
            if (last < first) throw std::invalid_argument("grid oracle: empty grid on axis " + std::to_string(i));
            lo_[i] = static_cast<long long>(first);
            count_[i] = static_cast<std::size_t>(last - first) + 1;
            if (total > opt_.max_points / count_[i]) throw std::invalid_argument("grid oracle: too many grid points");
            total *= count_[i];
        }

        points_.resize(total * n);
        valid_.assign(total, true);
        norms_.resize(total);
        values_.resize(total * dim_out_);
        for (std::size_t idx = 0; idx < total; ++idx) {
            std::size_t rem = idx;
            for (std::size_t i = n; i-- > 0;) {
                points_[idx * n + i] = static_cast<double>(lo_[i] + static_cast<long long>(rem % count_[i])) * opt_.step;
                rem /= count_[i];
            }
            const std::span<const double> p(points_.data() + idx * n, n);
            norms_[idx] = lp_norm(p, opt_.norm_p);
            if (opt_.ball_radius && norms_[idx] > *opt_.ball_radius + 1e-12) {
                valid_[idx] = false;
                continue;
            }
            const Vec tv = t(p);
            std::copy(tv.begin(), tv.end(), values_.begin() + static_cast<std::ptrdiff_t>(idx * dim_out_));
        }
        if (std::find(valid_.begin(), valid_.end(), true) == valid_.end())
            throw std::invalid_argument("grid oracle: no grid point inside the ball");

        stride_.assign(n, 1);
        for (std::size_t i = n; i-- > 1;) stride_[i - 1] = stride_[i] * count_[i];
        if (opt_.tie_rule == TieRule::grid_resolution) measure_segments(t);
    }

    std::size_t size() const noexcept { return valid_.size(); }

    OracleResult query(std::span<const double> w) const {
        if (w.size() != dim_out_) throw std::invalid_argument("grid oracle: target dimension mismatch");
        const std::size_t total = valid_.size(), n = lo_.size();
        std::vector<double> res(total, std::numeric_limits<double>::infinity());
        double best_res = std::numeric_limits<double>::infinity();
        for (std::size_t idx = 0; idx < total; ++idx) {
            if (!valid_[idx]) continue;
            res[idx] = lp_distance(std::span<const double>(values_.data() + idx * dim_out_, dim_out_), w, opt_.norm_p);
            best_res = std::min(best_res, res[idx]);
        }
        std::vector<bool> tied(total, false);
        const double limit = best_res + opt_.tie_tol * (1.0 + best_res);
        for (std::size_t idx = 0; idx < total; ++idx) {
            if (!valid_[idx]) continue;
            tied[idx] = res[idx] <= limit;
            if (tied[idx] || opt_.tie_rule == TieRule::exact) continue;
            for (std::size_t i = 0; i < n && !tied[idx]; ++i) {
                const std::size_t coord = (idx / stride_[i]) % count_[i];
                // the interpolated residual can drop by at most half the jump, so most points are skipped cheaply
                if (coord > 0) {
                    const double jump = jump_[(idx - stride_[i]) * n + i];
                    if (res[idx] - 0.5 * jump <= limit)
                        tied[idx] = half_cell_residual(idx, idx - stride_[i], w) <= limit;
                }
                if (!tied[idx] && coord + 1 < count_[i]) {
                    const double jump = jump_[idx * n + i];
                    if (res[idx] - 0.5 * jump <= limit)
                        tied[idx] = half_cell_residual(idx, idx + stride_[i], w) <= limit;
                }
            }
        }
        auto admissible = [&](std::size_t idx) { return tied[idx]; };
        double best_norm = std::numeric_limits<double>::infinity();
        for (std::size_t idx = 0; idx < total; ++idx)
            if (admissible(idx)) best_norm = std::min(best_norm, norms_[idx]);
        // enumeration order is lexicographic, so the first qualifying point wins remaining ties
        for (std::size_t idx = 0; idx < total; ++idx) {
            if (admissible(idx) && norms_[idx] <= best_norm + opt_.tie_tol * (1.0 + best_norm)) {
                OracleResult r;
                r.v.assign(points_.begin() + static_cast<std::ptrdiff_t>(idx * n),
                           points_.begin() + static_cast<std::ptrdiff_t>((idx + 1) * n));
                r.residual = res[idx];
                r.norm = norms_[idx];
                return r;
            }
        }
        throw std::logic_error("grid oracle: no admissible point");
    }

    const OracleOptions& options() const noexcept { return opt_; }

   private:
    // jump_[idx * n + i] is |T(next) - T(idx)| along axis i, or 0 when that segment is unusable for ties.
    // A segment is unusable when either end is outside the domain or when T fails the midpoint secant test,
    // which is how jumps are kept from passing as ties.
    void measure_segments(const VectorOperator& t) {
        const std::size_t total = valid_.size(), n = lo_.size();
        jump_.assign(total * n, 0.0);
        Vec mid(n), expected(dim_out_);
        for (std::size_t idx = 0; idx < total; ++idx) {
            if (!valid_[idx]) continue;
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t coord = (idx / stride_[i]) % count_[i];
                if (coord + 1 >= count_[i] || !valid_[idx + stride_[i]]) continue;
                const double* ta = values_.data() + idx * dim_out_;
                const double* tb = values_.data() + (idx + stride_[i]) * dim_out_;
                std::copy(points_.begin() + static_cast<std::ptrdiff_t>(idx * n),
                          points_.begin() + static_cast<std::ptrdiff_t>((idx + 1) * n), mid.begin());
                mid[i] += 0.5 * opt_.step;
                const Vec tm = t(mid);
                double dev = 0.0, size = 0.0;
                for (std::size_t k = 0; k < dim_out_; ++k) {
                    expected[k] = tb[k] - ta[k];
                    size = std::max(size, std::abs(expected[k]));
                    dev = std::max(dev, std::abs(tm[k] - ta[k] - 0.5 * expected[k]));
                }
                if (dev <= 0.25 * size) jump_[idx * n + i] = lp_norm(expected, opt_.norm_p);
            }
        }
    }

    // Smallest residual of T(a) + t (T(b) - T(a)) for t in [0, 1/2].
    double half_cell_residual(std::size_t a, std::size_t b, std::span<const double> w) const {
        const double* ta = values_.data() + a * dim_out_;
        const double* tb = values_.data() + b * dim_out_;
        Vec point(dim_out_);
        auto at = [&](double t) {
            for (std::size_t k = 0; k < dim_out_; ++k) point[k] = ta[k] + t * (tb[k] - ta[k]);
            return lp_distance(point, w, opt_.norm_p);
        };
        if (opt_.norm_p == 2.0) {
            double num = 0.0, den = 0.0;
            for (std::size_t k = 0; k < dim_out_; ++k) {
                num += (w[k] - ta[k]) * (tb[k] - ta[k]);
                den += (tb[k] - ta[k]) * (tb[k] - ta[k]);
            }
            return at(den > 0.0 ? std::clamp(num / den, 0.0, 0.5) : 0.0);
        }
        double best = at(0.0);
        for (int j = 1; j <= 16; ++j) best = std::min(best, at(j / 32.0));
        return best;
    }

    OracleOptions opt_;
    std::size_t dim_out_;
    std::vector<long long> lo_;
    std::vector<std::size_t> count_;
    std::vector<double> points_;
    std::vector<bool> valid_;
    std::vector<double> norms_;
    std::vector<double> values_;
    std::vector<std::size_t> stride_;
    std::vector<double> jump_;
};

inline OracleResult grid_bas_oracle(const VectorOperator& t, std::span<const double> w, const OracleOptions& opt) {
    return GridBasOracle(t, opt).query(w);
}

// ---------------------------------------------------------------------------
// Verification against the oracle

struct PseudoInverseReport {
    Vec w;
    bool defined = false;  // candidate returned a value
    Vec candidate;
    double residual = 0.0;
    double norm = 0.0;
    double mp1_residual = 0.0;
    double mp2_residual = 0.0;
    Vec oracle_v;
    double oracle_residual = 0.0;
    double oracle_norm = 0.0;
    double argument_gap = 0.0;  // max-norm distance between candidate and oracle point
    bool bas_ok = false;
    bool mp1_ok = false;
    bool mp2_ok = false;
};

struct CheckOptions {
    OracleOptions oracle;
    double residual_tol = 1e-9;
    double mp_tol = 1e-9;
    double norm_slack_steps = 2.0;
};

/// For each sample w: axioms at the candidate and a comparison with the grid oracle.
/// BAS passes when the candidate's residual is no worse than the oracle's and its norm exceeds the
/// oracle's by at most norm_slack_steps grid steps (scaled by the dimension for p-norms).
inline std::vector<PseudoInverseReport> check_pseudo_inverse(const VectorOperator& t, const CandidateInverse& g,
                                                             const std::vector<Vec>& samples, const CheckOptions& opt,
                                                             const GridBasOracle* shared_oracle = nullptr) {
    std::optional<GridBasOracle> own;
    if (!shared_oracle) {
        own.emplace(t, opt.oracle);
        shared_oracle = &*own;
    }
    const double p = shared_oracle->options().norm_p;
    const double dim_factor = std::isinf(p) ? 1.0 : std::pow(static_cast<double>(t.dim_in()), 1.0 / p);
    const double norm_slack = opt.norm_slack_steps * shared_oracle->options().step * dim_factor;
    constexpr double kInf = std::numeric_limits<double>::infinity();

    std::vector<PseudoInverseReport> out;
    for (const Vec& w : samples) {
        PseudoInverseReport r;
        r.w = w;
        const OracleResult o = shared_oracle->query(w);
        r.oracle_v = o.v;
        r.oracle_residual = o.residual;
        r.oracle_norm = o.norm;
        const auto v = g(w);
        if (!v) {
            out.push_back(std::move(r));
            continue;
        }
        r.defined = true;
        r.candidate = *v;
        const Vec tv = t(*v);
        r.residual = lp_distance(tv, w, p);
        r.norm = lp_norm(*v, p);
        r.argument_gap = lp_distance(*v, o.v, kInf);

        const auto gtv = g(tv);
        r.mp1_residual = gtv ? lp_distance(t(*gtv), tv, p) : kInf;
        r.mp2_residual = gtv ? lp_distance(*gtv, *v, p) : kInf;  // G T G(w) vs G(w)
        r.mp1_ok = r.mp1_residual <= opt.mp_tol * (1.0 + lp_norm(tv, p));
        r.mp2_ok = r.mp2_residual <= opt.mp_tol * (1.0 + r.norm);
        r.bas_ok = r.residual <= r.oracle_residual + opt.residual_tol && r.norm <= r.oracle_norm + norm_slack;
        out.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Expanding domains

struct ExpandingDomainResult {
    std::vector<Vec> per_radius;  // oracle value on each ball
    bool stabilized = false;
    std::optional<std::size_t> stable_from;  // first radius index of the stable run
    Vec value;                               // value at the last radius
};

/// Grid-oracle pseudo-inverse on the balls of `radii`; stabilized once `window` consecutive radii
/// give values within 2 grid steps of each other.
inline ExpandingDomainResult expanding_domain_pinv(const VectorOperator& t, std::span<const double> w,
                                                   const std::vector<double>& radii, std::size_t window,
                                                   double step = 1e-3, double norm_p = 2.0) {
    if (radii.empty()) throw std::invalid_argument("expanding_domain_pinv: empty radius schedule");
    if (window == 0) throw std::invalid_argument("expanding_domain_pinv: window must be positive");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] > radii[i - 1])) throw std::invalid_argument("expanding_domain_pinv: radii must increase");
    ExpandingDomainResult out;
    std::size_t run = 0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        OracleOptions opt;
        opt.box.assign(t.dim_in(), {-radii[i], radii[i]});
        opt.step = step;
        opt.norm_p = norm_p;
        opt.ball_radius = radii[i];
        out.per_radius.push_back(grid_bas_oracle(t, w, opt).v);
        const bool same = i > 0 && lp_distance(out.per_radius[i], out.per_radius[i - 1],
                                               std::numeric_limits<double>::infinity()) <= 2 * step;
        run = same ? run + 1 : 1;
        if (run >= window && !out.stabilized) {
            out.stabilized = true;
            out.stable_from = i + 1 - run;
        }
        if (!same && out.stabilized) {
            out.stabilized = false;
            out.stable_from.reset();
        }
    }
    out.value = out.per_radius.back();
    return out;
}

// ---------------------------------------------------------------------------
// Finite point sets: exact BAS analysis

/// T on finite sets embedded in normed spaces: domain elements carry norms, codomain elements
/// carry coordinates (distances measured in the Euclidean norm).
struct FiniteBasProblem {
    FiniteOperator op;
    Vec domain_norms;
    std::vector<Vec> codomain_points;
};

/// For each codomain id: every domain id allowed by BAS (nearest image point first, then minimal norm).
inline std::vector<std::vector<Id>> finite_bas_candidates(const FiniteBasProblem& pb, double tol = 1e-12) {
    const auto& t = pb.op;
    if (pb.domain_norms.size() != t.domain_size() || pb.codomain_points.size() != t.codomain_size())
        throw std::invalid_argument("finite_bas_candidates: norm or point list size mismatch");
    std::vector<std::vector<Id>> out(t.codomain_size());
    for (std::size_t w = 0; w < t.codomain_size(); ++w) {
        double best_res = std::numeric_limits<double>::infinity();
        for (Id img : t.table()) best_res = std::min(best_res, distance(pb.codomain_points[img], pb.codomain_points[w]));
        double best_norm = std::numeric_limits<double>::infinity();
        for (std::size_t v = 0; v < t.domain_size(); ++v)
            if (distance(pb.codomain_points[t.table()[v]], pb.codomain_points[w]) <= best_res + tol)
                best_norm = std::min(best_norm, pb.domain_norms[v]);
        for (std::size_t v = 0; v < t.domain_size(); ++v)
            if (distance(pb.codomain_points[t.table()[v]], pb.codomain_points[w]) <= best_res + tol &&
                pb.domain_norms[v] <= best_norm + tol)
                out[w].push_back(static_cast<Id>(v));
    }
    return out;
}

inline bool satisfies_bas(const FiniteBasProblem& pb, const FiniteOperator& g) {
    const auto cand = finite_bas_candidates(pb);
    for (std::size_t w = 0; w < cand.size(); ++w)
        if (std::find(cand[w].begin(), cand[w].end(), g.table()[w]) == cand[w].end()) return false;
    return true;
}

/// All maps satisfying BAS and G T G = G (capped at 10^6 BAS-admissible tables).
inline std::vector<FiniteOperator> finite_pseudo_inverses(const FiniteBasProblem& pb) {
    const auto cand = finite_bas_candidates(pb);
    double combos = 1.0;
    for (const auto& c : cand) combos *= static_cast<double>(c.size());
    if (combos > 1e6) throw std::invalid_argument("finite_pseudo_inverses: too many BAS-admissible tables");
    std::vector<FiniteOperator> out;
    std::vector<std::size_t> digit(cand.size(), 0);
    for (;;) {
        std::vector<Id> table(cand.size());
        for (std::size_t w = 0; w < cand.size(); ++w) table[w] = cand[w][digit[w]];
        FiniteOperator g(pb.op.domain_size(), std::move(table));
        if (compose(g, compose(pb.op, g)) == g) out.push_back(std::move(g));
        std::size_t pos = cand.size();
        while (pos > 0 && ++digit[pos - 1] == cand[pos - 1].size()) digit[--pos] = 0;
        if (pos == 0) break;
    }
    return out;
}

}  // namespace geninv
