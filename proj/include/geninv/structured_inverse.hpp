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
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "core_ops.hpp"
#include "least_norm_qp.hpp"
#include "numerics.hpp"
#include "pseudo_inverse.hpp"

namespace geninv {

/// Nonempty closed convex subset of R^n with an exact Euclidean projection.
class ConvexSet {
   public:
    enum class Kind { box, ball, halfspace, intersection };

    /// Componentwise bounds; infinite bounds are allowed.
    static ConvexSet box(Vec lo, Vec hi) {
        if (lo.size() != hi.size()) throw std::invalid_argument("box: bound lengths differ");
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (std::isnan(lo[i]) || std::isnan(hi[i]) || lo[i] > hi[i] || lo[i] == kInf || hi[i] == -kInf)
                throw std::invalid_argument("box: empty interval on axis " + std::to_string(i));
        ConvexSet c(Kind::box, lo.size());
        c.lo_ = std::move(lo);
        c.hi_ = std::move(hi);
        return c;
    }

    static ConvexSet nonnegative_orthant(std::size_t n) { return box(Vec(n, 0.0), Vec(n, kInf)); }

    static ConvexSet ball(Vec center, double radius) {
        if (!(radius >= 0.0) || !std::isfinite(radius)) throw std::invalid_argument("ball: radius must be >= 0");
        for (double x : center)
            if (!std::isfinite(x)) throw std::invalid_argument("ball: center must be finite");
        ConvexSet c(Kind::ball, center.size());
        c.center_ = std::move(center);
        c.radius_ = radius;
        return c;
    }

    /// { x : normal . x <= offset }.
    static ConvexSet halfspace(Vec normal, double offset) {
        if (norm2(normal) == 0.0 || !std::isfinite(norm2(normal)) || !std::isfinite(offset))
            throw std::invalid_argument("halfspace: normal must be finite and nonzero");
        ConvexSet c(Kind::halfspace, normal.size());
        c.normal_ = std::move(normal);
        c.offset_ = offset;
        return c;
    }

    /// Intersection of the parts; `feasible_point` certifies nonemptiness.
    static ConvexSet intersection(std::vector<ConvexSet> parts, Vec feasible_point) {
        if (parts.empty()) throw std::invalid_argument("intersection: no parts");
        for (const auto& p : parts) {
            if (p.dim() != parts.front().dim()) throw std::invalid_argument("intersection: dimension mismatch");
            if (feasible_point.size() != p.dim() || !p.contains(feasible_point, 1e-9))
                throw std::invalid_argument("intersection: the supplied point is not in every part");
        }
        ConvexSet c(Kind::intersection, parts.front().dim());
        c.parts_ = std::move(parts);
        c.center_ = std::move(feasible_point);
        return c;
    }

    Kind kind() const noexcept { return kind_; }
    std::size_t dim() const noexcept { return dim_; }
    const Vec& lo() const noexcept { return lo_; }
    const Vec& hi() const noexcept { return hi_; }
    const Vec& center() const noexcept { return center_; }
    double radius() const noexcept { return radius_; }
    const Vec& normal() const noexcept { return normal_; }
    double offset() const noexcept { return offset_; }
    const std::vector<ConvexSet>& parts() const noexcept { return parts_; }

    bool contains(std::span<const double> x, double tol = 1e-10) const {
        check_dim(x);
        switch (kind_) {
            case Kind::box:
                for (std::size_t i = 0; i < dim_; ++i)
                    if (x[i] < lo_[i] - tol || x[i] > hi_[i] + tol) return false;
                return true;
            case Kind::ball: return distance(x, center_) <= radius_ + tol;
            case Kind::halfspace: return dot(normal_, x) <= offset_ + tol * norm2(normal_);
            case Kind::intersection:
                return std::all_of(parts_.begin(), parts_.end(), [&](const auto& p) { return p.contains(x, tol); });
        }
        return false;
    }

    /// Nearest point of the set. Intersections use Dykstra's method (tolerance 1e-10, at most 10^4 cycles).
    Vec project(std::span<const double> x) const {
        check_dim(x);
        Vec y(x.begin(), x.end());
        switch (kind_) {
            case Kind::box:
                for (std::size_t i = 0; i < dim_; ++i) y[i] = std::clamp(y[i], lo_[i], hi_[i]);
                return y;
            case Kind::ball: {
                const double d = distance(x, center_);
                if (d <= radius_) return y;
                for (std::size_t i = 0; i < dim_; ++i) y[i] = center_[i] + (x[i] - center_[i]) * (radius_ / d);
                return y;
            }
            case Kind::halfspace: {
                const double excess = dot(normal_, x) - offset_;
                if (excess <= 0.0) return y;
                const double s = excess / dot(normal_, normal_);
                for (std::size_t i = 0; i < dim_; ++i) y[i] -= s * normal_[i];
                return y;
            }
            case Kind::intersection: return dykstra(x);
        }
        return y;
    }

    VectorOperator as_operator() const {
        return VectorOperator(dim_, dim_, [c = *this](std::span<const double> v) { return c.project(v); });
    }

   private:
    static constexpr double kInf = std::numeric_limits<double>::infinity();

    ConvexSet(Kind k, std::size_t dim) : kind_(k), dim_(dim) {}

    void check_dim(std::span<const double> x) const {
        if (x.size() != dim_)
            throw std::invalid_argument("convex set: expected dimension " + std::to_string(dim_) + ", got " +
                                        std::to_string(x.size()));
    }

    Vec dykstra(std::span<const double> x) const {
        constexpr double kTol = 1e-10;
        constexpr int kMaxCycles = 10000;
        Vec cur(x.begin(), x.end());
        std::vector<Vec> incr(parts_.size(), Vec(dim_, 0.0));
        for (int cycle = 0; cycle < kMaxCycles; ++cycle) {
            const Vec before = cur;
            double incr_change = 0.0;
            for (std::size_t k = 0; k < parts_.size(); ++k) {
                Vec shifted = cur;
                for (std::size_t i = 0; i < dim_; ++i) shifted[i] += incr[k][i];
                Vec next = parts_[k].project(shifted);
                for (std::size_t i = 0; i < dim_; ++i) {
                    const double updated = shifted[i] - next[i];
                    incr_change = std::max(incr_change, std::abs(updated - incr[k][i]));
                    incr[k][i] = updated;
                }
                cur = std::move(next);
            }
            if (distance(cur, before) <= kTol && incr_change <= kTol && contains(cur, kTol)) return cur;
        }
        throw convergence_error("intersection projection did not converge within 10^4 cycles");
    }

    Kind kind_;
    std::size_t dim_;
    Vec lo_, hi_;
    Vec center_;  // ball center, or the feasible point of an intersection
    double radius_ = 0.0;
    Vec normal_;
    double offset_ = 0.0;
    std::vector<ConvexSet> parts_;
};

namespace detail {

inline Vec gaussian_point(std::mt19937_64& rng, std::size_t n, double scale) {
    std::normal_distribution<double> g(0.0, scale);
    Vec v(n);
    for (double& x : v) x = g(rng);
    return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Projection cascades

/// P = P_{C_n} o ... o P_{C_1} for sets listed outermost first.
inline VectorOperator cascade_operator(const std::vector<ConvexSet>& sets) {
    if (sets.empty()) throw std::invalid_argument("cascade: no sets");
    return VectorOperator(sets.front().dim(), sets.front().dim(), [sets](std::span<const double> v) {
        Vec x(v.begin(), v.end());
        for (const auto& c : sets) x = c.project(x);
        return x;
    });
}

/// The iterates u_0 = v, u_j = P_{C_j}(u_{j-1}).
inline std::vector<Vec> cascade_trace(const std::vector<ConvexSet>& sets, std::span<const double> v) {
    std::vector<Vec> out{Vec(v.begin(), v.end())};
    for (const auto& c : sets) out.push_back(c.project(out.back()));
    return out;
}

struct CascadeInverse {
    VectorOperator cascade;  // the composed projections
    ConvexSet innermost;
    VectorOperator inverse;  // projection onto the innermost set
};

/// Pseudo-inverse of a projection cascade over nested sets C_1 >= ... >= C_n containing 0.
/// Nesting is spot-checked on `probes` sampled points of each inner set.
inline CascadeInverse cascade_pinv(const std::vector<ConvexSet>& sets, std::uint64_t seed = 0, std::size_t probes = 200) {
    if (sets.empty()) throw std::invalid_argument("cascade_pinv: no sets");
    const std::size_t n = sets.front().dim();
    for (const auto& c : sets)
        if (c.dim() != n) throw std::invalid_argument("cascade_pinv: dimension mismatch");
    const Vec zero(n, 0.0);
    if (!sets.back().contains(zero)) throw std::invalid_argument("cascade_pinv: innermost set does not contain 0");
    std::mt19937_64 rng(seed);
    for (std::size_t j = 1; j < sets.size(); ++j)
        for (std::size_t k = 0; k < probes; ++k) {
            const Vec inner = sets[j].project(detail::gaussian_point(rng, n, 1.0 + static_cast<double>(k % 10)));
            if (!sets[j - 1].contains(inner, 1e-9))
                throw std::invalid_argument("cascade_pinv: set " + std::to_string(j + 1) + " is not inside set " +
                                            std::to_string(j));
        }
    return {cascade_operator(sets), sets.back(), sets.back().as_operator()};
}

// ---------------------------------------------------------------------------
// Combinators

struct InversePair {
    VectorOperator op;
    CandidateInverse inverse;
};

struct AxiomResiduals {
    double mp1 = 0.0;  // max over probes of ||T G T(v) - T(v)||
    double mp2 = 0.0;  // max over probes of ||G T G(w) - G(w)||
};

/// MP1 on domain probes and MP2 on codomain probes. Undefined values count as infinite residuals.
inline AxiomResiduals axiom_residuals(const InversePair& pair, const std::vector<Vec>& domain_probes,
                                      const std::vector<Vec>& codomain_probes) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    AxiomResiduals r;
    for (const Vec& v : domain_probes) {
        const Vec tv = pair.op(v);
        const auto g = pair.inverse(tv);
        r.mp1 = std::max(r.mp1, g ? distance(pair.op(*g), tv) : kInf);
    }
    for (const Vec& w : codomain_probes) {
        const auto g = pair.inverse(w);
        if (!g) continue;
        const auto gtg = pair.inverse(pair.op(*g));
        r.mp2 = std::max(r.mp2, gtg ? distance(*gtg, *g) : kInf);
    }
    return r;
}

/// Componentwise inverse of the product operator. Each part is checked on its own probes first.
inline InversePair product_inverse(const std::vector<InversePair>& parts,
                                   const std::vector<std::vector<Vec>>& domain_probes,
                                   const std::vector<std::vector<Vec>>& codomain_probes, double tol = 1e-9) {
    if (parts.empty()) throw std::invalid_argument("product_inverse: no parts");
    if (domain_probes.size() != parts.size() || codomain_probes.size() != parts.size())
        throw std::invalid_argument("product_inverse: need one probe list per part");
    std::size_t din = 0, dout = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto r = axiom_residuals(parts[i], domain_probes[i], codomain_probes[i]);
        if (!(r.mp1 <= tol) || !(r.mp2 <= tol))
            throw std::invalid_argument("product_inverse: part " + std::to_string(i) + " fails its axiom checks");
        din += parts[i].op.dim_in();
        dout += parts[i].op.dim_out();
    }
    VectorOperator op(din, dout, [parts](std::span<const double> v) {
        Vec out;
        std::size_t at = 0;
        for (const auto& p : parts) {
            const Vec piece = p.op(v.subspan(at, p.op.dim_in()));
            out.insert(out.end(), piece.begin(), piece.end());
            at += p.op.dim_in();
        }
        return out;
    });
    CandidateInverse inv = [parts](std::span<const double> w) -> std::optional<Vec> {
        Vec out;
        std::size_t at = 0;
        for (const auto& p : parts) {
            const auto piece = p.inverse(w.subspan(at, p.op.dim_out()));
            if (!piece) return std::nullopt;
            out.insert(out.end(), piece->begin(), piece->end());
            at += p.op.dim_out();
        }
        return out;
    };
    return {std::move(op), std::move(inv)};
}

struct Bijection {
    VectorOperator forward;
    VectorOperator backward;
};

/// Round trip backward(forward(x)) = x on `probes`, and forward(backward(y)) = y on their images.
inline bool check_bijection(const Bijection& b, const std::vector<Vec>& probes, double tol = 1e-9) {
    for (const Vec& x : probes) {
        const Vec y = b.forward(x);
        if (distance(b.backward(y), x) > tol * (1.0 + norm2(x))) return false;
        if (distance(b.forward(b.backward(y)), y) > tol * (1.0 + norm2(y))) return false;
    }
    return true;
}

/// Inverse of S1 o T o S2 as S2^{-1} o G o S1^{-1}. `outer_probes` lie in the codomain of T, `inner_probes`
/// in the domain of S2.
inline InversePair sandwich_inverse(const Bijection& s1, const InversePair& t, const Bijection& s2,
                                    const std::vector<Vec>& outer_probes, const std::vector<Vec>& inner_probes) {
    if (s1.forward.dim_in() != t.op.dim_out() || s2.forward.dim_out() != t.op.dim_in())
        throw std::invalid_argument("sandwich_inverse: dimension mismatch");
    if (!check_bijection(s1, outer_probes)) throw std::invalid_argument("sandwich_inverse: outer bijection round trip fails");
    if (!check_bijection(s2, inner_probes)) throw std::invalid_argument("sandwich_inverse: inner bijection round trip fails");
    VectorOperator op = compose(s1.forward, compose(t.op, s2.forward));
    CandidateInverse inv = [s1, t, s2](std::span<const double> w) -> std::optional<Vec> {
        const auto g = t.inverse(s1.backward(w));
        if (!g) return std::nullopt;
        return s2.backward(*g);
    };
    return {std::move(op), std::move(inv)};
}

/// Inverse of v -> a T(b v) + w0, namely w -> G((w - w0) / a) / b.
inline InversePair affine_inverse(const InversePair& t, double a, double b, const Vec& w0) {
    if (a == 0.0 || b == 0.0 || !std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("affine_inverse: scale factors must be finite and nonzero");
    if (w0.size() != t.op.dim_out()) throw std::invalid_argument("affine_inverse: offset dimension mismatch");
    const std::size_t m = t.op.dim_out(), n = t.op.dim_in();
    Bijection s1{VectorOperator(m, m,
                                [a, w0](std::span<const double> w) {
                                    Vec y(w.size());
                                    for (std::size_t i = 0; i < w.size(); ++i) y[i] = a * w[i] + w0[i];
                                    return y;
                                }),
                 VectorOperator(m, m, [a, w0](std::span<const double> w) {
                     Vec y(w.size());
                     for (std::size_t i = 0; i < w.size(); ++i) y[i] = (w[i] - w0[i]) / a;
                     return y;
                 })};
    Bijection s2{scale(b, VectorOperator::identity(n)), scale(1.0 / b, VectorOperator::identity(n))};
    return sandwich_inverse(s1, t, s2, {Vec(m, 0.0), Vec(m, 1.0)}, {Vec(n, 0.0), Vec(n, 1.0)});
}

// ---------------------------------------------------------------------------
// Projection applied after an operator

/// A point of C together with a claimed source under T.
struct SourceCertificate {
    Vec point;
    Vec source;
};

/// Spot check of the contract C subset of T(V).
inline void certify_subset_of_image(const VectorOperator& t, const ConvexSet& c,
                                    const std::vector<SourceCertificate>& certs, double tol = 1e-8) {
    if (certs.empty()) throw std::invalid_argument("projection_after_operator: no source certificates supplied");
    for (std::size_t i = 0; i < certs.size(); ++i) {
        if (!c.contains(certs[i].point, tol))
            throw std::invalid_argument("projection_after_operator: certificate " + std::to_string(i) + " lies outside C");
        if (distance(t(certs[i].source), certs[i].point) > tol * (1.0 + norm2(certs[i].point)))
            throw std::invalid_argument("projection_after_operator: certificate " + std::to_string(i) +
                                        " source does not map to its point");
    }
}

/// Grid search version: targets outside C are replaced by their projection, then the grid oracle of
/// P_C o T selects the least-norm point among the best matches.
inline InversePair projection_after_operator_pinv(const VectorOperator& t, const ConvexSet& c,
                                                  const std::vector<SourceCertificate>& certs,
                                                  const OracleOptions& grid) {
    if (c.dim() != t.dim_out()) throw std::invalid_argument("projection_after_operator: dimension mismatch");
    certify_subset_of_image(t, c, certs);
    VectorOperator composite = compose(c.as_operator(), t);
    auto oracle = std::make_shared<GridBasOracle>(composite, grid);
    CandidateInverse inv = [c, oracle](std::span<const double> w) -> std::optional<Vec> {
        const Vec target = c.contains(w, 0.0) ? Vec(w.begin(), w.end()) : c.project(w);
        return oracle->query(target).v;
    };
    return {std::move(composite), std::move(inv)};
}

/// Least-norm v with P_B(A v) = target for a target inside the box B = [lo, hi]:
/// interior components become equalities, components on an upper (lower) face become
/// (A v)_i >= hi_i ((A v)_i <= lo_i), and degenerate intervals impose nothing.
inline QpResult least_norm_box_preimage(const DenseMatrix& a, const Vec& lo, const Vec& hi, const Vec& target,
                                        double tol = 1e-9) {
    const std::size_t m = a.rows();
    if (lo.size() != m || hi.size() != m || target.size() != m)
        throw std::invalid_argument("least_norm_box_preimage: dimension mismatch");
    LeastNormQP qp;
    qp.dim = a.cols();
    for (std::size_t i = 0; i < m; ++i) {
        const Vec row(a.row(i).begin(), a.row(i).end());
        if (target[i] < lo[i] || target[i] > hi[i])
            throw std::invalid_argument("least_norm_box_preimage: target outside the box");
        if (lo[i] == hi[i]) continue;
        if (target[i] == hi[i]) {
            Vec neg = row;
            for (double& x : neg) x = -x;
            qp.ineq_rows.push_back(std::move(neg));
            qp.ineq_rhs.push_back(-hi[i]);
        } else if (target[i] == lo[i]) {
            qp.ineq_rows.push_back(row);
            qp.ineq_rhs.push_back(lo[i]);
        } else {
            qp.eq_rows.push_back(row);
            qp.eq_rhs.push_back(target[i]);
        }
    }
    return solve_least_norm_qp(qp, tol);
}

/// Linear T = A with a box C: value of the pseudo-inverse of P_C o A at w, via the constrained program.
inline QpResult projection_after_linear_pinv(const DenseMatrix& a, const ConvexSet& box, std::span<const double> w) {
    if (box.kind() != ConvexSet::Kind::box) throw std::invalid_argument("projection_after_linear_pinv: C must be a box");
    if (box.dim() != a.rows()) throw std::invalid_argument("projection_after_linear_pinv: dimension mismatch");
    return least_norm_box_preimage(a, box.lo(), box.hi(), box.project(w));
}

}  // namespace geninv
