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
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "numerics.hpp"

namespace geninv {

/// minimize ||v||^2 subject to eq_rows[i] . v = eq_rhs[i] and ineq_rows[j] . v <= ineq_rhs[j].
struct LeastNormQP {
    std::size_t dim = 0;
    std::vector<Vec> eq_rows;
    Vec eq_rhs;
    std::vector<Vec> ineq_rows;
    Vec ineq_rhs;

    void validate() const {
        if (eq_rows.size() != eq_rhs.size() || ineq_rows.size() != ineq_rhs.size())
            throw std::invalid_argument("least-norm QP: row and right-hand-side counts differ");
        for (const auto* rows : {&eq_rows, &ineq_rows})
            for (const Vec& r : *rows) {
                if (r.size() != dim) throw std::invalid_argument("least-norm QP: constraint row has wrong dimension");
                for (double x : r)
                    if (!std::isfinite(x)) throw std::invalid_argument("least-norm QP: non-finite coefficient");
            }
    }
};

enum class QpStatus { optimal, infeasible, iteration_limit };

struct KktResiduals {
    double stationarity = 0.0;     // || v + E^T lambda + C^T mu ||
    double primal = 0.0;           // worst equality or inequality violation
    double dual = 0.0;             // most negative inequality multiplier (as a positive number)
    double complementarity = 0.0;  // max |mu_j (C v - d)_j|
    double max() const { return std::max({stationarity, primal, dual, complementarity}); }
};

struct QpResult {
    QpStatus status = QpStatus::infeasible;
    Vec v;
    Vec eq_multipliers;
    Vec ineq_multipliers;
    std::vector<std::size_t> active;  // indices of inequalities in the final working set
    int iterations = 0;
    KktResiduals kkt;
};

inline KktResiduals kkt_residuals(const LeastNormQP& qp, const Vec& v, const Vec& lambda, const Vec& mu) {
    KktResiduals k;
    Vec g = v;
    for (std::size_t i = 0; i < qp.eq_rows.size(); ++i)
        for (std::size_t c = 0; c < qp.dim; ++c) g[c] += lambda[i] * qp.eq_rows[i][c];
    for (std::size_t j = 0; j < qp.ineq_rows.size(); ++j)
        for (std::size_t c = 0; c < qp.dim; ++c) g[c] += mu[j] * qp.ineq_rows[j][c];
    k.stationarity = norm2(g);
    for (std::size_t i = 0; i < qp.eq_rows.size(); ++i)
        k.primal = std::max(k.primal, std::abs(dot(qp.eq_rows[i], v) - qp.eq_rhs[i]));
    for (std::size_t j = 0; j < qp.ineq_rows.size(); ++j) {
        const double slack = dot(qp.ineq_rows[j], v) - qp.ineq_rhs[j];
        k.primal = std::max(k.primal, slack);
        k.dual = std::max(k.dual, -mu[j]);
        k.complementarity = std::max(k.complementarity, std::abs(mu[j] * slack));
    }
    return k;
}

namespace detail {

// Working-set constraint in the form n . x >= b (equalities use n . x = b).
struct WorkingRow {
    Vec normal;
    double rhs;
    bool equality;
    std::size_t source;  // index into the originating list
};

// (N N^T)^{-1} N y for the working normals N; nullopt if N N^T is singular.
inline std::optional<Vec> gram_solve(const std::vector<WorkingRow>& rows, const Vec& y) {
    const std::size_t k = rows.size();
    DenseMatrix g(k, k);
    Vec rhs(k);
    for (std::size_t i = 0; i < k; ++i) {
        rhs[i] = dot(rows[i].normal, y);
        for (std::size_t j = 0; j < k; ++j) g(i, j) = dot(rows[i].normal, rows[j].normal);
    }
    if (k == 0) return Vec{};
    return solve_linear(std::move(g), std::move(rhs), 1e-12);
}

}  // namespace detail

/// Dual active-set solver (Goldfarb-Idnani with identity Hessian). Starts from the least-norm point of the
/// equalities and repeatedly adds the lowest-index violated inequality, dropping working inequalities whose
/// multipliers reach zero along the way.
inline QpResult solve_least_norm_qp(const LeastNormQP& qp, double tol = 1e-9, int max_iterations = 500) {
    qp.validate();
    const std::size_t n = qp.dim;
    QpResult out;
    std::vector<detail::WorkingRow> work;
    Vec u;  // multipliers of `work`, in the n . x >= b convention

    // Independent equalities enter the working set; dependent ones must be consistent at the end.
    for (std::size_t i = 0; i < qp.eq_rows.size(); ++i) {
        Vec resid = qp.eq_rows[i];
        const double scale = norm2(resid);
        if (scale == 0.0) {
            if (std::abs(qp.eq_rhs[i]) > tol) return out;
            continue;
        }
        for (int pass = 0; pass < 2; ++pass) {
            if (work.empty()) break;
            const auto coef = detail::gram_solve(work, resid);
            if (!coef) break;
            for (std::size_t r = 0; r < work.size(); ++r)
                for (std::size_t c = 0; c < n; ++c) resid[c] -= (*coef)[r] * work[r].normal[c];
        }
        if (norm2(resid) > 1e-10 * scale) work.push_back({qp.eq_rows[i], qp.eq_rhs[i], true, i});
    }
    Vec x(n, 0.0);
    {
        Vec b(work.size());
        DenseMatrix g(work.size(), work.size());
        for (std::size_t i = 0; i < work.size(); ++i) {
            b[i] = work[i].rhs;
            for (std::size_t j = 0; j < work.size(); ++j) g(i, j) = dot(work[i].normal, work[j].normal);
        }
        u = work.empty() ? Vec{} : solve_linear(g, b, 1e-14).value_or(Vec(work.size(), 0.0));
        for (std::size_t r = 0; r < work.size(); ++r)
            for (std::size_t c = 0; c < n; ++c) x[c] += u[r] * work[r].normal[c];
    }
    for (std::size_t i = 0; i < qp.eq_rows.size(); ++i)
        if (std::abs(dot(qp.eq_rows[i], x) - qp.eq_rhs[i]) > tol * (1.0 + std::abs(qp.eq_rhs[i]))) return out;

    const double inf = std::numeric_limits<double>::infinity();
    constexpr double kViolationTol = 1e-12;
    for (;;) {
        // lowest-index violated inequality
        std::optional<std::size_t> p;
        for (std::size_t j = 0; j < qp.ineq_rows.size(); ++j) {
            const bool working = std::any_of(work.begin(), work.end(),
                                             [&](const auto& r) { return !r.equality && r.source == j; });
            if (working) continue;
            const double scale = 1.0 + std::abs(qp.ineq_rhs[j]) + norm2(qp.ineq_rows[j]) * norm2(x);
            if (dot(qp.ineq_rows[j], x) - qp.ineq_rhs[j] > kViolationTol * scale) {
                p = j;
                break;
            }
        }
        if (!p) break;

        Vec np(n);
        for (std::size_t c = 0; c < n; ++c) np[c] = -qp.ineq_rows[*p][c];
        const double bp = -qp.ineq_rhs[*p];
        double up = 0.0;
        bool added = false;
        while (!added) {
            if (++out.iterations > max_iterations) {
                out.status = QpStatus::iteration_limit;
                out.v = x;
                return out;
            }
            const auto r = detail::gram_solve(work, np).value_or(Vec(work.size(), 0.0));
            Vec z = np;
            for (std::size_t k = 0; k < work.size(); ++k)
                for (std::size_t c = 0; c < n; ++c) z[c] -= r[k] * work[k].normal[c];
            const double zz = dot(z, z);
            const bool z_zero = zz <= 1e-20 * (1.0 + dot(np, np));

            double t_partial = inf;
            std::optional<std::size_t> drop;
            for (std::size_t k = 0; k < work.size(); ++k)
                if (!work[k].equality && r[k] > 1e-14 && u[k] / r[k] < t_partial) {
                    t_partial = u[k] / r[k];
                    drop = k;
                }
            const double s = dot(np, x) - bp;  // negative while violated
            const double t_full = z_zero ? inf : -s / dot(z, np);
            if (z_zero && !drop) return out;  // infeasible

            const double t = std::min(t_partial, t_full);
            if (!z_zero)
                for (std::size_t c = 0; c < n; ++c) x[c] += t * z[c];
            for (std::size_t k = 0; k < work.size(); ++k) u[k] -= t * r[k];
            up += t;
            if (t_full <= t_partial) {
                work.push_back({np, bp, false, *p});
                u.push_back(up);
                added = true;
            } else {
                work.erase(work.begin() + static_cast<std::ptrdiff_t>(*drop));
                u.erase(u.begin() + static_cast<std::ptrdiff_t>(*drop));
            }
        }
    }

    // Polish: re-solve the final working set as equalities so working constraints are tight to rounding.
    if (!work.empty()) {
        DenseMatrix g(work.size(), work.size());
        Vec b(work.size());
        for (std::size_t i = 0; i < work.size(); ++i) {
            b[i] = work[i].rhs;
            for (std::size_t j = 0; j < work.size(); ++j) g(i, j) = dot(work[i].normal, work[j].normal);
        }
        if (auto polished = solve_linear(std::move(g), std::move(b), 1e-14)) {
            Vec px(n, 0.0);
            for (std::size_t k = 0; k < work.size(); ++k)
                for (std::size_t c = 0; c < n; ++c) px[c] += (*polished)[k] * work[k].normal[c];
            if (distance(px, x) <= 1e-6 * (1.0 + norm2(x))) {
                x = std::move(px);
                u = std::move(*polished);
            }
        }
    }

    out.status = QpStatus::optimal;
    out.v = x;
    out.eq_multipliers.assign(qp.eq_rows.size(), 0.0);
    out.ineq_multipliers.assign(qp.ineq_rows.size(), 0.0);
    for (std::size_t k = 0; k < work.size(); ++k) {
        if (work[k].equality) {
            out.eq_multipliers[work[k].source] = -u[k];
        } else {
            out.ineq_multipliers[work[k].source] = u[k];
            out.active.push_back(work[k].source);
        }
    }
    std::sort(out.active.begin(), out.active.end());
    out.kkt = kkt_residuals(qp, out.v, out.eq_multipliers, out.ineq_multipliers);
    return out;
}

}  // namespace geninv
