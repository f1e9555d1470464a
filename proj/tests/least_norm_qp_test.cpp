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

#include <gtest/gtest.h>

#include <random>

#include "geninv/least_norm_qp.hpp"

using namespace geninv;

namespace {

// Reference solver: the optimum is the least-norm point of the constraints that are tight at it,
// so it is the smallest feasible least-norm point over all subsets of inequalities taken as equalities.
std::optional<Vec> enumerate_active_sets(const LeastNormQP& qp) {
    std::optional<Vec> best;
    const std::size_t k = qp.ineq_rows.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
        std::vector<Vec> rows = qp.eq_rows;
        Vec rhs = qp.eq_rhs;
        for (std::size_t j = 0; j < k; ++j)
            if (mask >> j & 1u) {
                rows.push_back(qp.ineq_rows[j]);
                rhs.push_back(qp.ineq_rhs[j]);
            }
        Vec x(qp.dim, 0.0);
        if (!rows.empty()) {
            DenseMatrix a(rows.size(), qp.dim);
            for (std::size_t i = 0; i < rows.size(); ++i)
                for (std::size_t c = 0; c < qp.dim; ++c) a(i, c) = rows[i][c];
            x = mp_inverse(a).apply(rhs);
            const Vec ax = a.apply(x);
            bool consistent = true;
            for (std::size_t i = 0; i < rows.size(); ++i) consistent &= std::abs(ax[i] - rhs[i]) <= 1e-9;
            if (!consistent) continue;
        }
        bool feasible = true;
        for (std::size_t j = 0; j < k; ++j) feasible &= dot(qp.ineq_rows[j], x) <= qp.ineq_rhs[j] + 1e-9;
        if (feasible && (!best || norm2(x) < norm2(*best))) best = x;
    }
    return best;
}

LeastNormQP random_qp(std::mt19937& rng, std::size_t dim, std::size_t neq, std::size_t nineq) {
    std::normal_distribution<double> g(0.0, 1.0);
    LeastNormQP qp;
    qp.dim = dim;
    for (std::size_t i = 0; i < neq; ++i) {
        Vec r(dim);
        for (double& x : r) x = g(rng);
        qp.eq_rows.push_back(r);
        qp.eq_rhs.push_back(g(rng));
    }
    for (std::size_t i = 0; i < nineq; ++i) {
        Vec r(dim);
        for (double& x : r) x = g(rng);
        qp.ineq_rows.push_back(r);
        qp.ineq_rhs.push_back(g(rng));
    }
    return qp;
}

}  // namespace

TEST(LeastNormQp, Examples) {
    auto r = solve_least_norm_qp({2, {{1, 1}}, {2}, {}, {}});
    ASSERT_EQ(r.status, QpStatus::optimal);
    EXPECT_NEAR(r.v[0], 1.0, 1e-12);
    EXPECT_NEAR(r.v[1], 1.0, 1e-12);

    r = solve_least_norm_qp({2, {}, {}, {{1, 1}}, {0}});
    ASSERT_EQ(r.status, QpStatus::optimal);
    EXPECT_EQ(r.v, (Vec{0, 0}));

    r = solve_least_norm_qp({2, {{1, 0}}, {1}, {{0, 1}}, {-1}});
    ASSERT_EQ(r.status, QpStatus::optimal);
    EXPECT_NEAR(r.v[0], 1.0, 1e-12);
    EXPECT_NEAR(r.v[1], -1.0, 1e-12);
    EXPECT_EQ(r.active, (std::vector<std::size_t>{0}));
    EXPECT_NEAR(r.ineq_multipliers[0], 1.0, 1e-12);
    EXPECT_LE(r.kkt.max(), 1e-12);
}

TEST(LeastNormQp, Infeasible) {
    EXPECT_EQ(solve_least_norm_qp({1, {}, {}, {{1}, {-1}}, {-1, -1}}).status, QpStatus::infeasible);
    EXPECT_EQ(solve_least_norm_qp({2, {{1, 1}, {2, 2}}, {1, 3}, {}, {}}).status, QpStatus::infeasible);
    // dependent but consistent equalities are fine
    EXPECT_EQ(solve_least_norm_qp({2, {{1, 1}, {2, 2}}, {1, 2}, {}, {}}).status, QpStatus::optimal);
}

TEST(LeastNormQp, RejectsMalformed) {
    EXPECT_THROW(solve_least_norm_qp({2, {{1}}, {1}, {}, {}}), std::invalid_argument);
    EXPECT_THROW(solve_least_norm_qp({2, {{1, 1}}, {}, {}, {}}), std::invalid_argument);
}

TEST(LeastNormQp, MatchesActiveSetEnumeration) {
    std::mt19937 rng(31);
    int feasible = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t dim = 1 + rng() % 6;
        const std::size_t neq = rng() % std::min<std::size_t>(dim, 3);
        const std::size_t nineq = rng() % 9;
        const auto qp = random_qp(rng, dim, neq, nineq);
        const auto ref = enumerate_active_sets(qp);
        const auto got = solve_least_norm_qp(qp);
        ASSERT_NE(got.status, QpStatus::iteration_limit);
        ASSERT_EQ(got.status == QpStatus::optimal, ref.has_value()) << trial;
        if (!ref) continue;
        ++feasible;
        for (std::size_t c = 0; c < dim; ++c) EXPECT_NEAR(got.v[c], (*ref)[c], 1e-9) << trial;
        double mu_max = 0.0;
        for (double m : got.ineq_multipliers) mu_max = std::max(mu_max, std::abs(m));
        EXPECT_LE(got.kkt.stationarity, 1e-9);
        EXPECT_LE(got.kkt.primal, 1e-9);
        EXPECT_LE(got.kkt.dual, 1e-9);
        // products of a multiplier with a rounding-level slack grow with the multiplier
        EXPECT_LE(got.kkt.complementarity, 1e-9 * (1.0 + mu_max));
    }
    EXPECT_GT(feasible, 100);
}
