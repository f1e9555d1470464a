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

#include "geninv/structured_inverse.hpp"

using namespace geninv;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec gaussian(std::mt19937_64& rng, std::size_t n, double s) {
    std::normal_distribution<double> g(0.0, s);
    Vec v(n);
    for (double& x : v) x = g(rng);
    return v;
}

std::vector<ConvexSet> sample_sets() {
    return {
        ConvexSet::box({-1, 0, -2}, {1, 3, kInf}),
        ConvexSet::ball({0.5, -1, 2}, 1.5),
        ConvexSet::halfspace({1, -2, 0.5}, 0.7),
        ConvexSet::intersection({ConvexSet::box({-1, -1, -1}, {1, 1, 1}), ConvexSet::ball({0, 0, 0}, 1.2),
                                 ConvexSet::halfspace({1, 1, 1}, 0.5)},
                                {0, 0, 0}),
    };
}

// Variational characterisation: p = P_C(x) iff p in C and <x - p, c - p> <= 0 for all c in C.
void expect_projection_optimal(const ConvexSet& c, const Vec& x, std::mt19937_64& rng) {
    const Vec p = c.project(x);
    EXPECT_TRUE(c.contains(p, 1e-9));
    for (int k = 0; k < 50; ++k) {
        const Vec other = c.project(gaussian(rng, c.dim(), 3.0));
        double ip = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) ip += (x[i] - p[i]) * (other[i] - p[i]);
        EXPECT_LE(ip, 1e-8);
        EXPECT_GE(distance(x, other), distance(x, p) - 1e-8);
    }
}

}  // namespace

TEST(ConvexSet, RejectsEmptyOrMalformed) {
    EXPECT_THROW(ConvexSet::box({1}, {0}), std::invalid_argument);
    EXPECT_THROW(ConvexSet::ball({0}, -1), std::invalid_argument);
    EXPECT_THROW(ConvexSet::halfspace({0, 0}, 1), std::invalid_argument);
    EXPECT_THROW(ConvexSet::intersection({ConvexSet::ball({0}, 1), ConvexSet::ball({3}, 1)}, {0}), std::invalid_argument);
    EXPECT_THROW(ConvexSet::ball({0, 0}, 1).project(Vec{1.0}), std::invalid_argument);
}

TEST(Project, Examples) {
    const auto orthant = ConvexSet::nonnegative_orthant(3);
    EXPECT_EQ(orthant.project(Vec{-1, 2, -0.5}), (Vec{0, 2, 0}));
    const auto unit = ConvexSet::ball({0, 0}, 1);
    const Vec x{1.8, -2.4};  // norm 3
    const Vec p = unit.project(x);
    EXPECT_NEAR(p[0], 0.6, 1e-15);
    EXPECT_NEAR(p[1], -0.8, 1e-15);
    EXPECT_EQ(unit.project(Vec{0.1, 0.2}), (Vec{0.1, 0.2}));
}

TEST(Project, OptimalAndIdempotent) {
    std::mt19937_64 rng(41);
    for (const auto& c : sample_sets())
        for (int k = 0; k < 40; ++k) {
            const Vec x = gaussian(rng, 3, 3.0);
            expect_projection_optimal(c, x, rng);
            const Vec p = c.project(x);
            EXPECT_LE(distance(c.project(p), p), 1e-10);
        }
}

TEST(Project, IntersectionMatchesQuadraticProgram) {
    // projection onto box n halfspace as min ||z|| with z = y - x under linear constraints
    std::mt19937_64 rng(42);
    const Vec lo{-1, -0.5}, hi{2, 1}, n{1, 1};
    const double off = 0.8;
    const auto c = ConvexSet::intersection({ConvexSet::box(lo, hi), ConvexSet::halfspace(n, off)}, {0, 0});
    for (int k = 0; k < 100; ++k) {
        const Vec x = gaussian(rng, 2, 3.0);
        LeastNormQP qp;
        qp.dim = 2;
        for (std::size_t i = 0; i < 2; ++i) {
            Vec e(2, 0.0);
            e[i] = 1.0;
            qp.ineq_rows.push_back(e);
            qp.ineq_rhs.push_back(hi[i] - x[i]);
            e[i] = -1.0;
            qp.ineq_rows.push_back(e);
            qp.ineq_rhs.push_back(x[i] - lo[i]);
        }
        qp.ineq_rows.push_back(n);
        qp.ineq_rhs.push_back(off - dot(n, x));
        const auto r = solve_least_norm_qp(qp);
        ASSERT_EQ(r.status, QpStatus::optimal);
        const Vec p = c.project(x);
        EXPECT_NEAR(p[0], x[0] + r.v[0], 1e-8);
        EXPECT_NEAR(p[1], x[1] + r.v[1], 1e-8);
    }
}

TEST(Project, NonexpansiveForEveryKind) {
    std::mt19937_64 rng(43);
    for (const auto& c : sample_sets())
        for (int k = 0; k < 1000; ++k) {
            const Vec x = gaussian(rng, 3, 4.0), y = gaussian(rng, 3, 4.0);
            EXPECT_LE(distance(c.project(x), c.project(y)), distance(x, y) + 1e-9);
        }
}

TEST(Cascade, RejectsBadNesting) {
    EXPECT_THROW(cascade_pinv({ConvexSet::box({-1, -1}, {1, 1}), ConvexSet::box({-2, -2}, {2, 2})}),
                 std::invalid_argument);
    EXPECT_THROW(cascade_pinv({ConvexSet::ball({3, 0}, 1)}), std::invalid_argument);
}

TEST(Cascade, InnermostProjectionPassesOracle) {
    OracleOptions grid;
    grid.box = {{-3, 3}, {-3, 3}};
    grid.step = 0.05;
    const std::vector<std::vector<ConvexSet>> cases = {
        {ConvexSet::ball({0, 0}, 1.0)},
        {ConvexSet::box({-2, -2}, {2, 2}), ConvexSet::box({-1, -1}, {1, 1})},
        {ConvexSet::ball({0, 0}, 2.0), ConvexSet::box({-1, -1}, {1, 1})},
    };
    const std::vector<Vec> targets{{0.3, -0.2}, {2.5, 0.4}, {-1.7, -2.6}, {0.9, 1.4}};
    for (const auto& sets : cases) {
        const auto inv = cascade_pinv(sets);
        const CandidateInverse g = [&](std::span<const double> w) -> std::optional<Vec> { return inv.inverse(w); };
        for (const auto& r : check_pseudo_inverse(inv.cascade, g, targets, CheckOptions{grid})) {
            EXPECT_TRUE(r.bas_ok) << r.w[0] << "," << r.w[1];
            EXPECT_TRUE(r.mp1_ok);
            EXPECT_TRUE(r.mp2_ok);
        }
    }
}

TEST(Cascade, NormsDecreaseAlongTrace) {
    std::mt19937_64 rng(44);
    const std::vector<ConvexSet> sets{ConvexSet::ball({0, 0, 0}, 3), ConvexSet::box({-2, -2, -1}, {2, 2, 1}),
                                      ConvexSet::halfspace({1, 0, 0}, 0.5)};
    for (int k = 0; k < 200; ++k) {
        const auto trace = cascade_trace(sets, gaussian(rng, 3, 4.0));
        for (std::size_t j = 1; j < trace.size(); ++j) EXPECT_LE(norm2(trace[j]), norm2(trace[j - 1]) + 1e-12);
    }
}

TEST(ProductInverse, ReluIsSelfInverse) {
    const auto relu = Scalar1DOperator::make(ScalarKind::relu);
    const InversePair part{relu.as_vector_operator(), closed_form_candidate(relu)};
    const std::vector<Vec> probes{{-1.0}, {0.0}, {2.0}};
    const auto prod = product_inverse({part, part, part}, {probes, probes, probes}, {probes, probes, probes});
    EXPECT_EQ(*prod.inverse(Vec{-1, 2, 0.5}), (Vec{0, 2, 0.5}));
    EXPECT_EQ(prod.op(Vec{-1, 2, 0.5}), (Vec{0, 2, 0.5}));
}

TEST(ProductInverse, MatchesTwoDimensionalOracle) {
    const auto sq = Scalar1DOperator::make(ScalarKind::shifted_square, 1.0);
    const auto hard = Scalar1DOperator::make(ScalarKind::hard_threshold, 1.0);
    const std::vector<Vec> probes{{-2.0}, {0.3}, {1.5}};
    const auto prod = product_inverse({{sq.as_vector_operator(), closed_form_candidate(sq)},
                                       {hard.as_vector_operator(), closed_form_candidate(hard)}},
                                      {probes, probes}, {probes, probes});
    const std::vector<Vec> targets{{0.5, 0.7}, {2.0, -0.3}, {-1.0, 1.8}, {4.0, -0.8}};
    for (double p : {1.0, 2.0, 3.0}) {
        OracleOptions grid;
        grid.box = {{-4, 4}, {-4, 4}};
        grid.step = 0.01;
        grid.norm_p = p;
        for (const auto& r : check_pseudo_inverse(prod.op, prod.inverse, targets, CheckOptions{grid})) {
            EXPECT_TRUE(r.bas_ok) << "p=" << p << " w=" << r.w[0] << "," << r.w[1];
            EXPECT_LE(r.argument_gap, 0.02);
        }
    }
}

TEST(ProductInverse, RejectsInvalidPart) {
    const auto relu = Scalar1DOperator::make(ScalarKind::relu);
    const InversePair broken{relu.as_vector_operator(), [](std::span<const double> w) -> std::optional<Vec> {
                                 return Vec{w[0] - 1.0};
                             }};
    const std::vector<Vec> probes{{1.0}};
    EXPECT_THROW(product_inverse({broken}, {probes}, {probes}), std::invalid_argument);
}

TEST(SandwichInverse, IdentityBijectionsAndAffineCorollary) {
    const auto relu = Scalar1DOperator::make(ScalarKind::relu);
    const InversePair base{relu.as_vector_operator(), closed_form_candidate(relu)};
    const Bijection id{VectorOperator::identity(1), VectorOperator::identity(1)};
    const auto same = sandwich_inverse(id, base, id, {{1.0}}, {{1.0}});
    for (double w : {-2.0, 0.0, 1.5}) EXPECT_EQ(*same.inverse(Vec{w}), *base.inverse(Vec{w}));

    // a relu(b v) + w0 with a = 2, b = 3, w0 = 1
    const auto aff = affine_inverse(base, 2.0, 3.0, {1.0});
    EXPECT_DOUBLE_EQ(aff.op(Vec{0.5})[0], 4.0);
    OracleOptions grid;
    grid.box = {{-10, 10}};
    std::vector<Vec> samples;
    for (double w = -4.0; w <= 8.0; w += 0.37) samples.push_back({w});
    for (const auto& r : check_pseudo_inverse(aff.op, aff.inverse, samples, CheckOptions{grid})) {
        EXPECT_TRUE(r.bas_ok) << r.w[0];
        EXPECT_TRUE(r.mp2_ok);
        EXPECT_LE(r.argument_gap, 2e-3);
    }
    EXPECT_THROW(affine_inverse(base, 0.0, 1.0, {0.0}), std::invalid_argument);
}

TEST(SandwichInverse, RejectsBrokenBijection) {
    const Bijection bad{scale(2.0, VectorOperator::identity(1)), VectorOperator::identity(1)};
    const Bijection id{VectorOperator::identity(1), VectorOperator::identity(1)};
    const InversePair t{VectorOperator::identity(1), [](std::span<const double> w) -> std::optional<Vec> {
                            return Vec(w.begin(), w.end());
                        }};
    EXPECT_THROW(sandwich_inverse(bad, t, id, {{1.0}}, {{1.0}}), std::invalid_argument);
}

TEST(ProjectionAfterOperator, IdentityReducesToProjection) {
    const auto c = ConvexSet::box({-1, -0.5}, {1, 2});
    OracleOptions grid;
    grid.box = {{-3, 3}, {-3, 3}};
    grid.step = 0.05;
    const auto pa = projection_after_operator_pinv(VectorOperator::identity(2), c, {{{0, 0}, {0, 0}}, {{1, 2}, {1, 2}}}, grid);
    for (const Vec& w : std::vector<Vec>{{0.5, 0.5}, {2.5, -1.0}, {-0.35, 1.9}}) {
        const Vec want = c.project(w);
        const Vec got = *pa.inverse(w);
        EXPECT_LE(distance(got, want), 0.05 * std::sqrt(2.0)) << w[0] << "," << w[1];
    }
    const Vec outside{2.5, -1.0};
    EXPECT_EQ(*pa.inverse(outside), *pa.inverse(c.project(outside)));
    EXPECT_THROW(projection_after_operator_pinv(VectorOperator::identity(2), c, {{{5, 5}, {5, 5}}}, grid),
                 std::invalid_argument);
}

TEST(ProjectionAfterOperator, LinearBoxMatchesGrid) {
    const auto a = DenseMatrix::from_rows({{1.0, 2.0}});
    const auto c = ConvexSet::box({-1.0}, {1.5});
    OracleOptions grid;
    grid.box = {{-2, 2}, {-2, 2}};
    grid.step = 0.01;
    const auto pa = projection_after_operator_pinv(linear_operator(a), c, {{{1.5}, {0.3, 0.6}}}, grid);
    for (double w : {-3.0, -1.0, 0.4, 1.5, 4.0}) {
        const double target[] = {w};
        const auto r = projection_after_linear_pinv(a, c, target);
        ASSERT_EQ(r.status, QpStatus::optimal);
        const Vec g = *pa.inverse(Vec{w});
        EXPECT_LE(distance(g, r.v), 0.03) << w;
        // least-norm source of the clamped target along the row direction
        const double t = std::clamp(w, -1.0, 1.5) / 5.0;
        EXPECT_NEAR(r.v[0], t, 1e-12);
        EXPECT_NEAR(r.v[1], 2 * t, 1e-12);
    }
}
