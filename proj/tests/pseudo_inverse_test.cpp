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

#include "geninv/pseudo_inverse.hpp"

using namespace geninv;

namespace {

OracleOptions line_options(double lo = -10.0, double hi = 10.0, double step = 1e-3) {
    OracleOptions o;
    o.box = {{lo, hi}};
    o.step = step;
    return o;
}

double value_of(const Scalar1DOperator& op, double w) {
    const auto r = closed_form_pinv(op, w);
    EXPECT_EQ(r.status, ClosedFormValue::Status::value);
    return r.value;
}

}  // namespace

TEST(ClosedForm, Examples) {
    EXPECT_EQ(value_of(Scalar1DOperator::make(ScalarKind::relu), -3.0), 0.0);
    EXPECT_EQ(value_of(Scalar1DOperator::make(ScalarKind::hard_threshold, 2.0), 1.5), 2.0);
    EXPECT_EQ(value_of(Scalar1DOperator::make(ScalarKind::soft_threshold, 1.0), 2.0), 3.0);
    EXPECT_EQ(value_of(Scalar1DOperator::make(ScalarKind::sign_eps, 0.5), 2.0), 0.5);
    EXPECT_EQ(value_of(Scalar1DOperator::make(ScalarKind::shifted_square, 3.0), 4.0), 1.0);
    EXPECT_EQ(closed_form_pinv(Scalar1DOperator::make(ScalarKind::exp), -1.0).status,
              ClosedFormValue::Status::undefined);
    EXPECT_EQ(closed_form_pinv(Scalar1DOperator::make(ScalarKind::tanh), 1.0).status,
              ClosedFormValue::Status::undefined);
    EXPECT_EQ(closed_form_pinv(Scalar1DOperator::make(ScalarKind::sign), 0.6).status,
              ClosedFormValue::Status::undefined);
    const auto sq = closed_form_pinv(Scalar1DOperator::make(ScalarKind::square), 9.0);
    EXPECT_EQ(sq.status, ClosedFormValue::Status::nonunique);
    EXPECT_EQ(sq.value, 3.0);
}

TEST(ClosedForm, ParameterDomains) {
    EXPECT_THROW(Scalar1DOperator::make(ScalarKind::shifted_square, 0.0), std::invalid_argument);
    EXPECT_THROW(Scalar1DOperator::make(ScalarKind::hard_threshold, -1.0), std::invalid_argument);
    EXPECT_THROW(Scalar1DOperator::make(ScalarKind::sign_eps, 0.0), std::invalid_argument);
    EXPECT_THROW(Scalar1DOperator::sampled({0.0, 0.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST(ClosedForm, HardThresholdPiecewiseDerivation) {
    // BAS by cases: w for |w| >= a, a*sgn(w) for a/2 < |w| < a, 0 for |w| <= a/2
    const double a = 2.0;
    const auto op = Scalar1DOperator::make(ScalarKind::hard_threshold, a);
    for (double w = -5.0; w <= 5.0; w += 0.0625) {
        double expect = 0.0;
        if (std::abs(w) >= a) expect = w;
        else if (std::abs(w) > a / 2) expect = sgn(w) * a;
        EXPECT_EQ(value_of(op, w), expect) << w;
    }
}

TEST(GridOracle, Examples) {
    const double w07[] = {0.7};
    auto r = grid_bas_oracle(VectorOperator::identity(1), w07, line_options());
    EXPECT_NEAR(r.v[0], 0.7, 1e-3);

    const double w4[] = {4.0};
    r = grid_bas_oracle(Scalar1DOperator::make(ScalarKind::square).as_vector_operator(), w4, line_options());
    EXPECT_NEAR(std::abs(r.v[0]), 2.0, 1e-3);
    EXPECT_LT(r.v[0], 0.0);  // norm tie resolved lexicographically

    const double w03[] = {0.3};
    r = grid_bas_oracle(Scalar1DOperator::make(ScalarKind::sign).as_vector_operator(), w03, line_options());
    EXPECT_EQ(r.v[0], 0.0);

    OracleOptions bad = line_options(1.0, 0.0);
    EXPECT_THROW(grid_bas_oracle(VectorOperator::identity(1), w03, bad), std::invalid_argument);
}

TEST(GridOracle, ExactTieRuleNeverHasLargerResidual) {
    const auto sine = Scalar1DOperator::make(ScalarKind::sine).as_vector_operator();
    OracleOptions exact = line_options(-std::numbers::pi, std::numbers::pi);
    exact.tie_rule = TieRule::exact;
    const GridBasOracle strict(sine, exact);
    const GridBasOracle coarse(sine, line_options(-std::numbers::pi, std::numbers::pi));
    for (double w = -0.95; w < 1.0; w += 0.1) {
        const double target[] = {w};
        EXPECT_LE(strict.query(target).residual, coarse.query(target).residual);
        EXPECT_NEAR(coarse.query(target).v[0], std::asin(w), 2e-3);
    }
}

TEST(CheckPseudoInverse, TableRowsOnAFewTargets) {
    struct Row {
        Scalar1DOperator op;
        std::vector<double> ws;
    };
    const std::vector<Row> rows = {
        {Scalar1DOperator::make(ScalarKind::shifted_square, 3.0), {-2.0, 0.5, 4.0, 12.0}},
        {Scalar1DOperator::make(ScalarKind::relu), {-3.0, 0.0, 2.5}},
        {Scalar1DOperator::make(ScalarKind::hard_threshold, 2.0), {-1.7, -0.4, 1.5, 3.25}},
        {Scalar1DOperator::make(ScalarKind::soft_threshold, 1.0), {-4.0, 0.0, 2.0}},
        {Scalar1DOperator::make(ScalarKind::tanh), {-0.9, 0.2, 0.75}},
        {Scalar1DOperator::make(ScalarKind::sign), {-0.5, 0.1, 0.45}},
        {Scalar1DOperator::make(ScalarKind::sign_eps, 0.5), {-3.0, 0.4, 2.0}},
        {Scalar1DOperator::make(ScalarKind::exp), {0.05, 1.0, 20.0}},
        {Scalar1DOperator::make(ScalarKind::sine), {-1.5, -0.3, 0.8, 1.7}},
    };
    for (const auto& row : rows) {
        std::vector<Vec> samples;
        for (double w : row.ws) samples.push_back({w});
        const double half = row.op.kind == ScalarKind::sine ? std::numbers::pi : 10.0;
        const auto reports = check_pseudo_inverse(row.op.as_vector_operator(), closed_form_candidate(row.op), samples,
                                                  CheckOptions{line_options(-half, half)});
        for (const auto& r : reports) {
            EXPECT_TRUE(r.defined);
            EXPECT_TRUE(r.bas_ok) << static_cast<int>(row.op.kind) << " w=" << r.w[0];
            EXPECT_TRUE(r.mp1_ok);
            EXPECT_TRUE(r.mp2_ok);
            EXPECT_LE(r.argument_gap, 2e-3) << static_cast<int>(row.op.kind) << " w=" << r.w[0];
        }
    }
}

TEST(CheckPseudoInverse, TanhIsExactlyInverted) {
    const auto op = Scalar1DOperator::make(ScalarKind::tanh);
    for (double w = -0.99; w < 1.0; w += 0.03) EXPECT_NEAR(std::tanh(value_of(op, w)), w, 1e-12);
}

TEST(CheckPseudoInverse, PerturbedCandidateFailsBas) {
    const auto op = Scalar1DOperator::make(ScalarKind::relu);
    const auto base = closed_form_candidate(op);
    const CandidateInverse shifted = [&](std::span<const double> w) -> std::optional<Vec> {
        auto v = base(w);
        (*v)[0] += 2.5e-3;
        return v;
    };
    const auto reports = check_pseudo_inverse(op.as_vector_operator(), shifted, {{-1.0}, {0.5}}, CheckOptions{line_options()});
    for (const auto& r : reports) EXPECT_FALSE(r.bas_ok);
}

TEST(FiniteBas, MpTwoCounterexample) {
    // V = {-1, 1}, W = {0, 1}, T maps everything to 1
    const FiniteBasProblem pb{FiniteOperator(2, {1, 1}), {1.0, 1.0}, {{0.0}, {1.0}}};
    const FiniteOperator s(2, {0, 1});  // S(0) = -1, S(1) = 1
    EXPECT_TRUE(satisfies_bas(pb, s));
    EXPECT_FALSE(compose(s, compose(pb.op, s)) == s);
    for (const auto& g : finite_pseudo_inverses(pb)) EXPECT_EQ(g(0), g(1));
    EXPECT_EQ(finite_pseudo_inverses(pb).size(), 2u);
}

TEST(FiniteBas, UniqueCompositeMismatch) {
    // |u2| < |u1|, |v1| < |v2|, S collapses V onto the single point w, T(u_i) = v_i
    const FiniteOperator t(2, {0, 1});
    const FiniteOperator s(1, {0, 0});
    const FiniteBasProblem t_pb{t, {2.0, 1.0}, {{1.0}, {2.0}}};
    const FiniteBasProblem s_pb{s, {1.0, 2.0}, {{0.0}}};
    const FiniteBasProblem st_pb{compose(s, t), {2.0, 1.0}, {{0.0}}};
    const auto t_inv = finite_pseudo_inverses(t_pb);
    const auto s_inv = finite_pseudo_inverses(s_pb);
    const auto st_inv = finite_pseudo_inverses(st_pb);
    ASSERT_EQ(t_inv.size(), 1u);
    ASSERT_EQ(s_inv.size(), 1u);
    ASSERT_EQ(st_inv.size(), 1u);
    EXPECT_EQ(st_inv[0](0), 1u);
    EXPECT_NE(compose(t_inv[0], s_inv[0]), st_inv[0]);
}

TEST(ExpandingDomain, Examples) {
    const std::vector<double> radii{1, 2, 3, 4, 5, 6, 7};
    const double e2[] = {std::exp(2.0)};
    auto r = expanding_domain_pinv(Scalar1DOperator::make(ScalarKind::exp).as_vector_operator(), e2, radii, 3);
    EXPECT_TRUE(r.stabilized);
    EXPECT_EQ(r.stable_from, 1u);
    EXPECT_NEAR(r.value[0], 2.0, 1e-3);
    EXPECT_NEAR(r.per_radius[0][0], 1.0, 1e-12);

    const double five[] = {5.0};
    r = expanding_domain_pinv(VectorOperator::identity(1), five, radii, 3);
    EXPECT_TRUE(r.stabilized);
    EXPECT_EQ(r.stable_from, 4u);

    const double ten[] = {10.0};
    r = expanding_domain_pinv(Scalar1DOperator::make(ScalarKind::linear, 0.5).as_vector_operator(), ten, radii, 2);
    EXPECT_FALSE(r.stabilized);
    for (std::size_t i = 0; i < radii.size(); ++i) EXPECT_NEAR(r.per_radius[i][0], radii[i], 1e-9);
}

TEST(SampledOperator, InterpolatesAndMatchesOracle) {
    const auto op = Scalar1DOperator::sampled({-1.0, 0.0, 2.0}, {1.0, 0.0, 4.0});
    EXPECT_DOUBLE_EQ(op(1.0), 2.0);
    EXPECT_DOUBLE_EQ(op(-5.0), 1.0);
    EXPECT_THROW(closed_form_pinv(op, 0.0), std::invalid_argument);
    const double w[] = {0.5};
    EXPECT_NEAR(grid_bas_oracle(op.as_vector_operator(), w, line_options(-3, 3)).v[0], 0.25, 1e-3);
}
