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

#include <numeric>
#include <random>

#include "geninv/vanishing.hpp"

using namespace geninv;

namespace {

FpPolynomial poly(FpElem p, std::vector<std::int64_t> c) { return FpPolynomial(p, c); }

FpVectorOperator random_operator(std::mt19937_64& rng, FpElem p, std::size_t dim) {
    const std::size_t n = FpVectorOperator::space_size(p, dim);
    std::uniform_int_distribution<Id> pick(0, static_cast<Id>(n - 1));
    std::vector<Id> t(n);
    for (Id& x : t) x = pick(rng);
    return FpVectorOperator(p, dim, std::move(t));
}

FpMatrix random_matrix(std::mt19937_64& rng, FpElem p, std::size_t n) {
    std::uniform_int_distribution<std::int64_t> pick(0, p - 1);
    std::vector<std::int64_t> e(n * n);
    for (auto& x : e) x = pick(rng);
    return FpMatrix(p, n, n, e);
}

// Leibniz expansion over all permutations.
FpElem leibniz_det(const FpMatrix& a) {
    const std::size_t n = a.rows();
    const FpElem p = a.prime();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    FpElem det = 0;
    do {
        std::size_t inversions = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) inversions += perm[i] > perm[j];
        FpElem term = 1 % p;
        for (std::size_t i = 0; i < n; ++i) term = fp_mul(term, a(i, perm[i]), p);
        det = inversions % 2 ? fp_sub(det, term, p) : fp_add(det, term, p);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return det;
}

// Lowest-degree monic vanishing polynomial by trying every monic polynomial of increasing degree.
FpPolynomial brute_minimal_poly(const FpVectorOperator& t, std::size_t max_degree) {
    const FpElem p = t.prime();
    for (std::size_t d = 1; d <= max_degree; ++d) {
        std::size_t total = 1;
        for (std::size_t i = 0; i < d; ++i) total *= p;
        for (std::size_t code = 0; code < total; ++code) {
            FpVector c(d + 1, 0);
            c[d] = 1;
            std::size_t x = code;
            for (std::size_t i = 0; i < d; ++i, x /= p) c[i] = static_cast<FpElem>(x % p);
            const auto q = FpPolynomial::from_elems(p, c);
            if (vanishes(q, t)) return q;
        }
    }
    throw std::runtime_error("no minimal polynomial within the degree limit");
}

FpVectorOperator idempotent_example() {
    // T(v) = v if the first coordinate is zero, otherwise (0, v_1): nonlinear and T^2 = T
    return FpVectorOperator::from_function(3, 2, [](const FpVector& v) {
        return v[0] == 0 ? v : FpVector{0, v[1]};
    });
}

FpVectorOperator swap_example() { return FpVectorOperator(2, 1, {1, 0}); }

}  // namespace

TEST(FpPolynomial, ArithmeticAndDivision) {
    const auto a = poly(5, {1, -2, 1});
    EXPECT_EQ(a.coeffs(), (FpVector{1, 3, 1}));
    EXPECT_EQ(a.degree(), 2u);
    EXPECT_EQ(a.evaluate(1), 0u);
    EXPECT_EQ(poly(5, {5, 10}).is_zero(), true);
    EXPECT_EQ(poly(7, {3, 2}).monic(), poly(7, {5, 1}));
    EXPECT_THROW(poly(4, {1}), std::invalid_argument);
    EXPECT_THROW(divmod(a, FpPolynomial(5)), std::domain_error);

    std::mt19937_64 rng(71);
    for (FpElem p : {2u, 3u, 5u, 7u}) {
        std::uniform_int_distribution<std::int64_t> pick(0, p - 1);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<std::int64_t> ca(1 + trial % 9), cb(1 + trial % 4);
            for (auto& x : ca) x = pick(rng);
            for (auto& x : cb) x = pick(rng);
            cb.back() = 1;
            const auto x = poly(p, ca), y = poly(p, cb);
            const auto [q, r] = divmod(x, y);
            EXPECT_EQ(q * y + r, x);
            EXPECT_TRUE(r.is_zero() || r.degree() < y.degree());
            for (FpElem z = 0; z < p; ++z) EXPECT_EQ((x * y).evaluate(z), fp_mul(x.evaluate(z), y.evaluate(z), p));
        }
    }
}

TEST(FpVectorOperator, EncodingAndValidation) {
    for (std::size_t i = 0; i < 27; ++i) EXPECT_EQ(FpVectorOperator::encode(3, FpVectorOperator::decode(3, 3, i)), i);
    EXPECT_EQ(FpVectorOperator::decode(3, 2, 5), (FpVector{1, 2}));
    EXPECT_THROW(FpVectorOperator(2, 1, {0, 2}), std::invalid_argument);
    EXPECT_THROW(FpVectorOperator(2, 2, {0, 1}), std::invalid_argument);
    EXPECT_THROW(FpVectorOperator::space_size(2, 17), std::invalid_argument);
    const auto a = FpMatrix(5, 2, 2, {1, 1, 0, 1});
    const auto t = FpVectorOperator::affine(a, {2, 0});
    EXPECT_EQ(t(FpVector{1, 3}), (FpVector{1, 3}));  // (1+3+2, 3) mod 5
}

TEST(FindVanishing, Examples) {
    const auto idem = idempotent_example();
    const auto vi = find_vanishing_poly(idem);
    EXPECT_EQ(vi.poly, poly(3, {0, -1, 1}));
    EXPECT_TRUE((vi.poly % poly(3, {0, -1, 1})).is_zero());

    const auto vs = find_vanishing_poly(swap_example());
    EXPECT_EQ(vs.poly, poly(2, {1, 0, 1}));
    EXPECT_EQ(vs.preiterations, 0u);
    EXPECT_EQ(vs.stable_size, 2u);

    // linear shift on F_3^3 is nilpotent of order 3
    const auto shift = FpVectorOperator::affine(shift_matrix(3, 3), {0, 0, 0});
    const auto vn = find_vanishing_poly(shift);
    EXPECT_EQ(vn.poly, FpPolynomial::monomial(3, 3));
    EXPECT_EQ(vn.degree_bound, 4u);

    EXPECT_THROW(find_vanishing_poly(shift, 1), std::invalid_argument);
    const auto later = find_vanishing_poly(idem, 3);
    EXPECT_TRUE(vanishes(later.poly, idem));
}

TEST(FindVanishing, RandomOperatorsVanishWithinBound) {
    std::mt19937_64 rng(72);
    for (int trial = 0; trial < 60; ++trial) {
        const FpElem p = trial % 2 ? 3 : 2;
        const std::size_t dim = p == 2 ? 1 + trial % 9 : 1 + trial % 5;
        const auto t = random_operator(rng, p, dim);
        const auto r = find_vanishing_poly(t);
        EXPECT_TRUE(vanishes(r.poly, t));
        EXPECT_LE(r.poly.degree(), r.degree_bound);
        const auto chain = image_chain(t.as_finite());
        EXPECT_EQ(r.stable_size, chain.sets.back().size());
        const auto minimal = minimal_poly(t);
        EXPECT_TRUE((r.poly % minimal).is_zero());
    }
}

TEST(MinimalPoly, ExamplesAndBruteForce) {
    EXPECT_EQ(minimal_poly(FpVectorOperator::identity(5, 2)), poly(5, {-1, 1}));
    EXPECT_EQ(minimal_poly(swap_example()), poly(2, {1, 0, 1}));
    EXPECT_EQ(minimal_poly(idempotent_example()), poly(3, {0, -1, 1}));

    std::mt19937_64 rng(73);
    for (int trial = 0; trial < 40; ++trial) {
        const FpElem p = trial % 2 ? 3 : 2;
        const auto t = random_operator(rng, p, p == 2 ? 2 : 1);
        const auto m = minimal_poly(t);
        EXPECT_TRUE(m.is_monic());
        EXPECT_TRUE(vanishes(m, t));
        EXPECT_EQ(m, brute_minimal_poly(t, 6));
    }
}

TEST(MinimalPoly, DegreeMatchesStackedRankGrowth) {
    // degree of the minimal polynomial = first d where T^d adds nothing to the span of I, ..., T^(d-1)
    std::mt19937_64 rng(74);
    for (int trial = 0; trial < 30; ++trial) {
        const FpElem p = trial % 2 ? 3 : 2;
        const auto t = random_operator(rng, p, p == 2 ? 6 : 4);
        const std::size_t len = t.size() * t.dim();
        const auto m = minimal_poly(t);
        std::vector<FpVector> columns;
        std::size_t rank = 0, degree = 0;
        for (std::size_t d = 0;; ++d) {
            FpVector col;
            for (std::size_t v = 0; v < t.size(); ++v) {
                Id cur = static_cast<Id>(v);
                for (std::size_t i = 0; i < d; ++i) cur = t.table()[cur];
                const FpVector x = t.decode(cur);
                col.insert(col.end(), x.begin(), x.end());
            }
            columns.push_back(col);
            FpMatrix stacked(p, len, columns.size());
            for (std::size_t c = 0; c < columns.size(); ++c)
                for (std::size_t r = 0; r < len; ++r) stacked(r, c) = columns[c][r];
            const std::size_t now = fp_rref(stacked).pivots.size();
            if (now == rank) {
                degree = d;
                break;
            }
            rank = now;
        }
        EXPECT_EQ(m.degree(), degree);
        EXPECT_TRUE(vanishes(m, t));
    }
}

TEST(PolyLeftInverse, Examples) {
    const auto id = FpVectorOperator::identity(5, 1);
    EXPECT_EQ(*poly_left_inverse(poly(5, {-1, 1}), id), id);

    const auto a = FpMatrix(5, 2, 2, {1, 1, 0, 1});
    const auto t = FpVectorOperator::affine(a, {0, 0});
    const auto s = poly_left_inverse(poly(5, {1, -2, 1}), t);
    ASSERT_TRUE(s);
    EXPECT_EQ(*s, FpVectorOperator::affine(FpMatrix(5, 2, 2, {1, 4, 0, 1}), {0, 0}));

    EXPECT_FALSE(poly_left_inverse(poly(3, {0, -1, 1}), idempotent_example()));
    EXPECT_THROW(poly_left_inverse(poly(5, {1, 1}), t), std::invalid_argument);
}

TEST(PolyLeftInverse, CharacteristicPolynomialGivesMatrixInverse) {
    std::mt19937_64 rng(74);
    int done = 0;
    while (done < 30) {
        const auto a = random_matrix(rng, 5, 3);
        const auto inv = fp_invert(a);
        if (!inv) continue;
        ++done;
        const auto t = FpVectorOperator::affine(a, {0, 0, 0});
        const auto s = poly_left_inverse(characteristic_poly(a), t);
        ASSERT_TRUE(s);
        EXPECT_EQ(*s, FpVectorOperator::affine(*inv, {0, 0, 0}));
    }
}

TEST(LeftDrazinFromPoly, Examples) {
    const auto idem = idempotent_example();
    const auto g = left_drazin_from_poly(poly(3, {0, -1, 1}), idem);
    EXPECT_EQ(g.k, 1u);
    EXPECT_EQ(g.inverse, FpVectorOperator::identity(3, 2));

    const auto shift = FpVectorOperator::affine(shift_matrix(2, 3), {0, 0, 0});
    const auto z = left_drazin_from_poly(FpPolynomial::monomial(2, 3), shift);
    EXPECT_EQ(z.k, 3u);
    EXPECT_EQ(z.inverse, FpVectorOperator(2, 3, std::vector<Id>(8, 0)));

    const auto swap = swap_example();
    const auto w = left_drazin_from_poly(poly(2, {1, 0, 1}), swap);
    EXPECT_EQ(w.k, 0u);
    EXPECT_EQ(w.m, 1u);
    EXPECT_EQ(w.inverse, swap);
}

TEST(LeftDrazinFromPoly, IdentityOnRandomOperators) {
    std::mt19937_64 rng(75);
    for (int trial = 0; trial < 40; ++trial) {
        const auto t = random_operator(rng, trial % 2 ? 3 : 2, 1 + trial % 4);
        const auto q = find_vanishing_poly(t).poly;
        const auto g = left_drazin_from_poly(q, t);
        EXPECT_EQ(compose(g.inverse, power(t, g.m + 1)), power(t, g.m));
    }
}

TEST(Reciprocal, ExamplesAndInverseTransport) {
    EXPECT_EQ(reciprocal_poly(poly(5, {-1, 1})), poly(5, {1, -1}));
    EXPECT_EQ(reciprocal_poly(poly(5, {1, -2, 1})), poly(5, {1, -2, 1}));
    EXPECT_EQ(reciprocal_poly(poly(2, {1, 0, 1})), poly(2, {1, 0, 1}));

    std::mt19937_64 rng(76);
    for (int trial = 0; trial < 40; ++trial) {
        const FpElem p = trial % 2 ? 3 : 5;
        const std::size_t n = FpVectorOperator::space_size(p, 2);
        std::vector<Id> perm(n);
        std::iota(perm.begin(), perm.end(), Id{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        const FpVectorOperator t(p, 2, perm);
        std::vector<Id> back(n);
        for (std::size_t i = 0; i < n; ++i) back[perm[i]] = static_cast<Id>(i);
        const FpVectorOperator tinv(p, 2, back);
        const auto m = minimal_poly(t);
        EXPECT_TRUE(vanishes(reciprocal_poly(m), tinv));
        EXPECT_EQ(inverse_minimal_poly(m), minimal_poly(tinv));
        EXPECT_NE(m.coefficient(0), 0u);  // bijective, so the constant term is a unit
    }
}

TEST(PowerVanishing, Examples) {
    const auto idem = idempotent_example();
    const auto q = power_vanishing_poly(poly(3, {0, -1, 1}), 2, 1);
    EXPECT_TRUE(vanishes(q, compose(idem, idem)));
    EXPECT_LE(q.degree(), 2u);

    const auto swap = swap_example();
    const auto r = power_vanishing_poly(poly(2, {1, 0, 1}), 2, 2);
    EXPECT_TRUE(vanishes(r, swap));
    EXPECT_LE(r.degree(), 4u);

    const auto s = power_vanishing_poly(poly(3, {0, -1, 1}), 1, 1);
    EXPECT_TRUE(vanishes(s, idem));
}

TEST(PowerVanishing, RandomRoots) {
    // T1 is random and T = T1^l, so T1^l = T^1 and T1^(2l) = T^2
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        const auto t1 = random_operator(rng, 3, 2);
        const std::size_t l = 1 + trial % 3, k = 1 + trial % 2;
        const auto t = power(t1, l);
        const auto q = minimal_poly(t);
        const auto r = power_vanishing_poly(q, k, k * l);
        EXPECT_TRUE(vanishes(r, t1)) << trial;
        EXPECT_LE(r.degree(), q.degree() * k * l);
        EXPECT_TRUE(vanishes(power_vanishing_poly(q, 1, l), t1));
    }
}

TEST(AffineVanishing, Examples) {
    const auto id = FpMatrix::identity(3, 2);
    const auto q = affine_vanishing_poly(poly(3, {-1, 1}), id);
    EXPECT_EQ(q, poly(3, {1, -2, 1}));
    EXPECT_TRUE(vanishes(q, FpVectorOperator::affine(id, {1, 2})));

    const auto nil = shift_matrix(3, 2);
    const auto r = affine_vanishing_poly(FpPolynomial::monomial(3, 2), nil);
    EXPECT_EQ(r, poly(3, {0, 0, -1, 0, 1}));
    for (FpElem b0 = 0; b0 < 3; ++b0)
        for (FpElem b1 = 0; b1 < 3; ++b1) EXPECT_TRUE(vanishes(r, FpVectorOperator::affine(nil, {b0, b1})));
    EXPECT_THROW(affine_vanishing_poly(poly(3, {0, 1}), nil), std::invalid_argument);
}

TEST(AffineVanishing, RandomMatrices) {
    std::mt19937_64 rng(78);
    for (int trial = 0; trial < 30; ++trial) {
        const FpElem p = trial % 2 ? 5 : 3;
        const auto a = random_matrix(rng, p, 2);
        const auto chi = characteristic_poly(a);
        const auto q = affine_vanishing_poly(chi, a);
        std::uniform_int_distribution<FpElem> pick(0, p - 1);
        EXPECT_TRUE(vanishes(q, FpVectorOperator::affine(a, {pick(rng), pick(rng)})));
    }
}

TEST(ProductVanishing, Examples) {
    const auto idem = idempotent_example();
    const auto pi = poly(3, {0, -1, 1});
    EXPECT_EQ(product_vanishing_poly({{pi, idem}}), pi);
    const auto both = product_vanishing_poly({{pi, idem}, {pi, idem}});
    EXPECT_EQ(both, pi * pi);
    EXPECT_TRUE(vanishes(both, product_operator({idem, idem})));

    const auto idem2 = FpVectorOperator(2, 1, {0, 0});
    const auto mixed = product_vanishing_poly({{poly(2, {0, 1, 1}), idem2}, {poly(2, {1, 0, 1}), swap_example()}});
    EXPECT_TRUE(vanishes(mixed, product_operator({idem2, swap_example()})));
    EXPECT_THROW(product_vanishing_poly({{poly(2, {0, 1}), swap_example()}}), std::invalid_argument);
}

TEST(Companion, Examples) {
    const auto zero = FpVectorOperator(3, 1, {0, 0, 0});
    const auto c0 = companion_embedding_check(zero, FpPolynomial::monomial(3, 1));
    EXPECT_EQ(c0.companion, FpMatrix(3, 1, 1));
    EXPECT_TRUE(c0.holds());

    const auto ci = companion_embedding_check(idempotent_example(), poly(3, {0, -1, 1}));
    EXPECT_EQ(ci.companion, FpMatrix(3, 2, 2, {0, 0, 1, 1}));
    EXPECT_TRUE(ci.holds());

    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 40; ++trial) {
        const auto t = random_operator(rng, trial % 2 ? 3 : 2, 1 + trial % 4);
        EXPECT_TRUE(companion_embedding_check(t, minimal_poly(t)).holds());
    }
}

TEST(Companion, CharacteristicPolynomialOfCompanionIsItself) {
    EXPECT_EQ(characteristic_poly(companion_matrix(poly(5, {2, 0, 3, 1}))), poly(5, {2, 0, 3, 1}));
    EXPECT_THROW(companion_matrix(poly(5, {2, 3})), std::invalid_argument);
}

TEST(EigenRoots, Examples) {
    const auto idem = idempotent_example();
    const auto r = eigen_root_check(idem, poly(3, {0, -1, 1}));
    EXPECT_GT(r.fixed_points, 0u);
    EXPECT_TRUE(r.ok());

    // T(v) = v on a set A containing 0, zero elsewhere
    const auto gate = FpVectorOperator::from_function(3, 1, [](const FpVector& v) {
        return v[0] == 1 ? v : FpVector{0};
    });
    const auto g = eigen_root_check(gate, minimal_poly(gate));
    EXPECT_EQ(minimal_poly(gate), poly(3, {0, -1, 1}));
    EXPECT_EQ(g.fixed_points, 1u);
    EXPECT_EQ(g.kernel_vectors, 1u);
    EXPECT_TRUE(g.zero_preserving);
    EXPECT_TRUE(g.ok());

    const auto rot = FpVectorOperator(3, 1, {1, 2, 0});  // v + 1: no fixed points
    const auto n = eigen_root_check(rot, minimal_poly(rot));
    EXPECT_EQ(n.fixed_points, 0u);
    EXPECT_TRUE(n.ok());
}

TEST(EigenRoots, LinearMapsListEveryEigenvalue) {
    std::mt19937_64 rng(80);
    for (int trial = 0; trial < 30; ++trial) {
        const auto a = random_matrix(rng, 5, 2);
        const auto t = FpVectorOperator::affine(a, {0, 0});
        const auto r = eigen_root_check(t, minimal_poly(t));
        EXPECT_TRUE(r.one_homogeneous);
        EXPECT_TRUE(r.ok());
        for (FpElem lambda : r.eigenvalues) EXPECT_EQ(characteristic_poly(a).evaluate(lambda), 0u);
    }
}

TEST(CayleyHamilton, CharacteristicPolynomialMatchesDeterminants) {
    std::mt19937_64 rng(81);
    for (FpElem p : {2u, 3u, 5u, 7u})
        for (int trial = 0; trial < 30; ++trial) {
            const std::size_t n = 1 + trial % 5;
            const auto a = random_matrix(rng, p, n);
            const auto chi = characteristic_poly(a);
            ASSERT_EQ(chi.degree(), n);
            for (FpElem x = 0; x < p; ++x) {
                FpMatrix shifted(p, n, n);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < n; ++j)
                        shifted(i, j) = fp_sub(i == j ? x : 0, a(i, j), p);
                EXPECT_EQ(chi.evaluate(x), leibniz_det(shifted));
            }
            EXPECT_EQ(matrix_polynomial(chi, a), FpMatrix(p, n, n));
        }
}

TEST(CayleyHamilton, InverseMatchesGaussJordan) {
    std::mt19937_64 rng(82);
    for (FpElem p : {2u, 3u, 5u, 7u}) {
        int invertible = 0;
        for (int trial = 0; trial < 200 && invertible < 50; ++trial) {
            const auto a = random_matrix(rng, p, 1 + trial % 5);
            const auto gauss = fp_invert(a);
            const auto ch = cayley_hamilton_inverse(a);
            ASSERT_EQ(gauss.has_value(), ch.has_value());
            if (!gauss) continue;
            ++invertible;
            EXPECT_EQ(*ch, *gauss);
        }
        EXPECT_EQ(invertible, 50);
    }
}

TEST(NilpotentShift, NoPolynomialOneInverse) {
    for (FpElem p : {2u, 3u}) {
        const auto s = shift_matrix(p, 3);
        EXPECT_TRUE(polynomial_one_inverse_search(s, 8).empty());
        // the transpose is a {1}-inverse, so the search itself can succeed on other inputs
        EXPECT_FALSE(polynomial_one_inverse_search(FpMatrix::identity(p, 3), 2).empty());
    }
}

TEST(LoopPartition, VanishingChain) {
    for (auto [p, dim, m, k] : std::vector<std::tuple<FpElem, std::size_t, std::size_t, std::size_t>>{
             {2, 3, 4, 1}, {2, 3, 8, 0}, {3, 2, 3, 2}, {2, 4, 4, 0}, {3, 2, 9, 4}, {2, 2, 1, 0}}) {
        const auto t = loop_partition_operator(p, dim, m, k, 1000 + m + k);
        EXPECT_EQ(power(t, m), power(t, k));
        const auto target = FpPolynomial::monomial(p, m) - FpPolynomial::monomial(p, k);
        EXPECT_TRUE(vanishes(target, t));
        const auto minimal = minimal_poly(t);
        const auto found = find_vanishing_poly(t).poly;
        EXPECT_TRUE((found % minimal).is_zero());
        EXPECT_TRUE((target % minimal).is_zero());
    }
    EXPECT_THROW(loop_partition_operator(2, 3, 3, 0, 1), std::invalid_argument);
}

TEST(PlainSetLoop, FactorialPowerReturns) {
    std::mt19937_64 rng(83);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 12;
        std::uniform_int_distribution<Id> pick(0, static_cast<Id>(n - 1));
        std::vector<Id> table(n);
        for (auto& x : table) x = pick(rng);
        const FiniteOperator t(n, table);
        const auto chain = image_chain(t);
        const std::size_t m = chain.sets.back().size();
        if (m > 6) continue;
        std::size_t fact = 1;
        for (std::size_t i = 2; i <= m; ++i) fact *= i;
        const std::size_t l = chain.stabilization;
        EXPECT_EQ(power(t, fact + l), power(t, l));
    }
}
