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
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "geninv/core_ops.hpp"
#include "geninv/endofunction.hpp"
#include "geninv/numerics.hpp"

namespace geninv {

// ---------------------------------------------------------------------------
// Polynomials over F_p

class FpPolynomial {
   public:
    explicit FpPolynomial(FpElem prime = 2) : prime_(prime) { require_prime(prime); }
    FpPolynomial(FpElem prime, const std::vector<std::int64_t>& coeffs) : FpPolynomial(prime) {
        coeffs_.reserve(coeffs.size());
        for (std::int64_t c : coeffs) coeffs_.push_back(fp_reduce(c, prime));
        trim();
    }

    static FpPolynomial from_elems(FpElem prime, FpVector coeffs) {
        FpPolynomial p(prime);
        for (FpElem& c : coeffs) c %= prime;
        p.coeffs_ = std::move(coeffs);
        p.trim();
        return p;
    }
    static FpPolynomial monomial(FpElem prime, std::size_t degree, FpElem c = 1) {
        FpVector v(degree + 1, 0);
        v[degree] = c;
        return from_elems(prime, std::move(v));
    }
    static FpPolynomial constant(FpElem prime, FpElem c) { return from_elems(prime, {c}); }

    FpElem prime() const noexcept { return prime_; }
    const FpVector& coeffs() const noexcept { return coeffs_; }
    bool is_zero() const noexcept { return coeffs_.empty(); }
    // Degree of a nonzero polynomial.
    std::size_t degree() const {
        if (is_zero()) throw std::logic_error("fp polynomial: the zero polynomial has no degree");
        return coeffs_.size() - 1;
    }
    FpElem coefficient(std::size_t i) const noexcept { return i < coeffs_.size() ? coeffs_[i] : 0; }
    FpElem leading() const { return coeffs_.at(degree()); }
    bool is_monic() const { return !is_zero() && leading() == 1; }

    FpElem evaluate(FpElem x) const {
        std::uint64_t acc = 0;
        for (std::size_t i = coeffs_.size(); i-- > 0;) acc = (acc * x + coeffs_[i]) % prime_;
        return static_cast<FpElem>(acc);
    }

    FpPolynomial scaled(FpElem c) const {
        FpVector v = coeffs_;
        for (FpElem& x : v) x = fp_mul(x, c % prime_, prime_);
        return from_elems(prime_, std::move(v));
    }
    FpPolynomial monic() const { return scaled(fp_inv(leading(), prime_)); }

    friend FpPolynomial operator+(const FpPolynomial& a, const FpPolynomial& b) {
        a.same_field(b);
        FpVector v(std::max(a.coeffs_.size(), b.coeffs_.size()), 0);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = fp_add(a.coefficient(i), b.coefficient(i), a.prime_);
        return from_elems(a.prime_, std::move(v));
    }
    friend FpPolynomial operator-(const FpPolynomial& a, const FpPolynomial& b) {
        return a + b.scaled(fp_neg(1, a.prime_));
    }
    friend FpPolynomial operator*(const FpPolynomial& a, const FpPolynomial& b) {
        a.same_field(b);
        if (a.is_zero() || b.is_zero()) return FpPolynomial(a.prime_);
        FpVector v(a.coeffs_.size() + b.coeffs_.size() - 1, 0);
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j)
                v[i + j] = fp_add(v[i + j], fp_mul(a.coeffs_[i], b.coeffs_[j], a.prime_), a.prime_);
        return from_elems(a.prime_, std::move(v));
    }

    // Quotient and remainder of long division by a nonzero divisor.
    friend std::pair<FpPolynomial, FpPolynomial> divmod(const FpPolynomial& a, const FpPolynomial& b) {
        a.same_field(b);
        const FpElem p = a.prime_;
        if (b.is_zero()) throw std::domain_error("fp polynomial: division by zero");
        FpVector rem = a.coeffs_;
        const std::size_t db = b.degree();
        if (rem.size() <= db) return {FpPolynomial(p), a};
        FpVector quot(rem.size() - db, 0);
        const FpElem inv = fp_inv(b.leading(), p);
        for (std::size_t i = rem.size(); i-- > db;) {
            const FpElem f = fp_mul(rem[i], inv, p);
            quot[i - db] = f;
            if (f == 0) continue;
            for (std::size_t j = 0; j <= db; ++j) rem[i - db + j] = fp_sub(rem[i - db + j], fp_mul(f, b.coeffs_[j], p), p);
        }
        return {from_elems(p, std::move(quot)), from_elems(p, std::move(rem))};
    }
    friend FpPolynomial operator%(const FpPolynomial& a, const FpPolynomial& b) { return divmod(a, b).second; }

    friend bool operator==(const FpPolynomial&, const FpPolynomial&) = default;

   private:
    void trim() {
        while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
    }
    void same_field(const FpPolynomial& o) const {
        if (prime_ != o.prime_) throw std::invalid_argument("fp polynomial: field mismatch");
    }

    FpElem prime_ = 2;
    FpVector coeffs_;
};

// ---------------------------------------------------------------------------
// Operators on F_p^n given by a full table

// Largest p^n handled by exhaustive tables.
inline constexpr std::size_t kMaxSpaceSize = 100000;

class FpVectorOperator {
   public:
    FpVectorOperator(FpElem prime, std::size_t dim, std::vector<Id> table)
        : prime_(prime), dim_(dim), table_(std::move(table)) {
        require_prime(prime);
        const std::size_t n = space_size(prime, dim);
        if (table_.size() != n)
            throw std::invalid_argument("fp operator: table needs " + std::to_string(n) + " entries, got " +
                                        std::to_string(table_.size()));
        for (std::size_t i = 0; i < n; ++i)
            if (table_[i] >= n)
                throw std::invalid_argument("fp operator: table[" + std::to_string(i) + "] is not a vector index");
    }

    static std::size_t space_size(FpElem prime, std::size_t dim) {
        std::size_t n = 1;
        for (std::size_t i = 0; i < dim; ++i) {
            n *= prime;
            if (n > kMaxSpaceSize)
                throw std::invalid_argument("fp operator: p^n exceeds " + std::to_string(kMaxSpaceSize));
        }
        return n;
    }

    static FpVectorOperator from_function(FpElem prime, std::size_t dim,
                                          const std::function<FpVector(const FpVector&)>& f) {
        require_prime(prime);
        const std::size_t n = space_size(prime, dim);
        std::vector<Id> table(n);
        for (std::size_t i = 0; i < n; ++i) {
            const FpVector out = f(decode(prime, dim, i));
            if (out.size() != dim) throw std::invalid_argument("fp operator: function changed the dimension");
            table[i] = encode(prime, out);
        }
        return FpVectorOperator(prime, dim, std::move(table));
    }

    // v -> A v + b
    static FpVectorOperator affine(const FpMatrix& a, const FpVector& b) {
        if (a.rows() != a.cols() || b.size() != a.rows())
            throw std::invalid_argument("fp operator: affine map needs square A and matching b");
        const FpElem p = a.prime();
        return from_function(p, a.rows(), [&](const FpVector& v) {
            FpVector out = a.apply(v);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = fp_add(out[i], b[i] % p, p);
            return out;
        });
    }

    static FpVectorOperator identity(FpElem prime, std::size_t dim) {
        std::vector<Id> t(space_size(prime, dim));
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<Id>(i);
        return FpVectorOperator(prime, dim, std::move(t));
    }

    // Index of v, first coordinate most significant.
    static Id encode(FpElem prime, const FpVector& v) {
        std::size_t idx = 0;
        for (FpElem x : v) {
            if (x >= prime) throw std::invalid_argument("fp operator: coordinate outside the field");
            idx = idx * prime + x;
        }
        return static_cast<Id>(idx);
    }
    static FpVector decode(FpElem prime, std::size_t dim, std::size_t idx) {
        FpVector v(dim);
        for (std::size_t i = dim; i-- > 0;) {
            v[i] = static_cast<FpElem>(idx % prime);
            idx /= prime;
        }
        return v;
    }
    Id encode(const FpVector& v) const {
        if (v.size() != dim_) throw std::invalid_argument("fp operator: vector dimension mismatch");
        return encode(prime_, v);
    }
    FpVector decode(std::size_t idx) const { return decode(prime_, dim_, idx); }

    FpElem prime() const noexcept { return prime_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return table_.size(); }
    const std::vector<Id>& table() const noexcept { return table_; }
    Id operator()(Id v) const { return table_.at(v); }
    FpVector operator()(const FpVector& v) const { return decode(table_[encode(v)]); }

    FiniteOperator as_finite() const { return FiniteOperator(size(), table_); }

    friend bool operator==(const FpVectorOperator&, const FpVectorOperator&) = default;

   private:
    FpElem prime_;
    std::size_t dim_;
    std::vector<Id> table_;
};

inline FpVectorOperator compose(const FpVectorOperator& outer, const FpVectorOperator& inner) {
    if (outer.prime() != inner.prime() || outer.dim() != inner.dim())
        throw std::invalid_argument("compose: operators act on different spaces");
    std::vector<Id> t(inner.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = outer.table()[inner.table()[i]];
    return FpVectorOperator(outer.prime(), outer.dim(), std::move(t));
}

inline FpVectorOperator power(const FpVectorOperator& op, std::size_t k) {
    return FpVectorOperator(op.prime(), op.dim(), power(op.as_finite(), k).table());
}

// Componentwise operator on the direct sum; coordinates of part 0 come first.
inline FpVectorOperator product_operator(const std::vector<FpVectorOperator>& parts) {
    if (parts.empty()) throw std::invalid_argument("product_operator: no parts");
    const FpElem p = parts.front().prime();
    std::size_t dim = 0;
    for (const auto& t : parts) {
        if (t.prime() != p) throw std::invalid_argument("product_operator: parts over different fields");
        dim += t.dim();
    }
    return FpVectorOperator::from_function(p, dim, [&](const FpVector& v) {
        FpVector out;
        std::size_t at = 0;
        for (const auto& t : parts) {
            const FpVector piece(v.begin() + static_cast<std::ptrdiff_t>(at),
                                 v.begin() + static_cast<std::ptrdiff_t>(at + t.dim()));
            const FpVector image = t(piece);
            out.insert(out.end(), image.begin(), image.end());
            at += t.dim();
        }
        return out;
    });
}

// q(T)(v) = sum_i q_i T^i(v)
inline FpVector apply_polynomial(const FpPolynomial& q, const FpVectorOperator& t, Id v) {
    if (q.prime() != t.prime()) throw std::invalid_argument("apply_polynomial: field mismatch");
    const FpElem p = t.prime();
    FpVector acc(t.dim(), 0);
    Id cur = v;
    for (std::size_t i = 0; i < q.coeffs().size(); ++i) {
        if (i > 0) cur = t.table()[cur];
        const FpElem c = q.coeffs()[i];
        if (c == 0) continue;
        const FpVector x = t.decode(cur);
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] = fp_add(acc[k], fp_mul(c, x[k], p), p);
    }
    return acc;
}

// The operator v -> q(T)(v).
inline FpVectorOperator polynomial_operator(const FpPolynomial& q, const FpVectorOperator& t) {
    std::vector<Id> table(t.size());
    for (std::size_t v = 0; v < table.size(); ++v) table[v] = t.encode(apply_polynomial(q, t, static_cast<Id>(v)));
    return FpVectorOperator(t.prime(), t.dim(), std::move(table));
}

// Exhaustive check of q(T)(v) = 0 on every vector; the zero polynomial does not count.
inline bool vanishes(const FpPolynomial& q, const FpVectorOperator& t) {
    if (q.is_zero()) return false;
    for (std::size_t v = 0; v < t.size(); ++v) {
        const FpVector r = apply_polynomial(q, t, static_cast<Id>(v));
        if (std::any_of(r.begin(), r.end(), [](FpElem x) { return x != 0; })) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Discovery

struct VanishingResult {
    FpPolynomial poly;
    std::size_t preiterations = 0;  // l with |T^l(V)| = |T^(l+1)(V)|
    std::size_t stable_size = 0;    // m = |T^l(V)|
    std::size_t degree_bound = 0;   // m^2 + l
};

// Largest stable image handled by find_vanishing_poly (the kernel system has m^2 + 1 unknowns).
inline constexpr std::size_t kMaxStableSize = 300;

// Builds x^l * sum_i a_i x^(i-1) where a^T M = 0 for the 0/1 matrix
// M[i][(j,k)] = [T^(i-1)(v_j) = T(v_k)] over the stable image {v_1..v_m}.
inline VanishingResult find_vanishing_poly(const FpVectorOperator& t, std::optional<std::size_t> l = std::nullopt) {
    const FpElem p = t.prime();
    const ImageChain chain = image_chain(t.as_finite());
    const std::size_t least = chain.stabilization;
    const std::size_t pre = l.value_or(least);
    if (pre < least)
        throw std::invalid_argument("find_vanishing_poly: |T^l(V)| != |T^(l+1)(V)| for l = " + std::to_string(pre));
    const std::vector<Id>& stable = chain.sets.back();
    const std::size_t m = stable.size();
    if (m > kMaxStableSize)
        throw std::invalid_argument("find_vanishing_poly: stable image of size " + std::to_string(m) + " exceeds " +
                                    std::to_string(kMaxStableSize));
    const std::size_t rows = m * m + 1;

    // T permutes the stable image, so the row pattern of column (j, k) is periodic: it is determined by the
    // cycle length through v_j and the first step that reaches T(v_k). Equal columns are kept once, and
    // columns with T(v_k) = 0 are dropped because they multiply the zero vector.
    std::set<std::pair<std::size_t, std::size_t>> patterns;
    std::vector<bool> visited(t.size(), false);
    for (Id start : stable) {
        if (visited[start]) continue;
        std::vector<Id> cycle;
        for (Id cur = start; !visited[cur]; cur = t.table()[cur]) {
            visited[cur] = true;
            cycle.push_back(cur);
        }
        // every v_j on this cycle reaches each cycle element; only the offset between them matters
        for (std::size_t offset = 0; offset < cycle.size(); ++offset)
            for (std::size_t j = 0; j < cycle.size(); ++j)
                if (cycle[(j + offset) % cycle.size()] != 0) {
                    patterns.emplace(cycle.size(), offset);
                    break;
                }
    }
    FpMatrix transposed(p, patterns.size(), rows);
    std::size_t r = 0;
    for (const auto& [length, offset] : patterns) {
        for (std::size_t i = offset; i < rows; i += length) transposed(r, i) = 1;
        ++r;
    }

    const FpEchelon e = fp_rref(transposed);
    std::vector<bool> is_pivot(rows, false);
    for (std::size_t c : e.pivots) is_pivot[c] = true;
    std::size_t free_col = 0;
    while (is_pivot[free_col]) ++free_col;  // rows > columns of M, so a free column exists
    FpVector coeffs(pre + free_col + 1, 0);
    coeffs[pre + free_col] = 1;
    for (std::size_t k = 0; k < e.pivots.size(); ++k)
        if (e.pivots[k] < free_col) coeffs[pre + e.pivots[k]] = fp_neg(e.reduced(k, free_col), p);

    VanishingResult out{FpPolynomial::from_elems(p, std::move(coeffs)), pre, m, m * m + pre};
    if (!vanishes(out.poly, t)) throw std::logic_error("find_vanishing_poly: kernel polynomial does not vanish");
    return out;
}

namespace detail {

// Minimal annihilating polynomial of a scalar sequence by Berlekamp-Massey. Exact for the infinite sequence
// whenever its linear complexity is at most half the number of terms given.
inline FpPolynomial berlekamp_massey(const FpVector& s, FpElem p) {
    FpVector c{1}, b{1};
    std::size_t len = 0, shift = 1;
    FpElem last = 1;
    for (std::size_t n = 0; n < s.size(); ++n) {
        FpElem d = s[n];
        for (std::size_t i = 1; i <= len && i < c.size(); ++i) d = fp_add(d, fp_mul(c[i], s[n - i], p), p);
        if (d == 0) {
            ++shift;
            continue;
        }
        const FpElem f = fp_mul(d, fp_inv(last, p), p);
        FpVector prev = c;
        if (c.size() < b.size() + shift) c.resize(b.size() + shift, 0);
        for (std::size_t i = 0; i < b.size(); ++i) c[i + shift] = fp_sub(c[i + shift], fp_mul(f, b[i], p), p);
        if (2 * len <= n) {
            len = n + 1 - len;
            b = std::move(prev);
            last = d;
            shift = 1;
        } else {
            ++shift;
        }
    }
    // connection polynomial C(x) of length len -> annihilator x^len C(1/x)
    FpVector coeffs(len + 1, 0);
    for (std::size_t i = 0; i <= len && i < c.size(); ++i) coeffs[len - i] = c[i];
    return FpPolynomial::from_elems(p, std::move(coeffs));
}

inline FpPolynomial poly_gcd(FpPolynomial a, FpPolynomial b) {
    while (!b.is_zero()) {
        FpPolynomial r = a % b;
        a = std::move(b);
        b = std::move(r);
    }
    return a.is_zero() ? a : a.monic();
}

inline FpPolynomial poly_lcm(const FpPolynomial& a, const FpPolynomial& b) {
    return divmod(a * b, poly_gcd(a, b)).first.monic();
}

inline std::optional<Id> first_nonvanishing_point(const FpPolynomial& q, const FpVectorOperator& t) {
    for (std::size_t v = 0; v < t.size(); ++v) {
        const FpVector r = apply_polynomial(q, t, static_cast<Id>(v));
        if (std::any_of(r.begin(), r.end(), [](FpElem x) { return x != 0; })) return static_cast<Id>(v);
    }
    return std::nullopt;
}

}  // namespace detail

// Monic generator of the vanishing ideal. Every vanishing polynomial annihilates each coordinate sequence
// along every forward orbit, so it is a multiple of their lcm. The lcm is grown from orbits where it still
// fails until it vanishes everywhere, at which point it is the minimal polynomial.
inline FpPolynomial minimal_poly(const FpVectorOperator& t) {
    FpPolynomial g = FpPolynomial::constant(t.prime(), 1);
    while (const auto bad = detail::first_nonvanishing_point(g, t)) {
        std::vector<Id> orbit;
        std::vector<bool> seen(t.size(), false);
        for (Id cur = *bad; !seen[cur]; cur = t.table()[cur]) {
            seen[cur] = true;
            orbit.push_back(cur);
        }
        // the orbit has tail + period = orbit.size(), so x^tail (x^period - 1) bounds every coordinate's complexity
        const std::size_t tail = static_cast<std::size_t>(
            std::find(orbit.begin(), orbit.end(), t.table()[orbit.back()]) - orbit.begin());
        const std::size_t period = orbit.size() - tail;
        std::vector<FpVector> points;
        for (std::size_t j = 0; j < 2 * orbit.size(); ++j)
            points.push_back(t.decode(orbit[j < orbit.size() ? j : tail + (j - tail) % period]));
        for (std::size_t k = 0; k < t.dim(); ++k) {
            FpVector seq(points.size());
            for (std::size_t j = 0; j < points.size(); ++j) seq[j] = points[j][k];
            g = detail::poly_lcm(g, detail::berlekamp_massey(seq, t.prime()));
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Inversion by forward applications

namespace detail {

inline void require_vanishing(const FpPolynomial& q, const FpVectorOperator& t, const char* who) {
    if (q.prime() != t.prime()) throw std::invalid_argument(std::string(who) + ": field mismatch");
    if (!vanishes(q, t)) throw std::invalid_argument(std::string(who) + ": polynomial does not vanish in T");
}

// -c^-1 * sum_{i > k} q_i x^(i-k-1) with c = q_k
inline FpPolynomial shifted_quotient(const FpPolynomial& q, std::size_t k) {
    const FpElem p = q.prime();
    const FpElem scale = fp_neg(fp_inv(q.coefficient(k), p), p);
    FpVector v;
    for (std::size_t i = k + 1; i < q.coeffs().size(); ++i) v.push_back(fp_mul(q.coeffs()[i], scale, p));
    return FpPolynomial::from_elems(p, std::move(v));
}

}  // namespace detail

// S = -a_0^-1 sum_{i>=1} a_i T^(i-1), a left inverse of T; nullopt when a_0 = 0.
inline std::optional<FpVectorOperator> poly_left_inverse(const FpPolynomial& q, const FpVectorOperator& t) {
    detail::require_vanishing(q, t, "poly_left_inverse");
    if (q.coefficient(0) == 0) return std::nullopt;
    FpVectorOperator s = polynomial_operator(detail::shifted_quotient(q, 0), t);
    if (compose(s, t) != FpVectorOperator::identity(t.prime(), t.dim()))
        throw std::logic_error("poly_left_inverse: S T differs from the identity");
    return s;
}

struct PolyLeftDrazin {
    FpVectorOperator inverse;
    std::size_t k = 0;  // index of the lowest nonzero coefficient
    std::size_t m = 1;  // max(k, 1)
};

inline PolyLeftDrazin left_drazin_from_poly(const FpPolynomial& q, const FpVectorOperator& t) {
    detail::require_vanishing(q, t, "left_drazin_from_poly");
    std::size_t k = 0;
    while (q.coefficient(k) == 0) ++k;
    // an empty sum (q = c x^k) gives the zero operator
    PolyLeftDrazin out{polynomial_operator(detail::shifted_quotient(q, k), t), k, std::max<std::size_t>(k, 1)};
    if (compose(out.inverse, power(t, out.m + 1)) != power(t, out.m))
        throw std::logic_error("left_drazin_from_poly: G T^(m+1) differs from T^m");
    return out;
}

// ---------------------------------------------------------------------------
// Derived vanishing polynomials

// sum_i a_i x^(deg - i)
inline FpPolynomial reciprocal_poly(const FpPolynomial& q) {
    if (q.is_zero()) return q;
    FpVector v(q.coeffs().rbegin(), q.coeffs().rend());
    return FpPolynomial::from_elems(q.prime(), std::move(v));
}

// Minimal polynomial of T^-1 from the minimal polynomial of an invertible T.
inline FpPolynomial inverse_minimal_poly(const FpPolynomial& minimal) {
    const FpElem c = minimal.coefficient(0);
    if (c == 0) throw std::invalid_argument("inverse_minimal_poly: zero constant term, T is not invertible");
    return reciprocal_poly(minimal).scaled(fp_inv(c, minimal.prime()));
}

// Vanishing polynomial of degree <= m l for any T1 with T1^l = T^k, given q vanishing in T.
inline FpPolynomial power_vanishing_poly(const FpPolynomial& q, std::size_t k, std::size_t l) {
    if (q.is_zero()) throw std::invalid_argument("power_vanishing_poly: zero polynomial");
    if (l == 0) throw std::invalid_argument("power_vanishing_poly: l must be positive");
    const FpElem p = q.prime();
    const std::size_t m = q.degree();
    // column j holds the coefficients of x^(jk) mod q
    FpMatrix rems(p, std::max<std::size_t>(m, 1), m + 1);
    FpPolynomial xk = FpPolynomial::monomial(p, k) % q;
    FpPolynomial cur = FpPolynomial::constant(p, 1) % q;
    for (std::size_t j = 0; j <= m; ++j) {
        for (std::size_t i = 0; i < m; ++i) rems(i, j) = cur.coefficient(i);
        cur = (cur * xk) % q;
    }
    const auto kernel = fp_solve_kernel(rems);
    const FpVector& alpha = kernel.front();
    FpVector out(m * l + 1, 0);
    for (std::size_t j = 0; j <= m; ++j) out[j * l] = alpha[j];
    return FpPolynomial::from_elems(p, std::move(out));
}

inline FpMatrix matrix_polynomial(const FpPolynomial& q, const FpMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("matrix_polynomial: matrix is not square");
    if (q.prime() != a.prime()) throw std::invalid_argument("matrix_polynomial: field mismatch");
    const FpElem p = a.prime();
    FpMatrix acc(p, a.rows(), a.cols());
    for (std::size_t i = q.coeffs().size(); i-- > 0;) {
        acc = acc * a;
        for (std::size_t d = 0; d < a.rows(); ++d) acc(d, d) = fp_add(acc(d, d), q.coeffs()[i], p);
    }
    return acc;
}

// q^2 - q(1) q, vanishing in v -> A v + b for every b when q vanishes in A.
inline FpPolynomial affine_vanishing_poly(const FpPolynomial& q, const FpMatrix& a) {
    if (q.is_zero() || q.degree() < 1) throw std::invalid_argument("affine_vanishing_poly: degree must be at least 1");
    if (matrix_polynomial(q, a) != FpMatrix(a.prime(), a.rows(), a.cols()))
        throw std::invalid_argument("affine_vanishing_poly: polynomial does not vanish in A");
    return q * q - q.scaled(q.evaluate(1));
}

struct VanishingPart {
    FpPolynomial poly;
    FpVectorOperator op;
};

inline FpPolynomial product_vanishing_poly(const std::vector<VanishingPart>& parts) {
    if (parts.empty()) throw std::invalid_argument("product_vanishing_poly: no parts");
    FpPolynomial out = FpPolynomial::constant(parts.front().poly.prime(), 1);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (!vanishes(parts[i].poly, parts[i].op))
            throw std::invalid_argument("product_vanishing_poly: part " + std::to_string(i) + " does not vanish");
        out = out * parts[i].poly;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Companion embedding and eigenvalue roots

inline FpMatrix companion_matrix(const FpPolynomial& q) {
    if (!q.is_monic() || q.degree() < 1) throw std::invalid_argument("companion_matrix: need a monic polynomial of degree >= 1");
    const FpElem p = q.prime();
    const std::size_t n = q.degree();
    FpMatrix c(p, n, n);
    for (std::size_t i = 1; i < n; ++i) c(i, i - 1) = 1;
    for (std::size_t i = 0; i < n; ++i) c(i, n - 1) = fp_neg(q.coefficient(i), p);
    return c;
}

struct CompanionReport {
    FpMatrix companion;
    std::size_t failures = 0;  // vectors where phi(T v) != C^T phi(v)
    bool holds() const noexcept { return failures == 0; }
};

// phi(v) = (v, T v, ..., T^(n-1) v); checks phi(T v) = C^T phi(v) blockwise on every vector.
inline CompanionReport companion_embedding_check(const FpVectorOperator& t, const FpPolynomial& q) {
    detail::require_vanishing(q, t, "companion_embedding_check");
    CompanionReport out{companion_matrix(q)};
    const FpElem p = t.prime();
    const std::size_t n = q.degree(), dim = t.dim();
    auto phi = [&](Id v) {
        std::vector<FpVector> blocks;
        for (std::size_t i = 0; i < n; ++i, v = t.table()[v]) blocks.push_back(t.decode(v));
        return blocks;
    };
    std::vector<std::vector<std::pair<std::size_t, FpElem>>> nonzero(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (out.companion(j, i) != 0) nonzero[i].emplace_back(j, out.companion(j, i));
    for (std::size_t v = 0; v < t.size(); ++v) {
        const auto lhs = phi(t.table()[v]);
        const auto rhs_in = phi(static_cast<Id>(v));
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            FpVector block(dim, 0);
            for (const auto& [j, c] : nonzero[i])
                for (std::size_t k = 0; k < dim; ++k) block[k] = fp_add(block[k], fp_mul(c, rhs_in[j][k], p), p);
            ok = block == lhs[i];
        }
        if (!ok) ++out.failures;
    }
    return out;
}

struct EigenRootReport {
    std::size_t fixed_points = 0;    // nonzero v with T v = v
    bool one_is_root = true;         // p(1) = 0, required when fixed points exist
    bool zero_preserving = false;    // T(0) = 0
    bool one_homogeneous = false;    // T(a v) = a T(v) for all a != 0 and v
    std::size_t kernel_vectors = 0;  // nonzero v with T v = 0
    bool zero_is_root = true;        // p(0) = 0, required when T(0) = 0 and kernel vectors exist
    std::vector<FpElem> eigenvalues;  // every eigenvalue, listed for 1-homogeneous T over fields with p > 2
    bool eigenvalues_are_roots = true;
    bool ok() const noexcept { return one_is_root && zero_is_root && eigenvalues_are_roots; }
};

inline EigenRootReport eigen_root_check(const FpVectorOperator& t, const FpPolynomial& q) {
    detail::require_vanishing(q, t, "eigen_root_check");
    const FpElem p = t.prime();
    EigenRootReport out;
    out.zero_preserving = t.table()[0] == 0;
    out.one_homogeneous = out.zero_preserving;
    std::vector<bool> eigen(p, false);
    for (std::size_t idx = 1; idx < t.size(); ++idx) {
        const FpVector v = t.decode(idx);
        const FpVector tv = t.decode(t.table()[idx]);
        if (t.table()[idx] == idx) ++out.fixed_points;
        if (t.table()[idx] == 0) ++out.kernel_vectors;
        for (FpElem a = 2; a < p && out.one_homogeneous; ++a) {
            FpVector av = v, atv = tv;
            for (auto& x : av) x = fp_mul(x, a, p);
            for (auto& x : atv) x = fp_mul(x, a, p);
            out.one_homogeneous = t(av) == atv;
        }
        // T v = lambda v for some lambda
        const std::size_t lead = static_cast<std::size_t>(std::find_if(v.begin(), v.end(), [](FpElem x) { return x != 0; }) - v.begin());
        const FpElem lambda = fp_mul(tv[lead], fp_inv(v[lead], p), p);
        FpVector scaled = v;
        for (auto& x : scaled) x = fp_mul(x, lambda, p);
        if (scaled == tv) eigen[lambda] = true;
    }
    if (out.fixed_points > 0) out.one_is_root = q.evaluate(1) == 0;
    if (out.zero_preserving && out.kernel_vectors > 0) out.zero_is_root = q.evaluate(0) == 0;
    if (out.one_homogeneous && p > 2) {
        for (FpElem lambda = 0; lambda < p; ++lambda)
            if (eigen[lambda]) {
                out.eigenvalues.push_back(lambda);
                if (q.evaluate(lambda) != 0) out.eigenvalues_are_roots = false;
            }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Matrices: Cayley-Hamilton inversion and polynomial {1}-inverse search

// det(x I - A) by Berkowitz's division-free recursion.
inline FpPolynomial characteristic_poly(const FpMatrix& a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("characteristic_poly: matrix is not square");
    const FpElem p = a.prime();
    if (n == 0) return FpPolynomial::constant(p, 1);
    // coefficients highest degree first, for the trailing principal block starting at row k
    FpVector poly{1, fp_neg(a(n - 1, n - 1), p)};
    for (std::size_t k = n - 1; k-- > 0;) {
        const std::size_t s = n - k - 1;
        FpVector col(s + 2, 0);
        col[0] = 1;
        col[1] = fp_neg(a(k, k), p);
        // w = A1^j C, starting from C = column below the diagonal
        FpVector w(s);
        for (std::size_t i = 0; i < s; ++i) w[i] = a(k + 1 + i, k);
        for (std::size_t j = 0; j < s; ++j) {
            std::uint64_t rc = 0;
            for (std::size_t i = 0; i < s; ++i) rc = (rc + std::uint64_t{a(k, k + 1 + i)} * w[i]) % p;
            col[j + 2] = fp_neg(static_cast<FpElem>(rc), p);
            FpVector next(s, 0);
            for (std::size_t r = 0; r < s; ++r) {
                std::uint64_t acc = 0;
                for (std::size_t c = 0; c < s; ++c) acc = (acc + std::uint64_t{a(k + 1 + r, k + 1 + c)} * w[c]) % p;
                next[r] = static_cast<FpElem>(acc);
            }
            w = std::move(next);
        }
        FpVector updated(s + 2, 0);
        for (std::size_t i = 0; i < s + 2; ++i) {
            std::uint64_t acc = 0;
            for (std::size_t j = 0; j <= std::min(i, s); ++j) acc = (acc + std::uint64_t{col[i - j]} * poly[j]) % p;
            updated[i] = static_cast<FpElem>(acc);
        }
        poly = std::move(updated);
    }
    std::reverse(poly.begin(), poly.end());
    return FpPolynomial::from_elems(p, std::move(poly));
}

// A^-1 = -c_0^-1 sum_{i>=1} c_i A^(i-1) from the characteristic polynomial; nullopt when A is singular.
inline std::optional<FpMatrix> cayley_hamilton_inverse(const FpMatrix& a) {
    const FpPolynomial chi = characteristic_poly(a);
    if (chi.coefficient(0) == 0) return std::nullopt;
    return matrix_polynomial(detail::shifted_quotient(chi, 0), a);
}

// Every q of degree <= max_degree with A q(A) A = A, found by trying all coefficient vectors.
inline std::vector<FpPolynomial> polynomial_one_inverse_search(const FpMatrix& a, std::size_t max_degree) {
    const FpElem p = a.prime();
    std::size_t total = 1;
    for (std::size_t i = 0; i <= max_degree; ++i) {
        total *= p;
        if (total > 10'000'000) throw std::invalid_argument("polynomial_one_inverse_search: too many candidates");
    }
    std::vector<FpPolynomial> found;
    FpVector coeffs(max_degree + 1, 0);
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t c = code;
        for (auto& x : coeffs) {
            x = static_cast<FpElem>(c % p);
            c /= p;
        }
        const FpPolynomial q = FpPolynomial::from_elems(p, coeffs);
        if (a * matrix_polynomial(q, a) * a == a) found.push_back(q);
    }
    return found;
}

// The n x n matrix with ones on the superdiagonal.
inline FpMatrix shift_matrix(FpElem prime, std::size_t n) {
    FpMatrix s(prime, n, n);
    for (std::size_t i = 0; i + 1 < n; ++i) s(i, i + 1) = 1;
    return s;
}

// ---------------------------------------------------------------------------
// Loop-partition operators

// Splits F_p^n into m equal blocks A_0..A_(m-1); T maps A_i onto A_(i+1) by random bijections and closes
// the loop from A_(m-1) back onto A_k, so that T^m = T^k.
inline FpVectorOperator loop_partition_operator(FpElem prime, std::size_t dim, std::size_t m, std::size_t k,
                                                std::uint64_t seed) {
    const std::size_t n = FpVectorOperator::space_size(prime, dim);
    if (m == 0 || k >= m || n % m != 0)
        throw std::invalid_argument("loop_partition_operator: need 0 <= k < m with m dividing p^n");
    const std::size_t block = n / m;
    std::mt19937_64 rng(seed);
    std::vector<Id> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<Id>(i);
    std::shuffle(order.begin(), order.end(), rng);
    auto member = [&](std::size_t part, std::size_t pos) { return order[part * block + pos]; };

    std::vector<Id> table(n);
    std::vector<std::size_t> perm(block);
    std::vector<std::size_t> where(block);  // where[s]: position in the current block reached from A_k position s
    for (std::size_t s = 0; s < block; ++s) where[s] = s;
    for (std::size_t part = 0; part + 1 < m; ++part) {
        for (std::size_t s = 0; s < block; ++s) perm[s] = s;
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t s = 0; s < block; ++s) table[member(part, s)] = member(part + 1, perm[s]);
        if (part >= k)
            for (std::size_t s = 0; s < block; ++s) where[s] = perm[where[s]];
    }
    for (std::size_t s = 0; s < block; ++s) table[member(m - 1, where[s])] = member(k, s);
    return FpVectorOperator(prime, dim, std::move(table));
}

}  // namespace geninv
