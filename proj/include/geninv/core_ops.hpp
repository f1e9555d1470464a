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
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace geninv {

using Id = std::uint32_t;
using Vec = std::vector<double>;

/// Raised when an iterative routine exhausts its iteration budget.
class convergence_error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// A total map between the id sets {0..domain_size-1} and {0..codomain_size-1},
/// stored as a dense lookup table.
class FiniteOperator {
   public:
    FiniteOperator() = default;
    FiniteOperator(std::size_t codomain_size, std::vector<Id> table)
        : codomain_size_(codomain_size), table_(std::move(table)) {
        if (table_.empty()) throw std::invalid_argument("finite operator: empty domain");
        if (codomain_size_ == 0) throw std::invalid_argument("finite operator: empty codomain");
        for (std::size_t i = 0; i < table_.size(); ++i) {
            if (table_[i] >= codomain_size_)
                throw std::invalid_argument("finite operator: table[" + std::to_string(i) + "] = " +
                                            std::to_string(table_[i]) + " is outside the codomain of size " +
                                            std::to_string(codomain_size_));
        }
    }

    static FiniteOperator identity(std::size_t n) {
        std::vector<Id> t(n);
        std::iota(t.begin(), t.end(), Id{0});
        return FiniteOperator(n, std::move(t));
    }

    static FiniteOperator constant(std::size_t domain_size, std::size_t codomain_size, Id value) {
        return FiniteOperator(codomain_size, std::vector<Id>(domain_size, value));
    }

    std::size_t domain_size() const noexcept { return table_.size(); }
    std::size_t codomain_size() const noexcept { return codomain_size_; }
    bool is_endofunction() const noexcept { return domain_size() == codomain_size_; }
    const std::vector<Id>& table() const noexcept { return table_; }

    Id operator()(Id v) const { return table_.at(v); }

    friend bool operator==(const FiniteOperator&, const FiniteOperator&) = default;

   private:
    std::size_t codomain_size_ = 0;
    std::vector<Id> table_;
};

inline FiniteOperator compose(const FiniteOperator& outer, const FiniteOperator& inner) {
    if (inner.codomain_size() != outer.domain_size())
        throw std::invalid_argument("compose: inner codomain size " + std::to_string(inner.codomain_size()) +
                                    " differs from outer domain size " + std::to_string(outer.domain_size()));
    std::vector<Id> t(inner.domain_size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = outer.table()[inner.table()[i]];
    return FiniteOperator(outer.codomain_size(), std::move(t));
}

/// k-fold self-composition; power(T, 0) is the identity.
inline FiniteOperator power(const FiniteOperator& op, std::size_t k) {
    if (!op.is_endofunction()) throw std::invalid_argument("power: operator is not an endofunction");
    // square-and-multiply; composition of powers of one map commutes
    FiniteOperator result = FiniteOperator::identity(op.domain_size());
    FiniteOperator base = op;
    while (k > 0) {
        if (k & 1u) result = compose(base, result);
        k >>= 1u;
        if (k > 0) base = compose(base, base);
    }
    return result;
}

/// A deterministic map from R^dim_in to R^dim_out.
class VectorOperator {
   public:
    using Fn = std::function<Vec(std::span<const double>)>;

    VectorOperator() = default;
    VectorOperator(std::size_t dim_in, std::size_t dim_out, Fn fn)
        : dim_in_(dim_in), dim_out_(dim_out), fn_(std::move(fn)) {
        if (!fn_) throw std::invalid_argument("vector operator: empty evaluation rule");
    }

    static VectorOperator identity(std::size_t n) {
        return VectorOperator(n, n, [](std::span<const double> v) { return Vec(v.begin(), v.end()); });
    }

    /// Applies a scalar function to every component.
    static VectorOperator entrywise(std::size_t n, std::function<double(double)> f) {
        return VectorOperator(n, n, [f = std::move(f)](std::span<const double> v) {
            Vec out(v.size());
            std::transform(v.begin(), v.end(), out.begin(), f);
            return out;
        });
    }

    std::size_t dim_in() const noexcept { return dim_in_; }
    std::size_t dim_out() const noexcept { return dim_out_; }
    bool is_endofunction() const noexcept { return dim_in_ == dim_out_; }

    Vec operator()(std::span<const double> v) const {
        if (v.size() != dim_in_)
            throw std::invalid_argument("vector operator: expected input of dimension " + std::to_string(dim_in_) +
                                        ", got " + std::to_string(v.size()));
        Vec out = fn_(v);
        if (out.size() != dim_out_) throw std::logic_error("vector operator: rule returned wrong dimension");
        return out;
    }
    Vec operator()(const Vec& v) const { return (*this)(std::span<const double>(v)); }

   private:
    std::size_t dim_in_ = 0;
    std::size_t dim_out_ = 0;
    Fn fn_;
};

inline VectorOperator compose(const VectorOperator& outer, const VectorOperator& inner) {
    if (inner.dim_out() != outer.dim_in())
        throw std::invalid_argument("compose: inner output dimension " + std::to_string(inner.dim_out()) +
                                    " differs from outer input dimension " + std::to_string(outer.dim_in()));
    return VectorOperator(inner.dim_in(), outer.dim_out(),
                          [outer, inner](std::span<const double> v) { return outer(inner(v)); });
}

inline VectorOperator power(const VectorOperator& op, std::size_t k) {
    if (!op.is_endofunction()) throw std::invalid_argument("power: operator is not an endofunction");
    return VectorOperator(op.dim_in(), op.dim_out(), [op, k](std::span<const double> v) {
        Vec x(v.begin(), v.end());
        for (std::size_t i = 0; i < k; ++i) x = op(x);
        return x;
    });
}

inline VectorOperator scale(double a, const VectorOperator& op) {
    return VectorOperator(op.dim_in(), op.dim_out(), [a, op](std::span<const double> v) {
        Vec x = op(v);
        for (double& xi : x) xi *= a;
        return x;
    });
}

/// Pointwise sum (T1 + T2)(v) = T1(v) + T2(v).
inline VectorOperator add(const VectorOperator& lhs, const VectorOperator& rhs) {
    if (lhs.dim_in() != rhs.dim_in() || lhs.dim_out() != rhs.dim_out())
        throw std::invalid_argument("add: operator dimensions differ");
    return VectorOperator(lhs.dim_in(), lhs.dim_out(), [lhs, rhs](std::span<const double> v) {
        Vec x = lhs(v);
        const Vec y = rhs(v);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i];
        return x;
    });
}

/// Real polynomial a_0 + a_1 x + ... + a_m x^m, coefficients stored low-degree-first.
class OperatorPolynomial {
   public:
    OperatorPolynomial() = default;
    explicit OperatorPolynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

    static OperatorPolynomial monomial(std::size_t degree, double coeff = 1.0) {
        std::vector<double> c(degree + 1, 0.0);
        c[degree] = coeff;
        return OperatorPolynomial(std::move(c));
    }

    const std::vector<double>& coeffs() const noexcept { return coeffs_; }
    bool is_zero() const noexcept { return coeffs_.empty(); }
    /// Undefined (nullopt) for the zero polynomial.
    std::optional<std::size_t> degree() const noexcept {
        if (coeffs_.empty()) return std::nullopt;
        return coeffs_.size() - 1;
    }
    double operator[](std::size_t i) const noexcept { return i < coeffs_.size() ? coeffs_[i] : 0.0; }

    friend OperatorPolynomial operator+(const OperatorPolynomial& p, const OperatorPolynomial& q) {
        std::vector<double> c(std::max(p.coeffs_.size(), q.coeffs_.size()), 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = p[i] + q[i];
        return OperatorPolynomial(std::move(c));
    }

    friend OperatorPolynomial operator*(const OperatorPolynomial& p, const OperatorPolynomial& q) {
        if (p.is_zero() || q.is_zero()) return {};
        std::vector<double> c(p.coeffs_.size() + q.coeffs_.size() - 1, 0.0);
        for (std::size_t i = 0; i < p.coeffs_.size(); ++i)
            for (std::size_t j = 0; j < q.coeffs_.size(); ++j) c[i + j] += p.coeffs_[i] * q.coeffs_[j];
        return OperatorPolynomial(std::move(c));
    }

    friend bool operator==(const OperatorPolynomial&, const OperatorPolynomial&) = default;

   private:
    void trim() {
        while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
    }
    std::vector<double> coeffs_;
};

/// p(T)(v) = sum_i a_i T^i(v), accumulated while iterating T.
inline Vec apply_polynomial(const OperatorPolynomial& p, const VectorOperator& op, std::span<const double> v) {
    if (!op.is_endofunction()) throw std::invalid_argument("apply_polynomial: operator is not an endofunction");
    if (v.size() != op.dim_in()) throw std::invalid_argument("apply_polynomial: vector dimension mismatch");
    Vec acc(v.size(), 0.0);
    Vec iterate(v.begin(), v.end());
    const auto& a = p.coeffs();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i > 0) iterate = op(iterate);
        if (a[i] != 0.0)
            for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += a[i] * iterate[j];
    }
    return acc;
}

inline Vec apply_polynomial(const OperatorPolynomial& p, const VectorOperator& op, const Vec& v) {
    return apply_polynomial(p, op, std::span<const double>(v));
}

}  // namespace geninv
