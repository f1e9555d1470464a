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
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "core_ops.hpp"

namespace geninv {

/// Row-major real matrix with finite entries.
class DenseMatrix {
   public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_)
            throw std::invalid_argument("dense matrix: expected " + std::to_string(rows_ * cols_) + " entries, got " +
                                        std::to_string(data_.size()));
        for (std::size_t i = 0; i < data_.size(); ++i)
            if (!std::isfinite(data_[i]))
                throw std::invalid_argument("dense matrix: entry " + std::to_string(i) + " is not finite");
    }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows) {
        if (rows.empty()) return {};
        std::vector<double> d;
        for (const auto& r : rows) {
            if (r.size() != rows.front().size()) throw std::invalid_argument("dense matrix: ragged rows");
            d.insert(d.end(), r.begin(), r.end());
        }
        return DenseMatrix(rows.size(), rows.front().size(), std::move(d));
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    const std::vector<double>& data() const noexcept { return data_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    DenseMatrix transpose() const {
        DenseMatrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (double x : data_) s += x * x;
        return std::sqrt(s);
    }

    Vec apply(std::span<const double> v) const {
        if (v.size() != cols_) throw std::invalid_argument("dense matrix: vector dimension mismatch");
        Vec out(rows_, 0.0);
        for (std::size_t r = 0; r < rows_; ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < cols_; ++c) s += (*this)(r, c) * v[c];
            out[r] = s;
        }
        return out;
    }

    friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("dense matrix: product dimension mismatch");
        DenseMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
            }
        return out;
    }

    friend DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("dense matrix: shape mismatch");
        DenseMatrix out = a;
        for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] -= b.data_[i];
        return out;
    }

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

   private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Wraps v -> A v as a vector operator.
inline VectorOperator linear_operator(const DenseMatrix& a) {
    return VectorOperator(a.cols(), a.rows(), [a](std::span<const double> v) { return a.apply(v); });
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

struct SvdFactors {
    DenseMatrix U;  // rows x rows
    Vec S;          // min(rows, cols) values, descending
    DenseMatrix Vt; // cols x cols
    bool converged = true;
    int sweeps = 0;
};

namespace detail {

// Appends standard basis directions, orthogonalised twice, until `cols` has `target` columns.
inline void complete_orthonormal(std::vector<Vec>& cols, std::size_t dim, std::size_t target) {
    for (std::size_t e = 0; e < dim && cols.size() < target; ++e) {
        Vec cand(dim, 0.0);
        cand[e] = 1.0;
        for (int pass = 0; pass < 2; ++pass)
            for (const Vec& q : cols) {
                const double d = dot(cand, q);
                for (std::size_t i = 0; i < dim; ++i) cand[i] -= d * q[i];
            }
        const double nrm = norm2(cand);
        if (nrm < 1e-8) continue;
        for (double& x : cand) x /= nrm;
        cols.push_back(std::move(cand));
    }
}

// One-sided Jacobi for rows >= cols.
inline SvdFactors svd_tall(const DenseMatrix& a) {
    constexpr double kOffTol = 1e-14;
    constexpr int kMaxSweeps = 60;
    const std::size_t m = a.rows(), n = a.cols();

    std::vector<Vec> work(n, Vec(m));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i) work[j][i] = a(i, j);
    std::vector<Vec> right(n, Vec(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) right[j][j] = 1.0;

    SvdFactors out;
    out.converged = false;
    for (int sweep = 1; sweep <= kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double alpha = dot(work[p], work[p]);
                const double beta = dot(work[q], work[q]);
                const double gamma = dot(work[p], work[q]);
                if (gamma == 0.0 || std::abs(gamma) <= kOffTol * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double xp = work[p][i], xq = work[q][i];
                    work[p][i] = c * xp - s * xq;
                    work[q][i] = s * xp + c * xq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double xp = right[p][i], xq = right[q][i];
                    right[p][i] = c * xp - s * xq;
                    right[q][i] = s * xp + c * xq;
                }
            }
        out.sweeps = sweep;
        if (!rotated) {
            out.converged = true;
            break;
        }
    }

    std::vector<std::size_t> order(n);
    Vec sigma(n);
    for (std::size_t j = 0; j < n; ++j) {
        order[j] = j;
        sigma[j] = norm2(work[j]);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });
    const double smax = n > 0 ? sigma[order[0]] : 0.0;

    std::vector<Vec> ucols;
    out.S.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = order[k];
        out.S[k] = sigma[j];
        if (sigma[j] > 1e-13 * smax && sigma[j] > 0.0) {
            Vec u = work[j];
            for (double& x : u) x /= sigma[j];
            ucols.push_back(std::move(u));
        } else {
            break;
        }
    }
    complete_orthonormal(ucols, m, m);

    out.U = DenseMatrix(m, m);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < m; ++i) out.U(i, j) = ucols[j][i];
    out.Vt = DenseMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) out.Vt(k, i) = right[order[k]][i];
    return out;
}

}  // namespace detail

/// Singular value decomposition A = U diag(S) Vt.
inline SvdFactors svd(const DenseMatrix& a) {
    if (a.rows() >= a.cols()) return detail::svd_tall(a);
    SvdFactors t = detail::svd_tall(a.transpose());
    SvdFactors out;
    out.U = t.Vt.transpose();
    out.S = std::move(t.S);
    out.Vt = t.U.transpose();
    out.converged = t.converged;
    out.sweeps = t.sweeps;
    return out;
}

/// Moore-Penrose inverse; singular values at or below tol * max singular value count as zero.
inline DenseMatrix mp_inverse(const DenseMatrix& a, double tol = 1e-12) {
    const SvdFactors f = svd(a);
    DenseMatrix out(a.cols(), a.rows());
    if (f.S.empty() || f.S[0] == 0.0) return out;
    const double cutoff = tol * f.S[0];
    for (std::size_t k = 0; k < f.S.size(); ++k) {
        if (f.S[k] <= cutoff) break;
        const double inv = 1.0 / f.S[k];
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double vi = f.Vt(k, i) * inv;
            if (vi == 0.0) continue;
            for (std::size_t j = 0; j < a.rows(); ++j) out(i, j) += vi * f.U(j, k);
        }
    }
    return out;
}

/// Solves a square system by partial-pivot elimination; nullopt when a pivot falls below pivot_tol.
inline std::optional<Vec> solve_linear(DenseMatrix a, Vec b, double pivot_tol = 1e-13) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) throw std::invalid_argument("solve_linear: shape mismatch");
    double scale = 0.0;
    for (double x : a.data()) scale = std::max(scale, std::abs(x));
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (std::abs(a(piv, col)) <= pivot_tol * std::max(scale, 1.0)) return std::nullopt;
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(piv, c), a(col, c));
            std::swap(b[piv], b[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
            b[r] -= f * b[col];
        }
    }
    Vec x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a(i, c) * x[c];
        x[i] = s / a(i, i);
    }
    return x;
}

inline double determinant(DenseMatrix a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("determinant: matrix is not square");
    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (a(piv, col) == 0.0) return 0.0;
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(piv, c), a(col, c));
            det = -det;
        }
        det *= a(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
        }
    }
    return det;
}

// ---------------------------------------------------------------------------
// Prime field arithmetic

using FpElem = std::uint32_t;
using FpVector = std::vector<FpElem>;

inline bool is_prime(std::uint64_t p) {
    if (p < 2) return false;
    for (std::uint64_t d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

inline void require_prime(std::uint64_t p) {
    if (p >= (1ull << 31) || !is_prime(p))
        throw std::invalid_argument("prime field: " + std::to_string(p) + " is not a prime below 2^31");
}

inline FpElem fp_reduce(std::int64_t x, FpElem p) {
    const std::int64_t r = x % static_cast<std::int64_t>(p);
    return static_cast<FpElem>(r < 0 ? r + p : r);
}
inline FpElem fp_add(FpElem a, FpElem b, FpElem p) { return static_cast<FpElem>((std::uint64_t{a} + b) % p); }
inline FpElem fp_sub(FpElem a, FpElem b, FpElem p) { return static_cast<FpElem>((std::uint64_t{a} + p - b) % p); }
inline FpElem fp_mul(FpElem a, FpElem b, FpElem p) { return static_cast<FpElem>((std::uint64_t{a} * b) % p); }
inline FpElem fp_neg(FpElem a, FpElem p) { return a == 0 ? 0 : p - a; }

inline FpElem fp_pow(FpElem a, std::uint64_t e, FpElem p) {
    FpElem r = 1 % p;
    while (e > 0) {
        if (e & 1u) r = fp_mul(r, a, p);
        a = fp_mul(a, a, p);
        e >>= 1u;
    }
    return r;
}

inline FpElem fp_inv(FpElem a, FpElem p) {
    if (a % p == 0) throw std::domain_error("prime field: zero has no inverse");
    return fp_pow(a, p - 2, p);
}

/// Matrix over F_p, row-major, entries in [0, p).
class FpMatrix {
   public:
    FpMatrix() = default;
    FpMatrix(FpElem prime, std::size_t rows, std::size_t cols)
        : prime_(prime), rows_(rows), cols_(cols), data_(rows * cols, 0) {
        require_prime(prime);
    }
    FpMatrix(FpElem prime, std::size_t rows, std::size_t cols, const std::vector<std::int64_t>& entries)
        : FpMatrix(prime, rows, cols) {
        if (entries.size() != rows * cols)
            throw std::invalid_argument("fp matrix: expected " + std::to_string(rows * cols) + " entries, got " +
                                        std::to_string(entries.size()));
        for (std::size_t i = 0; i < entries.size(); ++i) data_[i] = fp_reduce(entries[i], prime);
    }

    static FpMatrix identity(FpElem prime, std::size_t n) {
        FpMatrix m(prime, n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    FpElem prime() const noexcept { return prime_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    const std::vector<FpElem>& data() const noexcept { return data_; }

    FpElem& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    FpElem operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    FpVector apply(const FpVector& v) const {
        if (v.size() != cols_) throw std::invalid_argument("fp matrix: vector dimension mismatch");
        FpVector out(rows_, 0);
        for (std::size_t r = 0; r < rows_; ++r) {
            std::uint64_t s = 0;
            for (std::size_t c = 0; c < cols_; ++c) s = (s + std::uint64_t{(*this)(r, c)} * v[c]) % prime_;
            out[r] = static_cast<FpElem>(s);
        }
        return out;
    }

    friend FpMatrix operator*(const FpMatrix& a, const FpMatrix& b) {
        if (a.prime_ != b.prime_) throw std::invalid_argument("fp matrix: field mismatch");
        if (a.cols_ != b.rows_) throw std::invalid_argument("fp matrix: product dimension mismatch");
        FpMatrix out(a.prime_, a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t j = 0; j < b.cols_; ++j) {
                std::uint64_t s = 0;
                for (std::size_t k = 0; k < a.cols_; ++k) s = (s + std::uint64_t{a(i, k)} * b(k, j)) % a.prime_;
                out(i, j) = static_cast<FpElem>(s);
            }
        return out;
    }

    friend bool operator==(const FpMatrix&, const FpMatrix&) = default;

   private:
    FpElem prime_ = 2;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<FpElem> data_;
};

struct FpEchelon {
    FpMatrix reduced;                 // reduced row echelon form
    std::vector<std::size_t> pivots;  // pivot column of each nonzero row
};

inline FpEchelon fp_rref(FpMatrix a) {
    const FpElem p = a.prime();
    FpEchelon out;
    std::size_t row = 0;
    for (std::size_t col = 0; col < a.cols() && row < a.rows(); ++col) {
        std::size_t piv = row;
        while (piv < a.rows() && a(piv, col) == 0) ++piv;
        if (piv == a.rows()) continue;
        if (piv != row)
            for (std::size_t c = 0; c < a.cols(); ++c) std::swap(a(piv, c), a(row, c));
        const FpElem inv = fp_inv(a(row, col), p);
        for (std::size_t c = col; c < a.cols(); ++c) a(row, c) = fp_mul(a(row, c), inv, p);
        for (std::size_t r = 0; r < a.rows(); ++r) {
            if (r == row || a(r, col) == 0) continue;
            const FpElem f = a(r, col);
            for (std::size_t c = col; c < a.cols(); ++c) a(r, c) = fp_sub(a(r, c), fp_mul(f, a(row, c), p), p);
        }
        out.pivots.push_back(col);
        ++row;
    }
    out.reduced = std::move(a);
    return out;
}

inline std::size_t fp_rank(const FpMatrix& a) { return fp_rref(a).pivots.size(); }

/// Null-space basis: one vector per free column, in increasing free-column order.
inline std::vector<FpVector> fp_solve_kernel(const FpMatrix& a) {
    const FpElem p = a.prime();
    const FpEchelon e = fp_rref(a);
    std::vector<bool> is_pivot(a.cols(), false);
    for (std::size_t c : e.pivots) is_pivot[c] = true;
    std::vector<FpVector> basis;
    for (std::size_t f = 0; f < a.cols(); ++f) {
        if (is_pivot[f]) continue;
        FpVector x(a.cols(), 0);
        x[f] = 1;
        for (std::size_t r = 0; r < e.pivots.size(); ++r) x[e.pivots[r]] = fp_neg(e.reduced(r, f), p);
        basis.push_back(std::move(x));
    }
    return basis;
}

/// Inverse by Gauss-Jordan on [A | I]; nullopt when A is singular.
inline std::optional<FpMatrix> fp_invert(const FpMatrix& a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("fp_invert: matrix is not square");
    if (n == 0) return a;
    FpMatrix aug(a.prime(), n, 2 * n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) aug(r, c) = a(r, c);
        aug(r, n + r) = 1;
    }
    const FpEchelon e = fp_rref(aug);
    if (e.pivots.size() < n || e.pivots[n - 1] != n - 1) return std::nullopt;
    FpMatrix inv(a.prime(), n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) inv(r, c) = e.reduced(r, n + c);
    return inv;
}

}  // namespace geninv
