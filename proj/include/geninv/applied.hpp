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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "geninv/least_norm_qp.hpp"
#include "geninv/numerics.hpp"
#include "geninv/pseudo_inverse.hpp"
#include "geninv/structured_inverse.hpp"

namespace geninv {

enum class Activation { tanh, relu };

inline Activation parse_activation(const std::string& name) {
    if (name == "tanh") return Activation::tanh;
    if (name == "relu") return Activation::relu;
    throw std::invalid_argument("unknown activation '" + name + "' (expected tanh or relu)");
}

// One layer v -> act(A v). With a clip parameter k the tanh output is projected onto [-1+1/k, 1-1/k]^m.
class NeuralLayer {
   public:
    NeuralLayer(DenseMatrix weights, Activation act, std::optional<int> clip = std::nullopt)
        : weights_(std::move(weights)), act_(act), clip_(clip) {
        if (weights_.rows() == 0 || weights_.rows() > weights_.cols())
            throw std::invalid_argument("neural layer: weights must be m x n with 1 <= m <= n");
        const auto f = svd(weights_);
        const double largest = f.S.front(), smallest = f.S.back();
        if (!(smallest > 1e-10 * largest)) throw std::invalid_argument("neural layer: weights are not full rank");
        if (clip_) {
            if (act_ != Activation::tanh) throw std::invalid_argument("neural layer: clipping applies to tanh only");
            if (*clip_ <= 1) throw std::invalid_argument("neural layer: clip parameter k must exceed 1");
        }
    }

    const DenseMatrix& weights() const noexcept { return weights_; }
    Activation activation() const noexcept { return act_; }
    const std::optional<int>& clip() const noexcept { return clip_; }
    std::size_t inputs() const noexcept { return weights_.cols(); }
    std::size_t outputs() const noexcept { return weights_.rows(); }

    // Largest |output| allowed by the clip, 1 - 1/k.
    double clip_bound() const {
        if (!clip_) throw std::logic_error("neural layer: no clip parameter");
        return 1.0 - 1.0 / static_cast<double>(*clip_);
    }

    Vec operator()(std::span<const double> v) const {
        Vec out = weights_.apply(v);
        for (double& x : out) x = act_ == Activation::relu ? std::max(x, 0.0) : std::tanh(x);
        if (clip_) {
            const double c = clip_bound();
            for (double& x : out) x = std::clamp(x, -c, c);
        }
        return out;
    }

    VectorOperator as_operator() const {
        NeuralLayer self = *this;
        return VectorOperator(inputs(), outputs(), [self](std::span<const double> v) { return self(v); });
    }

   private:
    DenseMatrix weights_;
    Activation act_;
    std::optional<int> clip_;
};

// A^+ atanh(w); undefined as soon as one |w_i| >= 1, since tanh never reaches the boundary.
inline std::optional<Vec> tanh_layer_pinv(const NeuralLayer& layer, std::span<const double> w) {
    if (layer.activation() != Activation::tanh) throw std::invalid_argument("tanh_layer_pinv: layer is not tanh");
    if (w.size() != layer.outputs()) throw std::invalid_argument("tanh_layer_pinv: target dimension mismatch");
    Vec pre(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!(std::abs(w[i]) < 1.0)) return std::nullopt;
        pre[i] = std::atanh(w[i]);
    }
    return mp_inverse(layer.weights()).apply(pre);
}

inline QpResult clipped_tanh_layer_pinv(const NeuralLayer& layer, std::span<const double> w) {
    if (layer.activation() != Activation::tanh || !layer.clip())
        throw std::invalid_argument("clipped_tanh_layer_pinv: layer needs tanh with a clip parameter");
    if (w.size() != layer.outputs()) throw std::invalid_argument("clipped_tanh_layer_pinv: target dimension mismatch");
    const double c = layer.clip_bound();
    const double pre_bound = std::atanh(c);
    const std::size_t m = w.size();
    Vec target(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double clamped = std::clamp(w[i], -c, c);
        target[i] = clamped == c ? pre_bound : clamped == -c ? -pre_bound : std::atanh(clamped);
    }
    return least_norm_box_preimage(layer.weights(), Vec(m, -pre_bound), Vec(m, pre_bound), target);
}

inline QpResult relu_layer_pinv(const NeuralLayer& layer, std::span<const double> w) {
    if (layer.activation() != Activation::relu) throw std::invalid_argument("relu_layer_pinv: layer is not relu");
    if (w.size() != layer.outputs()) throw std::invalid_argument("relu_layer_pinv: target dimension mismatch");
    return projection_after_linear_pinv(layer.weights(), ConvexSet::nonnegative_orthant(layer.outputs()), w);
}

// ---------------------------------------------------------------------------
// Wavelet thresholding

struct WaveletBasis {
    DenseMatrix transform;  // rows are the basis vectors

    explicit WaveletBasis(DenseMatrix a) : transform(std::move(a)) {
        if (transform.rows() != transform.cols()) throw std::invalid_argument("wavelet basis: matrix must be square");
        const DenseMatrix gram = transform.transpose() * transform;
        const DenseMatrix gap = gram - DenseMatrix::identity(transform.rows());
        double worst = 0.0;
        for (double x : gap.data()) worst = std::max(worst, std::abs(x));
        if (worst > 1e-12) throw std::invalid_argument("wavelet basis: matrix is not orthonormal");
    }

    std::size_t size() const noexcept { return transform.rows(); }
    Vec analyze(std::span<const double> x) const { return transform.apply(x); }
    Vec synthesize(std::span<const double> c) const { return transform.transpose().apply(c); }
};

inline WaveletBasis haar_basis(std::size_t n) {
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("haar_basis: size must be a power of two");
    DenseMatrix h = DenseMatrix::identity(1);
    const double r = 1.0 / std::sqrt(2.0);
    for (std::size_t half = 1; half < n; half *= 2) {
        DenseMatrix next(2 * half, 2 * half);
        for (std::size_t i = 0; i < half; ++i) {
            for (std::size_t j = 0; j < half; ++j) {
                next(i, 2 * j) = r * h(i, j);
                next(i, 2 * j + 1) = r * h(i, j);
            }
            next(half + i, 2 * i) = r;
            next(half + i, 2 * i + 1) = -r;
        }
        h = std::move(next);
    }
    return WaveletBasis(std::move(h));
}

struct WaveletRoundtrip {
    Vec denoised;   // A^T sigma(A x)
    Vec roundtrip;  // A^T sigma_pinv(sigma(A x))
    double difference = 0.0;
    // soft thresholding with a > 0 only: a signal where the two pipelines disagree
    std::optional<Vec> witness;
    double witness_difference = 0.0;
};

namespace detail {

inline void threshold_pipelines(const WaveletBasis& basis, const Scalar1DOperator& sigma, std::span<const double> x,
                                Vec& denoised, Vec& roundtrip) {
    Vec thresholded = basis.analyze(x);
    for (double& u : thresholded) u = sigma(u);
    Vec lifted = thresholded;
    for (double& u : lifted) u = closed_form_pinv(sigma, u).value;
    denoised = basis.synthesize(thresholded);
    roundtrip = basis.synthesize(lifted);
}

}  // namespace detail

inline WaveletRoundtrip wavelet_threshold_roundtrip(const WaveletBasis& basis, ScalarKind kind, double a,
                                                    std::span<const double> x) {
    if (kind != ScalarKind::hard_threshold && kind != ScalarKind::soft_threshold)
        throw std::invalid_argument("wavelet_threshold_roundtrip: kind must be hard or soft thresholding");
    if (x.size() != basis.size()) throw std::invalid_argument("wavelet_threshold_roundtrip: signal length mismatch");
    const auto sigma = Scalar1DOperator::make(kind, a);
    WaveletRoundtrip out;
    detail::threshold_pipelines(basis, sigma, x, out.denoised, out.roundtrip);
    out.difference = distance(out.denoised, out.roundtrip);
    if (kind == ScalarKind::soft_threshold && a > 0.0) {
        Vec coeffs(basis.size(), 0.0);
        coeffs[0] = a + 1.0;
        Vec witness = basis.synthesize(coeffs), d, r;
        detail::threshold_pipelines(basis, sigma, witness, d, r);
        out.witness_difference = distance(d, r);
        out.witness = std::move(witness);
    }
    return out;
}

}  // namespace geninv
