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
#include <limits>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "core_ops.hpp"

namespace geninv {

/// Sorted, duplicate-free list of codomain ids hit by T.
inline std::vector<Id> image(const FiniteOperator& t) {
    std::vector<bool> hit(t.codomain_size(), false);
    for (Id w : t.table()) hit[w] = true;
    std::vector<Id> out;
    for (std::size_t w = 0; w < hit.size(); ++w)
        if (hit[w]) out.push_back(static_cast<Id>(w));
    return out;
}

/// Degrees of freedom of a {1,2}-inverse: one chosen source per image element (`v0`, a set of domain
/// ids) and a retraction of the codomain onto the image (`p0`, indexed by codomain id).
struct OneTwoInverseSpec {
    std::vector<Id> v0;
    std::vector<Id> p0;
};

struct MpFlags {
    bool mp1 = false;
    bool mp2 = false;
    bool both() const noexcept { return mp1 && mp2; }
};

namespace detail {

// For each codomain id, the chosen source in v0, or nullopt off the image. Throws on an invalid spec.
inline std::vector<std::optional<Id>> validate_spec(const FiniteOperator& t, const OneTwoInverseSpec& spec) {
    const auto img = image(t);
    std::vector<bool> in_image(t.codomain_size(), false);
    for (Id w : img) in_image[w] = true;

    std::vector<std::optional<Id>> source(t.codomain_size());
    for (Id v : spec.v0) {
        if (v >= t.domain_size()) throw std::invalid_argument("spec: v0 id " + std::to_string(v) + " outside domain");
        const Id w = t.table()[v];
        if (source[w])
            throw std::invalid_argument("spec: v0 holds two sources (" + std::to_string(*source[w]) + ", " +
                                        std::to_string(v) + ") of " + std::to_string(w));
        source[w] = v;
    }
    for (Id w : img)
        if (!source[w]) throw std::invalid_argument("spec: v0 has no source for image element " + std::to_string(w));

    if (spec.p0.size() != t.codomain_size())
        throw std::invalid_argument("spec: p0 must have one entry per codomain id");
    for (std::size_t w = 0; w < spec.p0.size(); ++w) {
        const Id target = spec.p0[w];
        if (target >= t.codomain_size() || !in_image[target])
            throw std::invalid_argument("spec: p0[" + std::to_string(w) + "] is not in the image");
        if (in_image[w] && target != w)
            throw std::invalid_argument("spec: p0 is not the identity on image element " + std::to_string(w));
    }
    return source;
}

}  // namespace detail

/// Smallest-id source per image element; off-image ids retract to the nearest image id (smaller on ties).
inline OneTwoInverseSpec default_spec(const FiniteOperator& t) {
    const auto img = image(t);
    std::vector<std::optional<Id>> first(t.codomain_size());
    for (std::size_t v = 0; v < t.domain_size(); ++v)
        if (!first[t.table()[v]]) first[t.table()[v]] = static_cast<Id>(v);
    OneTwoInverseSpec spec;
    for (Id w : img) spec.v0.push_back(*first[w]);
    std::sort(spec.v0.begin(), spec.v0.end());
    spec.p0.resize(t.codomain_size());
    for (std::size_t w = 0; w < t.codomain_size(); ++w) {
        Id best = img.front();
        for (Id u : img) {
            const auto du = std::llabs(static_cast<long long>(u) - static_cast<long long>(w));
            const auto db = std::llabs(static_cast<long long>(best) - static_cast<long long>(w));
            if (du < db) best = u;
        }
        spec.p0[w] = best;
    }
    return spec;
}

/// G = (T restricted to v0)^{-1} composed with p0.
inline FiniteOperator build_one_two_inverse(const FiniteOperator& t, const OneTwoInverseSpec& spec) {
    const auto source = detail::validate_spec(t, spec);
    std::vector<Id> table(t.codomain_size());
    for (std::size_t w = 0; w < table.size(); ++w) table[w] = *source[spec.p0[w]];
    return FiniteOperator(t.domain_size(), std::move(table));
}

/// Exact evaluation of T G T = T and G T G = G by table composition.
inline MpFlags check_mp_axioms(const FiniteOperator& t, const FiniteOperator& g) {
    if (g.domain_size() != t.codomain_size() || g.codomain_size() != t.domain_size())
        throw std::invalid_argument("check_mp_axioms: G must map the codomain of T back to its domain");
    MpFlags f;
    f.mp1 = compose(t, compose(g, t)) == t;
    f.mp2 = compose(g, compose(t, g)) == g;
    return f;
}

/// Applies the {1,2} construction to G with sources T(V) and retraction G T; returns T when G is a {1,2}-inverse.
inline FiniteOperator double_inverse(const FiniteOperator& t, const FiniteOperator& g) {
    if (!check_mp_axioms(t, g).both()) throw std::invalid_argument("double_inverse: G is not a {1,2}-inverse of T");
    OneTwoInverseSpec spec;
    spec.v0 = image(t);
    spec.p0 = compose(g, t).table();
    return build_one_two_inverse(g, spec);
}

/// Number of {1,2}-inverses: product over image elements of their preimage sizes, times
/// |T(V)| choices for every codomain id off the image. Saturates at the largest uint64 value.
inline std::uint64_t count_one_two_inverses(const FiniteOperator& t) {
    std::vector<std::uint64_t> fibre(t.codomain_size(), 0);
    for (Id w : t.table()) ++fibre[w];
    const auto img = image(t);
    std::uint64_t count = 1;
    constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
    for (std::size_t w = 0; w < fibre.size(); ++w) {
        const std::uint64_t f = fibre[w] > 0 ? fibre[w] : img.size();
        count = count > kMax / f ? kMax : count * f;
    }
    return count;
}

/// Every {1,2}-inverse, in lexicographic order of tables (index 0 varies slowest).
inline std::vector<FiniteOperator> enumerate_one_two_inverses(const FiniteOperator& t) {
    if (count_one_two_inverses(t) > 1'000'000)
        throw std::invalid_argument("enumerate_one_two_inverses: more than 10^6 inverses");

    const std::size_t nw = t.codomain_size();
    std::vector<std::vector<Id>> fibres(nw);
    for (std::size_t v = 0; v < t.domain_size(); ++v) fibres[t.table()[v]].push_back(static_cast<Id>(v));

    // Positions on the image pick a source; positions off the image pick an image element whose
    // chosen source they copy.
    const auto img = image(t);
    std::vector<std::size_t> radix(nw);
    for (std::size_t w = 0; w < nw; ++w) radix[w] = fibres[w].empty() ? img.size() : fibres[w].size();

    std::vector<FiniteOperator> out;
    std::vector<std::size_t> digit(nw, 0);
    for (;;) {
        std::vector<Id> table(nw);
        for (std::size_t w = 0; w < nw; ++w)
            if (!fibres[w].empty()) table[w] = fibres[w][digit[w]];
        for (std::size_t w = 0; w < nw; ++w)
            if (fibres[w].empty()) table[w] = table[img[digit[w]]];
        out.emplace_back(t.domain_size(), std::move(table));

        std::size_t pos = nw;
        while (pos > 0 && ++digit[pos - 1] == radix[pos - 1]) {
            digit[pos - 1] = 0;
            --pos;
        }
        if (pos == 0) break;
    }
    std::sort(out.begin(), out.end(), [](const FiniteOperator& a, const FiniteOperator& b) { return a.table() < b.table(); });
    return out;
}

struct Restriction {
    FiniteOperator op;         // T on the subset, with subset positions as domain ids
    std::vector<Id> embedding; // subset position -> original domain id
};

/// T restricted to a nonempty subset of its domain.
inline Restriction restrict_domain(const FiniteOperator& t, std::vector<Id> subset) {
    std::sort(subset.begin(), subset.end());
    subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
    if (subset.empty()) throw std::invalid_argument("restrict_domain: empty subset");
    std::vector<Id> table;
    for (Id v : subset) {
        if (v >= t.domain_size()) throw std::invalid_argument("restrict_domain: id outside the domain");
        table.push_back(t.table()[v]);
    }
    return {FiniteOperator(t.codomain_size(), std::move(table)), std::move(subset)};
}

}  // namespace geninv
