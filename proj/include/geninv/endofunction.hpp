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
#include <stdexcept>
#include <string>
#include <vector>

#include "geninv/core_ops.hpp"

namespace geninv {

// Nested images V = T^0(V) ⊇ T^1(V) ⊇ ... up to the first k with T^k(V) = T^(k+1)(V).
struct ImageChain {
    std::vector<std::vector<Id>> sets;  // sets[j] = T^j(V), sorted; the last entry is the stable set
    std::vector<bool> injective;        // T restricted to sets[j] is one-to-one
    std::vector<bool> bijective;        // ... and maps sets[j] onto itself
    std::size_t stabilization = 0;      // index of the stable set
};

namespace detail {

inline void require_endofunction(const FiniteOperator& t, const char* who) {
    if (!t.is_endofunction()) throw std::invalid_argument(std::string(who) + ": operator is not an endofunction");
}

}  // namespace detail

inline ImageChain image_chain(const FiniteOperator& t) {
    detail::require_endofunction(t, "image_chain");
    const std::size_t n = t.domain_size();
    ImageChain chain;
    std::vector<Id> current(n);
    for (std::size_t i = 0; i < n; ++i) current[i] = static_cast<Id>(i);
    std::vector<std::uint8_t> seen(n);
    while (true) {
        std::fill(seen.begin(), seen.end(), 0);
        bool one_to_one = true;
        std::vector<Id> next;
        next.reserve(current.size());
        for (Id v : current) {
            const Id image = t.table()[v];
            if (seen[image]) one_to_one = false;
            else next.push_back(image);
            seen[image] = 1;
        }
        std::sort(next.begin(), next.end());
        const bool same = next == current;
        chain.sets.push_back(std::move(current));
        chain.injective.push_back(one_to_one);
        chain.bijective.push_back(one_to_one && same);
        if (same) break;
        current = std::move(next);
    }
    chain.stabilization = chain.sets.size() - 1;
    return chain;
}

struct DrazinAxioms {
    bool mp1 = false;     // T^k G T = T^k
    bool mp2 = false;     // G T G = G
    bool commute = false;  // T G = G T
    bool all() const noexcept { return mp1 && mp2 && commute; }
};

inline DrazinAxioms check_drazin_axioms(const FiniteOperator& t, const FiniteOperator& g, std::size_t k) {
    detail::require_endofunction(t, "check_drazin_axioms");
    if (g.domain_size() != t.domain_size() || !g.is_endofunction())
        throw std::invalid_argument("check_drazin_axioms: candidate has the wrong shape");
    const FiniteOperator tk = power(t, k);
    DrazinAxioms out;
    out.mp1 = compose(tk, compose(g, t)) == tk;
    out.mp2 = compose(g, compose(t, g)) == g;
    out.commute = compose(t, g) == compose(g, t);
    return out;
}

struct DrazinResult {
    bool exists = false;
    std::optional<FiniteOperator> inverse;
    std::size_t index = 0;      // least m >= 1 with T^(m+1) G = T^m
    std::size_t parameter = 0;  // chain stabilization step used in S^-(k+1) T^k
};

// Index of a Drazin inverse: least m >= 1 with T^(m+1) G = T^m.
inline std::size_t drazin_index(const FiniteOperator& t, const FiniteOperator& g) {
    const std::size_t n = t.domain_size();
    FiniteOperator tm = t;
    for (std::size_t m = 1; m <= n + 1; ++m) {
        if (compose(t, compose(tm, g)) == tm) return m;
        tm = compose(t, tm);
    }
    throw std::invalid_argument("drazin_index: candidate is not a Drazin inverse");
}

inline DrazinResult drazin_inverse(const FiniteOperator& t) {
    const ImageChain chain = image_chain(t);
    DrazinResult out;
    out.parameter = chain.stabilization;
    if (!chain.bijective.back()) return out;

    const std::size_t n = t.domain_size();
    const auto& stable = chain.sets.back();
    std::vector<Id> back(n, 0);
    for (Id v : stable) back[t.table()[v]] = v;
    const FiniteOperator tk = power(t, chain.stabilization);
    std::vector<Id> table(n);
    for (std::size_t v = 0; v < n; ++v) {
        Id u = tk.table()[v];
        for (std::size_t step = 0; step <= chain.stabilization; ++step) u = back[u];
        table[v] = u;
    }
    FiniteOperator g(n, std::move(table));
    if (!check_drazin_axioms(t, g, std::max<std::size_t>(chain.stabilization, 1)).all())
        throw std::logic_error("drazin_inverse: constructed map fails the axioms");
    out.exists = true;
    out.index = drazin_index(t, g);
    out.inverse = std::move(g);
    return out;
}

// T^((n-k)(k+1)-1) for a map with T^n = T^k and n > k >= 0.
inline FiniteOperator drazin_loop_formula(const FiniteOperator& t, std::size_t n, std::size_t k) {
    detail::require_endofunction(t, "drazin_loop_formula");
    if (n <= k) throw std::invalid_argument("drazin_loop_formula: need n > k");
    if (power(t, n) != power(t, k))
        throw std::invalid_argument("drazin_loop_formula: T^" + std::to_string(n) + " differs from T^" +
                                    std::to_string(k));
    return power(t, (n - k) * (k + 1) - 1);
}

struct LeftDrazinResult {
    FiniteOperator inverse;
    std::size_t parameter = 0;  // least k with T one-to-one on T^k(V)
    std::size_t m = 1;          // max(k, 1); G T^(m+1) = T^m holds
};

// Fill rule for ids outside T^(k+1)(V); the default keeps them fixed.
using LeftDrazinFill = std::function<Id(Id)>;

inline std::optional<LeftDrazinResult> left_drazin_inverse(const FiniteOperator& t, const LeftDrazinFill& fill = {}) {
    const ImageChain chain = image_chain(t);
    const auto first = std::find(chain.injective.begin(), chain.injective.end(), true);
    if (first == chain.injective.end()) return std::nullopt;
    const std::size_t k = static_cast<std::size_t>(first - chain.injective.begin());
    const std::size_t n = t.domain_size();

    std::vector<Id> table(n);
    std::vector<bool> constrained(n, false);
    for (Id v : chain.sets[k]) {
        table[t.table()[v]] = v;
        constrained[t.table()[v]] = true;
    }
    for (std::size_t v = 0; v < n; ++v) {
        if (constrained[v]) continue;
        const Id chosen = fill ? fill(static_cast<Id>(v)) : static_cast<Id>(v);
        if (chosen >= n) throw std::invalid_argument("left_drazin_inverse: fill rule left the domain");
        table[v] = chosen;
    }
    LeftDrazinResult out{FiniteOperator(n, std::move(table)), k, std::max<std::size_t>(k, 1)};
    if (compose(out.inverse, power(t, out.m + 1)) != power(t, out.m))
        throw std::logic_error("left_drazin_inverse: constructed map fails G T^(m+1) = T^m");
    return out;
}

// Every G with T^k G T = T^k (some k <= |V|), G T G = G and T G = G T, in table order.
inline std::vector<FiniteOperator> exhaustive_drazin_search(const FiniteOperator& t) {
    detail::require_endofunction(t, "exhaustive_drazin_search");
    const std::size_t n = t.domain_size();
    if (n > 5) throw std::invalid_argument("exhaustive_drazin_search: at most 5 ids (5^5 candidates)");
    std::vector<FiniteOperator> found;
    std::vector<Id> table(n, 0);
    while (true) {
        const FiniteOperator g(n, table);
        // the first identity only gets easier as k grows, so k = |V| covers every k <= |V|
        if (check_drazin_axioms(t, g, n).all()) found.push_back(g);
        std::size_t pos = n;
        while (pos > 0 && table[pos - 1] + 1 == n) table[--pos] = 0;
        if (pos == 0) break;
        ++table[pos - 1];
    }
    return found;
}

// v -> v/2 on the grid {j 2^-bits : 0 <= j <= 2^bits}, rounding down to the grid.
inline FiniteOperator halving_grid_operator(unsigned bits) {
    if (bits == 0 || bits > 24) throw std::invalid_argument("halving_grid_operator: bits must be in 1..24");
    const std::size_t n = (std::size_t{1} << bits) + 1;
    std::vector<Id> table(n);
    for (std::size_t j = 0; j < n; ++j) table[j] = static_cast<Id>(j / 2);
    return FiniteOperator(n, std::move(table));
}

}  // namespace geninv
