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

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "geninv/applied.hpp"
#include "geninv/core_ops.hpp"
#include "geninv/numerics.hpp"
#include "geninv/pseudo_inverse.hpp"
#include "geninv/set_inverse.hpp"
#include "geninv/structured_inverse.hpp"
#include "geninv/vanishing.hpp"

namespace geninv::io {

using json = nlohmann::json;

/// Malformed input. The message starts with the source name and a JSON pointer or line number.
class input_error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// A JSON value together with where it came from, so every complaint can name its location.
class Node {
   public:
    Node(const json& value, std::string source, std::string pointer = "")
        : value_(&value), source_(std::move(source)), pointer_(std::move(pointer)) {}

    const json& value() const noexcept { return *value_; }
    const std::string& pointer() const noexcept { return pointer_; }
    bool has(const std::string& key) const { return value_->is_object() && value_->contains(key); }

    [[noreturn]] void fail(const std::string& what) const {
        throw input_error(source_ + ": " + (pointer_.empty() ? "/" : pointer_) + ": " + what);
    }

    Node operator[](const std::string& key) const {
        if (!value_->is_object()) fail("expected an object");
        const auto it = value_->find(key);
        if (it == value_->end()) fail("missing key \"" + key + "\"");
        return Node(*it, source_, pointer_ + "/" + key);
    }

    Node operator[](std::size_t i) const { return Node(value_->at(i), source_, pointer_ + "/" + std::to_string(i)); }

    std::size_t size() const {
        if (!value_->is_array()) fail("expected an array");
        return value_->size();
    }

    double number() const {
        if (!value_->is_number()) fail("expected a number");
        const double x = value_->get<double>();
        if (!std::isfinite(x)) fail("expected a finite number");
        return x;
    }

    std::uint64_t count() const {
        if (value_->is_number_unsigned()) return value_->get<std::uint64_t>();
        if (value_->is_number_integer() && value_->get<std::int64_t>() >= 0)
            return static_cast<std::uint64_t>(value_->get<std::int64_t>());
        fail("expected a non-negative integer");
    }

    std::int64_t integer() const {
        if (!value_->is_number_integer()) fail("expected an integer");
        if (value_->is_number_unsigned() && value_->get<std::uint64_t>() > std::numeric_limits<std::int64_t>::max())
            fail("integer out of range");
        return value_->get<std::int64_t>();
    }

    std::string string() const {
        if (!value_->is_string()) fail("expected a string");
        return value_->get<std::string>();
    }

    Vec numbers() const {
        Vec out(size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*this)[i].number();
        return out;
    }

   private:
    const json* value_;
    std::string source_;
    std::string pointer_;
};

inline json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw input_error(source + ": byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline json read_json_file(const std::string& path) { return parse_json_text(read_text_file(path), path); }

// ---------------------------------------------------------------------------
// Finite operators, specs, polynomials, matrices

inline FiniteOperator finite_operator_from_json(const Node& n) {
    const std::uint64_t domain = n["domain"].count(), codomain = n["codomain"].count();
    const Node table = n["table"];
    if (table.size() != domain)
        table.fail("table has " + std::to_string(table.size()) + " entries but domain is " + std::to_string(domain));
    if (domain == 0) n["domain"].fail("domain must be nonempty");
    if (codomain == 0) n["codomain"].fail("codomain must be nonempty");
    std::vector<Id> t(domain);
    for (std::size_t i = 0; i < domain; ++i) {
        const std::uint64_t x = table[i].count();
        if (x >= codomain) table[i].fail("id " + std::to_string(x) + " is outside the codomain");
        t[i] = static_cast<Id>(x);
    }
    return FiniteOperator(codomain, std::move(t));
}

inline json to_json(const FiniteOperator& t) {
    return {{"domain", t.domain_size()}, {"codomain", t.codomain_size()}, {"table", t.table()}};
}

inline OneTwoInverseSpec spec_from_json(const Node& n) {
    OneTwoInverseSpec spec;
    for (const char* key : {"v0", "p0"}) {
        const Node ids = n[key];
        auto& out = std::string(key) == "v0" ? spec.v0 : spec.p0;
        for (std::size_t i = 0; i < ids.size(); ++i) out.push_back(static_cast<Id>(ids[i].count()));
    }
    return spec;
}

/// Real polynomials come back as OperatorPolynomial, prime-field ones as FpPolynomial; the caller picks.
inline bool polynomial_is_real(const Node& n) {
    const Node field = n["field"];
    if (field.value().is_string()) {
        if (field.string() != "real") field.fail("field must be \"real\" or {\"prime\": p}");
        return true;
    }
    return false;
}

inline FpPolynomial fp_polynomial_from_json(const Node& n) {
    if (polynomial_is_real(n)) n["field"].fail("expected a prime field");
    const std::uint64_t p = n["field"]["prime"].count();
    if (!is_prime(p) || p >= (std::uint64_t{1} << 31)) n["field"]["prime"].fail("not a prime below 2^31");
    const Node coeffs = n["coeffs"];
    std::vector<std::int64_t> c(coeffs.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = coeffs[i].integer();
    return FpPolynomial(static_cast<FpElem>(p), c);
}

inline OperatorPolynomial real_polynomial_from_json(const Node& n) {
    if (!polynomial_is_real(n)) n["field"].fail("expected \"real\"");
    return OperatorPolynomial(n["coeffs"].numbers());
}

inline json to_json(const FpPolynomial& q) {
    return {{"field", {{"prime", q.prime()}}}, {"coeffs", q.coeffs()}};
}

inline DenseMatrix matrix_from_json(const Node& n) {
    const std::uint64_t rows = n["rows"].count(), cols = n["cols"].count();
    const Vec data = n["data"].numbers();
    if (data.size() != rows * cols)
        n["data"].fail("expected " + std::to_string(rows * cols) + " entries, found " + std::to_string(data.size()));
    DenseMatrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) a(i, j) = data[i * cols + j];
    return a;
}

inline FpMatrix fp_matrix_from_json(const Node& n) {
    const std::uint64_t p = n["prime"].count();
    if (!is_prime(p) || p >= (std::uint64_t{1} << 31)) n["prime"].fail("not a prime below 2^31");
    const std::uint64_t rows = n["rows"].count(), cols = n["cols"].count();
    const Node data = n["data"];
    if (data.size() != rows * cols)
        data.fail("expected " + std::to_string(rows * cols) + " entries, found " + std::to_string(data.size()));
    std::vector<std::int64_t> e(rows * cols);
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = data[i].integer();
    return FpMatrix(static_cast<FpElem>(p), rows, cols, e);
}

inline json to_json(const DenseMatrix& a) {
    std::vector<double> data;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) data.push_back(a(i, j));
    return {{"rows", a.rows()}, {"cols", a.cols()}, {"data", data}};
}

// ---------------------------------------------------------------------------
// Convex sets and vector operators

inline ConvexSet convex_set_from_json(const Node& n) {
    const std::string kind = n["kind"].string();
    try {
        if (kind == "box") return ConvexSet::box(n["lo"].numbers(), n["hi"].numbers());
        if (kind == "nonnegative_orthant") return ConvexSet::nonnegative_orthant(n["dim"].count());
        if (kind == "ball") return ConvexSet::ball(n["center"].numbers(), n["radius"].number());
        if (kind == "halfspace") return ConvexSet::halfspace(n["normal"].numbers(), n["offset"].number());
        if (kind == "intersection") {
            const Node parts = n["parts"];
            std::vector<ConvexSet> sets;
            for (std::size_t i = 0; i < parts.size(); ++i) sets.push_back(convex_set_from_json(parts[i]));
            return ConvexSet::intersection(std::move(sets), n["point"].numbers());
        }
    } catch (const std::invalid_argument& e) {
        n.fail(e.what());
    }
    n["kind"].fail("unknown set kind \"" + kind + "\"");
}

/// Operators accepted by the oracle: a Table kind with "param", "sampled", "linear", "product",
/// "layer" and "cascade".
inline VectorOperator vector_operator_from_json(const Node& n) {
    const std::string kind = n["kind"].string();
    try {
        if (kind == "sampled") return Scalar1DOperator::sampled(n["xs"].numbers(), n["ys"].numbers()).as_vector_operator();
        if (kind == "linear" && n.has("matrix")) return linear_operator(matrix_from_json(n["matrix"]));
        if (kind == "product") {
            const Node parts = n["parts"];
            std::vector<VectorOperator> ops;
            std::size_t in = 0, out = 0;
            for (std::size_t i = 0; i < parts.size(); ++i) {
                ops.push_back(vector_operator_from_json(parts[i]));
                in += ops.back().dim_in();
                out += ops.back().dim_out();
            }
            if (ops.empty()) parts.fail("product needs at least one part");
            return VectorOperator(in, out, [ops](std::span<const double> v) {
                Vec r;
                std::size_t at = 0;
                for (const auto& op : ops) {
                    const Vec piece = op(v.subspan(at, op.dim_in()));
                    r.insert(r.end(), piece.begin(), piece.end());
                    at += op.dim_in();
                }
                return r;
            });
        }
        if (kind == "layer") {
            std::optional<int> clip;
            if (n.has("clip")) clip = static_cast<int>(n["clip"].integer());
            return NeuralLayer(matrix_from_json(n["weights"]), parse_activation(n["activation"].string()), clip)
                .as_operator();
        }
        if (kind == "cascade") {
            const Node sets = n["sets"];
            std::vector<ConvexSet> cs;
            for (std::size_t i = 0; i < sets.size(); ++i) cs.push_back(convex_set_from_json(sets[i]));
            if (cs.empty()) sets.fail("cascade needs at least one set");
            return cascade_operator(cs);
        }
        if (const auto sk = parse_scalar_kind(kind))
            return Scalar1DOperator::make(*sk, n.has("param") ? n["param"].number() : 0.0).as_vector_operator();
    } catch (const std::invalid_argument& e) {
        n.fail(e.what());
    }
    n["kind"].fail("unknown operator kind \"" + kind + "\"");
}

// ---------------------------------------------------------------------------
// CSV

/// Rows of comma-separated finite numbers; blank lines are skipped. Errors name the line and column.
inline std::vector<Vec> parse_csv_rows(const std::string& text, const std::string& source) {
    std::vector<Vec> rows;
    std::istringstream in(text);
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        Vec row;
        std::istringstream fields(line);
        std::string field;
        for (std::size_t col = 1; std::getline(fields, field, ','); ++col) {
            const auto b = field.find_first_not_of(" \t"), e = field.find_last_not_of(" \t");
            const std::string trimmed = b == std::string::npos ? "" : field.substr(b, e - b + 1);
            std::size_t used = 0;
            double x = 0.0;
            try {
                x = std::stod(trimmed, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (trimmed.empty() || used != trimmed.size() || !std::isfinite(x))
                throw input_error(source + ": line " + std::to_string(lineno) + ", column " + std::to_string(col) +
                                  ": \"" + trimmed + "\" is not a finite number");
            row.push_back(x);
        }
        if (!line.empty() && line.back() == ',')
            throw input_error(source + ": line " + std::to_string(lineno) + ": trailing comma");
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Headerless single-column signal.
inline Vec read_csv_signal(const std::string& path) {
    const auto rows = parse_csv_rows(read_text_file(path), path);
    Vec out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != 1)
            throw input_error(path + ": row " + std::to_string(i + 1) + ": expected a single column, found " +
                              std::to_string(rows[i].size()));
        out.push_back(rows[i][0]);
    }
    if (out.empty()) throw input_error(path + ": empty signal");
    return out;
}

inline std::string format_csv_signal(const Vec& x) {
    std::string out;
    for (double v : x) out += json(v).dump() + "\n";
    return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error(path + ": cannot open file for writing");
    out << text;
}

}  // namespace geninv::io
