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

// geninv: command-line front end. JSON report on stdout, diagnostics on stderr.
// Exit codes: 0 all checks pass, 1 a check failed, 2 bad input, 3 numerical non-convergence.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "geninv/geninv.hpp"
#include "geninv/io.hpp"
#include "geninv/suite.hpp"

namespace {

using geninv::Vec;
using geninv::io::json;

enum ExitCode { kPass = 0, kCheckFailed = 1, kInputError = 2, kNoConvergence = 3 };

// Integral values print without a fractional part so that 0 reads as 0.
json number(double x) {
    if (x == std::trunc(x) && std::abs(x) < 1e15) return static_cast<std::int64_t>(x);
    return x;
}

json numbers(const Vec& v) {
    json out = json::array();
    for (double x : v) out.push_back(number(x));
    return out;
}

struct Report {
    json body = json::object();
    json checks = json::array();
    bool non_converged = false;

    void check(const std::string& name, bool pass, std::optional<double> residual = std::nullopt) {
        json c = {{"name", name}, {"pass", pass}};
        if (residual) c["residual"] = *residual;
        checks.push_back(std::move(c));
    }

    bool pass() const {
        for (const auto& c : checks)
            if (!c["pass"].get<bool>()) return false;
        return true;
    }
};

// A file path names a CSV file; anything else is read as one inline comma-separated row.
std::vector<Vec> read_rows(const std::string& arg, const std::string& flag) {
    if (std::filesystem::is_regular_file(arg))
        return geninv::io::parse_csv_rows(geninv::io::read_text_file(arg), arg);
    auto rows = geninv::io::parse_csv_rows(arg, flag);
    if (rows.size() != 1) throw geninv::io::input_error(flag + ": expected one inline row or an existing CSV file");
    return rows;
}

// A vector given inline ("0.5,-0.2") or as a single-column CSV file.
Vec read_vector(const std::string& arg, const std::string& flag) {
    if (std::filesystem::is_regular_file(arg)) return geninv::io::read_csv_signal(arg);
    return read_rows(arg, flag).front();
}

geninv::io::Node root(const json& doc, const std::string& path) { return geninv::io::Node(doc, path); }

geninv::ScalarKind scalar_kind(const std::string& name) {
    const auto k = geninv::parse_scalar_kind(name);
    if (!k) throw geninv::io::input_error("--kind: unknown kind \"" + name + "\"");
    return *k;
}

// ---------------------------------------------------------------------------

struct Pinv1dArgs {
    std::string kind;
    double a = 0.0;
    double w = 0.0;
    bool verify = false;
    std::vector<double> box;
    double step = 1e-3;
};

Report run_pinv1d(const Pinv1dArgs& args) {
    using geninv::ClosedFormValue;
    const auto kind = scalar_kind(args.kind);
    const auto op = geninv::Scalar1DOperator::make(kind, args.a);
    const ClosedFormValue cf = geninv::closed_form_pinv(op, args.w);
    Report r;
    r.body["kind"] = args.kind;
    r.body["a"] = number(args.a);
    r.body["w"] = number(args.w);
    switch (cf.status) {
        case ClosedFormValue::Status::undefined:
            r.body["status"] = "undefined";
            r.body["value"] = nullptr;
            break;
        case ClosedFormValue::Status::value:
            r.body["status"] = "unique";
            r.body["value"] = number(cf.value);
            break;
        case ClosedFormValue::Status::nonunique:
            r.body["status"] = "both_signs";
            r.body["value"] = number(cf.value);
            r.body["values"] = {number(-cf.value), number(cf.value)};
            break;
    }
    if (!args.verify || cf.status == ClosedFormValue::Status::undefined) return r;

    geninv::OracleOptions grid;
    const double half = kind == geninv::ScalarKind::sine ? std::numbers::pi : 10.0;
    grid.box = {args.box.empty() ? std::pair{-half, half} : std::pair{args.box[0], args.box[1]}};
    grid.step = args.step;
    const auto t = op.as_vector_operator();
    const auto reports = geninv::check_pseudo_inverse(t, geninv::closed_form_candidate(op), {Vec{args.w}},
                                                      geninv::CheckOptions{grid});
    const auto& rep = reports.front();
    const double gap = cf.status == ClosedFormValue::Status::nonunique
                           ? std::abs(std::abs(rep.oracle_v[0]) - std::abs(rep.candidate[0]))
                           : rep.argument_gap;
    r.body["oracle"] = {{"v", rep.oracle_v[0]}, {"residual", rep.oracle_residual}, {"norm", rep.oracle_norm}};
    r.check("oracle BAS", rep.bas_ok, rep.residual - rep.oracle_residual);
    r.check("argument within 2 grid steps", gap <= 2 * grid.step, gap);
    r.check("MP1", rep.mp1_ok, rep.mp1_residual);
    r.check("MP2", rep.mp2_ok, rep.mp2_residual);
    return r;
}

// ---------------------------------------------------------------------------

struct OracleArgs {
    std::string op;
    std::string w;
    std::vector<double> box{-10.0, 10.0};
    double step = 1e-3;
    double norm = 2.0;
};

Report run_oracle(const OracleArgs& args) {
    const json doc = geninv::io::read_json_file(args.op);
    const auto t = geninv::io::vector_operator_from_json(root(doc, args.op));
    const auto rows = read_rows(args.w, "--w");
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].size() != t.dim_out())
            throw geninv::io::input_error("--w: row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                                          " entries, the operator's codomain has dimension " +
                                          std::to_string(t.dim_out()));
    geninv::OracleOptions grid;
    grid.box.assign(t.dim_in(), {args.box[0], args.box[1]});
    grid.step = args.step;
    grid.norm_p = args.norm;
    const geninv::GridBasOracle oracle(t, grid);
    Report r;
    json results = json::array();
    for (const Vec& w : rows) {
        const auto q = oracle.query(w);
        results.push_back({{"w", numbers(w)}, {"v", numbers(q.v)}, {"residual", q.residual}, {"norm", q.norm}});
    }
    r.body["grid_step"] = grid.step;
    r.body["results"] = std::move(results);
    return r;
}

// ---------------------------------------------------------------------------

struct LayerArgs {
    std::string weights;
    std::string act;
    std::optional<int> clip;
    std::string w;
};

Report run_layer_pinv(const LayerArgs& args) {
    const json doc = geninv::io::read_json_file(args.weights);
    const auto a = geninv::io::matrix_from_json(root(doc, args.weights));
    const geninv::NeuralLayer layer(a, geninv::parse_activation(args.act), args.clip);
    const Vec w = read_vector(args.w, "--w");
    if (w.size() != a.rows())
        throw geninv::io::input_error("--w: expected " + std::to_string(a.rows()) + " entries, found " +
                                      std::to_string(w.size()));
    Report r;
    r.body["activation"] = args.act;
    if (args.clip) r.body["clip"] = *args.clip;

    std::function<std::optional<Vec>(const Vec&)> inverse;
    if (args.act == "relu" || args.clip) {
        inverse = [&](const Vec& target) -> std::optional<Vec> {
            const auto q = args.act == "relu" ? geninv::relu_layer_pinv(layer, target)
                                              : geninv::clipped_tanh_layer_pinv(layer, target);
            if (q.status == geninv::QpStatus::iteration_limit) r.non_converged = true;
            if (q.status != geninv::QpStatus::optimal) return std::nullopt;
            return q.v;
        };
    } else {
        inverse = [&](const Vec& target) { return geninv::tanh_layer_pinv(layer, target); };
    }

    const auto v = inverse(w);
    if (!v) {
        r.body["status"] = r.non_converged ? "iteration_limit" : "undefined";
        r.body["value"] = nullptr;
        return r;
    }
    r.body["status"] = "ok";
    r.body["value"] = numbers(*v);
    const Vec tv = layer(*v);
    const auto again = inverse(tv);
    const double mp2 = again ? geninv::distance(*again, *v) : std::numeric_limits<double>::infinity();
    r.check("MP2: G(T(G w)) = G w", mp2 <= 1e-8, mp2);
    return r;
}

// ---------------------------------------------------------------------------

struct DenoiseArgs {
    std::string basis = "haar";
    std::size_t n = 8;
    std::string kind;
    double a = 0.0;
    std::string signal;
    std::string out;
};

Report run_denoise(const DenoiseArgs& args) {
    if (args.basis != "haar") throw geninv::io::input_error("--basis: only \"haar\" is available");
    const auto kind = scalar_kind(args.kind);
    const Vec x = geninv::io::read_csv_signal(args.signal);
    if (x.size() != args.n)
        throw geninv::io::input_error(args.signal + ": signal has " + std::to_string(x.size()) + " samples, --n is " +
                                      std::to_string(args.n));
    const auto basis = geninv::haar_basis(args.n);
    const auto rt = geninv::wavelet_threshold_roundtrip(basis, kind, args.a, x);
    Report r;
    r.body["denoised"] = numbers(rt.denoised);
    r.body["roundtrip"] = numbers(rt.roundtrip);
    r.body["difference"] = rt.difference;
    if (rt.witness) {
        r.body["witness"] = numbers(*rt.witness);
        r.body["witness_difference"] = rt.witness_difference;
    }
    if (kind == geninv::ScalarKind::hard_threshold)
        r.check("pseudo-inverse round trip equals denoising", rt.difference <= 1e-10, rt.difference);
    if (!args.out.empty()) geninv::io::write_text_file(args.out, geninv::io::format_csv_signal(rt.denoised));
    return r;
}

// ---------------------------------------------------------------------------

Report run_drazin(const std::string& path) {
    const json doc = geninv::io::read_json_file(path);
    const auto node = root(doc, path);
    const auto t = geninv::io::finite_operator_from_json(node);
    if (!t.is_endofunction()) node["codomain"].fail("a Drazin inverse needs domain = codomain");
    const auto chain = geninv::image_chain(t);
    const auto d = geninv::drazin_inverse(t);
    Report r;
    json sizes = json::array();
    for (const auto& s : chain.sets) sizes.push_back(s.size());
    r.body["chain"] = {{"sizes", sizes}, {"stable_from", chain.stabilization},
                       {"stable_bijective", static_cast<bool>(chain.bijective.back())}};
    r.body["exists"] = d.exists;
    if (!d.exists) {
        r.body["index"] = nullptr;
        r.body["inverse_table"] = nullptr;
        return r;
    }
    r.body["index"] = d.index;
    r.body["inverse_table"] = d.inverse->table();
    const auto ax = geninv::check_drazin_axioms(t, *d.inverse, d.index);
    r.check("T^k G T = T^k", ax.mp1);
    r.check("G T G = G", ax.mp2);
    r.check("T G = G T", ax.commute);
    return r;
}

// ---------------------------------------------------------------------------

Report run_vanish(const std::string& path, std::uint64_t prime) {
    const json doc = geninv::io::read_json_file(path);
    const auto node = root(doc, path);
    const auto t = geninv::io::finite_operator_from_json(node);
    if (!geninv::is_prime(prime)) throw geninv::io::input_error("--prime: " + std::to_string(prime) + " is not prime");
    std::size_t dim = 0, size = 1;
    while (size < t.domain_size()) {
        size *= prime;
        ++dim;
    }
    if (size != t.domain_size() || !t.is_endofunction())
        node["domain"].fail("domain and codomain must both have p^n elements for p = " + std::to_string(prime));
    const geninv::FpVectorOperator op(static_cast<geninv::FpElem>(prime), dim, t.table());
    const auto found = geninv::find_vanishing_poly(op);
    const auto minimal = geninv::minimal_poly(op);
    Report r;
    r.body["dimension"] = dim;
    r.body["vanishing"] = found.poly.coeffs();
    r.body["minimal"] = minimal.coeffs();
    r.body["degree_bound"] = found.degree_bound;
    r.body["preiterations"] = found.preiterations;
    r.body["stable_size"] = found.stable_size;
    r.check("vanishing polynomial annihilates T", geninv::vanishes(found.poly, op));
    r.check("minimal polynomial annihilates T", geninv::vanishes(minimal, op));
    r.check("degree within m^2 + l", found.poly.degree() <= found.degree_bound);
    r.check("minimal divides the vanishing polynomial", (found.poly % minimal).is_zero());
    return r;
}

// ---------------------------------------------------------------------------

Report run_verify_suite(std::uint64_t seed, std::optional<int> only) {
    std::vector<geninv::suite::Criterion> results;
    if (only) results.push_back(geninv::suite::run_criterion(*only, seed));
    else results = geninv::suite::run_all(seed);
    Report r;
    json criteria = json::array();
    for (const auto& c : results) {
        json checks = json::array();
        for (const auto& k : c.checks)
            checks.push_back({{"name", k.name}, {"pass", k.pass}, {"worst", k.worst}, {"detail", k.detail}});
        criteria.push_back({{"id", c.id}, {"title", c.title}, {"pass", c.pass()}, {"checks", std::move(checks)}});
        r.check("criterion " + std::to_string(c.id) + ": " + c.title, c.pass());
        std::cerr << "criterion " << c.id << ": " << (c.pass() ? "pass" : "FAIL") << " (" << c.seconds << " s)\n";
    }
    r.body["seed"] = seed;
    r.body["criteria"] = std::move(criteria);
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geninv: generalized inverses of nonlinear operators"};
    app.require_subcommand(1);

    Pinv1dArgs p1;
    auto* pinv1d = app.add_subcommand("pinv1d", "closed-form pseudo-inverse of a one-dimensional operator");
    pinv1d->add_option("--kind", p1.kind, "square, shifted_square, relu, hard, soft, tanh, sign, sign_eps, exp, sine")
        ->required();
    pinv1d->add_option("--a", p1.a, "threshold, shift or epsilon parameter");
    pinv1d->add_option("--w", p1.w, "target value")->required();
    pinv1d->add_flag("--verify", p1.verify, "compare against the grid oracle");
    pinv1d->add_option("--box", p1.box, "oracle search interval")->expected(2);
    pinv1d->add_option("--step", p1.step, "oracle grid step")->check(CLI::PositiveNumber);

    OracleArgs oa;
    auto* oracle = app.add_subcommand("oracle", "grid best-approximate-solution oracle");
    oracle->add_option("--op", oa.op, "operator JSON file")->required();
    oracle->add_option("--w", oa.w, "targets: CSV file (one per row) or an inline row")->required();
    oracle->add_option("--box", oa.box, "search interval applied to every axis")->expected(2);
    oracle->add_option("--step", oa.step, "grid step")->check(CLI::PositiveNumber);
    oracle->add_option("--norm", oa.norm, "domain norm exponent (use inf for max)");

    LayerArgs la;
    auto* layer = app.add_subcommand("layer-pinv", "pseudo-inverse of a neural layer");
    layer->add_option("--weights", la.weights, "weight matrix JSON file")->required();
    layer->add_option("--act", la.act, "tanh or relu")->required()->check(CLI::IsMember({"tanh", "relu"}));
    layer->add_option("--clip", la.clip, "clip parameter k > 1 for tanh");
    layer->add_option("--w", la.w, "target: inline comma list or single-column CSV file")->required();

    DenoiseArgs da;
    auto* denoise = app.add_subcommand("denoise", "wavelet thresholding and its pseudo-inverse round trip");
    denoise->add_option("--basis", da.basis, "wavelet basis");
    denoise->add_option("--n", da.n, "signal length, a power of two");
    denoise->add_option("--kind", da.kind, "hard or soft")->required()->check(CLI::IsMember({"hard", "soft"}));
    denoise->add_option("--a", da.a, "threshold")->required()->check(CLI::NonNegativeNumber);
    denoise->add_option("--signal", da.signal, "single-column CSV input")->required();
    denoise->add_option("--out", da.out, "write the denoised signal here as CSV");

    std::string drazin_op;
    auto* drazin = app.add_subcommand("drazin", "Drazin inverse of a finite endofunction");
    drazin->add_option("--op", drazin_op, "finite operator JSON file")->required();

    std::string vanish_op;
    std::uint64_t prime = 0;
    auto* vanish = app.add_subcommand("vanish", "vanishing and minimal polynomials over a prime field");
    vanish->add_option("--op", vanish_op, "finite operator JSON file on p^n ids")->required();
    vanish->add_option("--prime", prime, "field characteristic")->required();

    std::uint64_t seed = 42;
    std::optional<int> criterion;
    auto* verify = app.add_subcommand("verify-suite", "run the seeded verification suite");
    verify->add_option("--seed", seed, "random seed");
    verify->add_option("--criterion", criterion, "run a single criterion")
        ->check(CLI::Range(1, geninv::suite::kCriterionCount));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kInputError;
    }

    std::string echo = "geninv";
    for (int i = 1; i < argc; ++i) echo += std::string(" ") + argv[i];

    const auto start = std::chrono::steady_clock::now();
    Report report;
    int status = kPass;
    try {
        if (*pinv1d) report = run_pinv1d(p1);
        else if (*oracle) report = run_oracle(oa);
        else if (*layer) report = run_layer_pinv(la);
        else if (*denoise) report = run_denoise(da);
        else if (*drazin) report = run_drazin(drazin_op);
        else if (*vanish) report = run_vanish(vanish_op, prime);
        else report = run_verify_suite(seed, criterion);
        if (report.non_converged) status = kNoConvergence;
        else if (!report.pass()) status = kCheckFailed;
    } catch (const geninv::convergence_error& e) {
        std::cerr << "geninv: no convergence: " << e.what() << "\n";
        return kNoConvergence;
    } catch (const geninv::io::input_error& e) {
        std::cerr << "geninv: " << e.what() << "\n";
        return kInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "geninv: invalid input: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "geninv: " << e.what() << "\n";
        return kInputError;
    }

    json out = report.body;
    out["command"] = echo;
    out["checks"] = report.checks;
    out["pass"] = status == kPass;
    std::cout << out.dump(2) << "\n";
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << "geninv: " << app.get_subcommands().front()->get_name() << " finished in " << seconds << " s, exit "
              << status << "\n";
    return status;
}
