/*
   Copyright 2026 The bkq Authors

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

// bkq: command-line front end.
// Exit codes: 0 ok, 1 other failure, 2 parse error, 3 precondition, 4 budget, 5 conditioning.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bkq/chern_moser.hpp"
#include "bkq/expansion.hpp"
#include "bkq/io.hpp"
#include "bkq/model_kernel.hpp"
#include "bkq/oracle.hpp"
#include "bkq/psdo.hpp"
#include "bkq/toeplitz_star.hpp"

using namespace bkq;
using io::json;

namespace {

constexpr int kMaxOrder = 2;
constexpr int kMaxDegree = 16;
constexpr double kMaxK = 200.0;

struct Job {
    std::string weight, observable, f, g, h, symbol, p, q, group, points;
    std::string out = "-";
    std::string format = "csv";
    int order = 1;
    int deg = 12;
    std::vector<double> ks{20.0, 40.0, 80.0};
    double radius = 0.0;
    int nodes = 0;
    int threads = 1;
    double tol = 0.05;
    bool exact = false;
    bool extended = false;
    bool unsafe = false;
};

void emit(const Job& job, const std::string& text)
{
    if (job.out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream o(job.out, std::ios::binary);
    if (!o) throw Error("cannot write '" + job.out + "'");
    o << text;
}

void check_caps(const Job& job, bool uses_order, bool uses_oracle)
{
    if (job.unsafe) return;
    if (uses_order && job.order > kMaxOrder)
        throw BudgetError("order " + std::to_string(job.order) + " exceeds the cap " + std::to_string(kMaxOrder) + " (use --unsafe)");
    if (uses_oracle) {
        if (job.deg > kMaxDegree)
            throw BudgetError("degree " + std::to_string(job.deg) + " exceeds the cap " + std::to_string(kMaxDegree) + " (use --unsafe)");
        for (double k : job.ks)
            if (k > kMaxK) throw BudgetError("k = " + io::num(k) + " exceeds the cap 200 (use --unsafe)");
    }
    if (job.order < 0) throw PreconditionError("order must be non-negative");
}

template <class S>
WeightSpec<S> load_weight(const Job& job)
{
    auto w = io::weight_from_json<S>(io::read_json_file(job.weight));
    w.require_positive();
    return w;
}

oracle::QuadSpec quad_spec(const Job& job)
{
    oracle::QuadSpec q;
    q.threads = job.threads;
    if (job.nodes > 0) q.nodes_per_panel = job.nodes;
    return q;
}

WeightSpec<cplx> oracle_weight(const Job& job)
{
    auto w = load_weight<cplx>(job);
    if (job.radius > 0.0) w.R = job.radius;
    return w;
}

// Default sample points in scaled coordinates: the centre and one point per axis.
std::vector<std::vector<cplx>> sample_points(const Job& job, int n)
{
    std::vector<std::vector<cplx>> pts;
    if (!job.points.empty()) {
        json j = io::read_json_file(job.points);
        if (!j.is_array()) throw ParseError("points: array of points expected");
        for (const auto& p : j) {
            if (!p.is_array() || static_cast<int>(p.size()) != n) throw ParseError("points: each point needs n coordinates");
            std::vector<cplx> z;
            for (const auto& c : p) {
                if (!c.is_array() || c.size() != 2) throw ParseError("points: coordinates are [re, im] pairs");
                z.emplace_back(io::double_of(c[0]), io::double_of(c[1]));
            }
            pts.push_back(z);
        }
        return pts;
    }
    pts.push_back(std::vector<cplx>(n, 0.0));
    for (int j = 0; j < n; ++j) {
        std::vector<cplx> z(n, 0.0);
        z[j] = cplx(0.3, 0.2);
        pts.push_back(z);
    }
    return pts;
}

// Diagonal pair (x, x) and off-diagonal pair (x, first point).
std::vector<std::vector<cplx>> pair_partners(const std::vector<cplx>& x, const std::vector<cplx>& first)
{
    if (x == first) return {x};
    return {x, first};
}

int cmd_normalize(const Job& job)
{
    auto raw = io::raw_jet_from_json(io::read_json_file(job.weight));
    emit(job, io::dump(io::normal_form_to_json(cm::normalize_weight(raw))));
    return 0;
}

template <class S>
int cmd_expand_bergman(const Job& job)
{
    auto w = load_weight<S>(job);
    auto r = expansion::bergman_diagonal_coeffs(w, job.order);
    json j = io::expansion_to_json(r);
    j["kind"] = "bergman";
    emit(job, io::dump(j));
    return 0;
}

template <class S>
int cmd_expand_toeplitz(const Job& job)
{
    auto w = load_weight<S>(job);
    auto f = io::observable_from_json<S>(io::read_json_file(job.observable), w.n);
    json j = io::expansion_to_json(star::toeplitz_diagonal_coeffs(w, f, job.order));
    j["kind"] = "toeplitz";
    emit(job, io::dump(j));
    return 0;
}

template <class S>
int cmd_star(const Job& job)
{
    auto w = load_weight<S>(job);
    auto f = io::observable_from_json<S>(io::read_json_file(job.f), w.n);
    auto g = io::observable_from_json<S>(io::read_json_file(job.g), w.n);
    auto h = job.h.empty() ? f : io::observable_from_json<S>(io::read_json_file(job.h), w.n);
    star::StarCoefficients<S> fg, gf;
    double assoc = 0.0;
    if constexpr (std::is_same_v<S, cplx>) {
        if (job.extended) {
            fg = star::star_coefficients_extended(w, f, g, job.order);
            gf = star::star_coefficients_extended(w, g, f, job.order);
            assoc = std::abs(star::associativity_residual_extended(w, f.f, g.f, h.f));
        }
    }
    if (!fg.extended) {
        if (job.extended) throw PreconditionError("--extended needs floating-point mode");
        fg = star::star_coefficients(w, f, g, job.order);
        gf = star::star_coefficients(w, g, f, job.order);
        assoc = magnitude(star::associativity_residual(w, f.f, g.f, h.f, std::min(job.order, 1)));
    }
    double comm = 0.0;
    if (job.order >= 1) {
        S br = imag_unit<S>() * star::poisson_bracket_L(w.lambda, f.f, g.f).constant_term();
        comm = magnitude(fg.C[1] - gf.C[1] - br);
    }
    emit(job, io::dump(io::star_to_json(fg, comm, assoc)));
    return 0;
}

template <class S>
int cmd_psdo_expand(const Job& job)
{
    auto w = load_weight<S>(job);
    auto P = io::symbol_from_json<S>(io::read_json_file(job.symbol), w.n);
    json j = io::expansion_to_json(psdo::psdo_toeplitz_general(w, P, job.order));
    j["kind"] = "psdo";
    j["closed_form_c1"] = nullptr;
    if (job.order >= 1) {
        try {
            auto cf = psdo::psdo_c1_closed_form(w, P);
            j["closed_form_c1"] = {{"gaussian_form", io::scalar_to_json(cf.gaussian_form)},
                                   {"invariant_form", io::scalar_to_json(cf.invariant_form)}};
        } catch (const PreconditionError& e) {
            j["closed_form_c1"] = {{"unavailable", e.what()}};
        }
    }
    emit(job, io::dump(j));
    return 0;
}

template <class S>
int cmd_psdo_commutator(const Job& job)
{
    auto w = load_weight<S>(job);
    auto P = io::symbol_from_json<S>(io::read_json_file(job.p), w.n);
    auto Q = io::symbol_from_json<S>(io::read_json_file(job.q), w.n);
    emit(job, io::dump(io::commutator_to_json(psdo::psdo_star_commutator(w, P, Q))));
    return 0;
}

int cmd_oracle(const Job& job)
{
    auto w = oracle_weight(job);
    auto pts = sample_points(job, w.n);
    model::ModelWeight mw = w.model();
    std::ostringstream csv;
    csv << "k,x,y,oracle_re,oracle_im,model_re,model_im,rel_err\n";
    json diags = json::array();
    for (double k : job.ks) {
        auto o = oracle::build_gram(w, k, job.deg, quad_spec(job));
        diags.push_back(io::diagnostics_to_json(o));
        for (const auto& x : pts)
            for (const auto& y : pair_partners(x, pts.front())) {
                cplx a = oracle::scaled_bergman_numeric(o, x, y), b = model::conjugated_kernel_eval(mw, x, y);
                csv << io::num(k) << "," << io::point_label(x) << "," << io::point_label(y) << "," << io::num(a.real()) << ","
                    << io::num(a.imag()) << "," << io::num(b.real()) << "," << io::num(b.imag()) << ","
                    << io::num(std::abs(a - b) / std::abs(b)) << "\n";
            }
    }
    if (job.format == "json") emit(job, io::dump(json{{"diagnostics", diags}}));
    else emit(job, csv.str());
    return 0;
}

int cmd_compare(const Job& job)
{
    auto w = oracle_weight(job);
    auto r = expansion::bergman_diagonal_coeffs(w, job.order);
    std::ostringstream csv;
    csv << "k,oracle";
    for (int m = 0; m <= job.order; ++m) csv << ",S" << m;
    csv << ",rel_err\n";
    std::vector<double> errs;
    const std::vector<cplx> origin(w.n, 0.0);
    for (double k : job.ks) {
        auto o = oracle::build_gram(w, k, job.deg, quad_spec(job));
        cplx b = oracle::bergman_numeric(o, origin, origin);
        csv << io::num(k) << "," << io::num(b.real());
        cplx s = 0.0;
        for (int m = 0; m <= job.order; ++m) {
            s += std::pow(k, r.leading_power - m) * r.value(m);
            csv << "," << io::num(s.real());
        }
        errs.push_back(std::abs(b - s) / std::abs(b));
        csv << "," << io::num(errs.back()) << "\n";
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < errs.size(); ++i) decreasing = decreasing && errs[i] < errs[i - 1];
    bool ok = decreasing && errs.back() <= job.tol;
    emit(job, csv.str());
    std::cerr << "verdict: " << (ok ? "PASS" : "FAIL") << " (rel_err " << (decreasing ? "decreasing" : "not decreasing")
              << ", last " << io::num(errs.back()) << ", tol " << io::num(job.tol) << ")\n";
    return 0;
}

int cmd_orbifold_compare(const Job& job)
{
    auto w = oracle_weight(job);
    auto G = io::group_from_json(io::read_json_file(job.group), w.n);
    auto pts = sample_points(job, w.n);
    model::ModelWeight mw = w.model();
    std::ostringstream csv;
    csv << "k,x,y,oracle_re,oracle_im,model_re,model_im,rel_err\n";
    for (double k : job.ks) {
        auto o = oracle::invariant_gram(w, k, job.deg, G, quad_spec(job));
        const double s = 1.0 / std::sqrt(k);
        for (const auto& xs : pts)
            for (const auto& ys : pair_partners(xs, pts.front())) {
                std::vector<cplx> x(xs), y(ys);
                for (auto& v : x) v *= s;
                for (auto& v : y) v *= s;
                cplx a = oracle::localized_numeric(o, x, y), b = model::orbifold_kernel_eval(mw, G, k, x, y);
                csv << io::num(k) << "," << io::point_label(xs) << "," << io::point_label(ys) << "," << io::num(a.real())
                    << "," << io::num(a.imag()) << "," << io::num(b.real()) << "," << io::num(b.imag()) << ","
                    << io::num(std::abs(a - b) / std::abs(b)) << "\n";
            }
    }
    emit(job, csv.str());
    return 0;
}

template <template <class> class F>
int dispatch(const Job& job)
{
    return job.exact ? F<QComplex>::run(job) : F<cplx>::run(job);
}

#define BKQ_SCALAR_COMMAND(name, fn)                           \
    template <class S>                                         \
    struct name {                                              \
        static int run(const Job& job) { return fn<S>(job); } \
    };
BKQ_SCALAR_COMMAND(Bergman, cmd_expand_bergman)
BKQ_SCALAR_COMMAND(Toeplitz, cmd_expand_toeplitz)
BKQ_SCALAR_COMMAND(Star, cmd_star)
BKQ_SCALAR_COMMAND(PsdoExpand, cmd_psdo_expand)
BKQ_SCALAR_COMMAND(PsdoCommutator, cmd_psdo_commutator)
#undef BKQ_SCALAR_COMMAND

int default_threads()
{
    const char* env = std::getenv("BKQ_THREADS");
    if (!env) return 1;
    int t = std::atoi(env);
    return t > 0 ? t : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Bergman kernel, Toeplitz and star-product expansions with a quadrature oracle"};
    app.require_subcommand(1);
    Job job;
    job.threads = default_threads();

    auto add_common = [&](CLI::App* c) {
        c->add_option("--out", job.out, "output path, - for stdout");
        c->add_flag("--unsafe", job.unsafe, "lift the order, degree and k caps");
    };
    auto add_order = [&](CLI::App* c) {
        c->add_option("--order", job.order, "highest order M");
        c->add_flag("--exact", job.exact, "exact rational arithmetic; decimals are read as written");
    };
    auto add_oracle = [&](CLI::App* c) {
        c->add_option("--k", job.ks, "comma-separated k values")->delimiter(',');
        c->add_option("--deg", job.deg, "polynomial degree D of the oracle space");
        c->add_option("--radius", job.radius, "override the weight radius R");
        c->add_option("--nodes", job.nodes, "radial nodes per panel");
        c->add_option("--threads", job.threads, "oracle threads (default $BKQ_THREADS or 1)");
        c->add_option("--points", job.points, "JSON file of sample points [[re, im], ...] in scaled coordinates");
    };

    auto* normalize = app.add_subcommand("normalize", "Chern-Moser normal form of a raw jet");
    normalize->add_option("--weight", job.weight, "raw jet JSON")->required();
    add_common(normalize);

    auto* bergman = app.add_subcommand("expand-bergman", "Bergman kernel diagonal coefficients");
    bergman->add_option("--weight", job.weight, "weight JSON")->required();
    add_order(bergman);
    add_common(bergman);

    auto* toeplitz = app.add_subcommand("expand-toeplitz", "Toeplitz operator diagonal coefficients");
    toeplitz->add_option("--weight", job.weight, "weight JSON")->required();
    toeplitz->add_option("--observable", job.observable, "observable JSON")->required();
    add_order(toeplitz);
    add_common(toeplitz);

    auto* star = app.add_subcommand("star", "star product coefficients C_j(f, g)");
    star->add_option("--weight", job.weight, "weight JSON")->required();
    star->add_option("--f", job.f, "observable JSON")->required();
    star->add_option("--g", job.g, "observable JSON")->required();
    star->set_help_flag("--help", "Print this help message and exit");
    star->add_option("--h", job.h, "third observable for the associativity residual (default f)");
    star->add_flag("--extended", job.extended, "order 2 by finite-difference jets (floating point)");
    add_order(star);
    add_common(star);

    auto* pexp = app.add_subcommand("psdo-expand", "Toeplitz coefficients of a pseudodifferential symbol");
    pexp->add_option("--weight", job.weight, "weight JSON")->required();
    pexp->add_option("--symbol", job.symbol, "symbol JSON")->required();
    add_order(pexp);
    add_common(pexp);

    auto* pcom = app.add_subcommand("psdo-commutator", "commutator decomposition of two symbols");
    pcom->add_option("--weight", job.weight, "weight JSON")->required();
    pcom->add_option("--p", job.p, "symbol JSON")->required();
    pcom->add_option("--q", job.q, "symbol JSON")->required();
    pcom->add_flag("--exact", job.exact, "exact rational arithmetic");
    add_common(pcom);

    auto* orc = app.add_subcommand("oracle", "quadrature Bergman kernel against the model kernel");
    orc->add_option("--weight", job.weight, "weight JSON")->required();
    orc->add_option("--format", job.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    add_oracle(orc);
    add_common(orc);

    auto* cmp = app.add_subcommand("compare", "oracle B_k(0,0) against partial sums of the expansion");
    cmp->add_option("--weight", job.weight, "weight JSON")->required();
    cmp->add_option("--order", job.order, "highest order M");
    cmp->add_option("--tol", job.tol, "relative error tolerance for the verdict");
    add_oracle(cmp);
    add_common(cmp);

    auto* orb = app.add_subcommand("orbifold-compare", "invariant oracle against the orbifold model kernel");
    orb->add_option("--weight", job.weight, "weight JSON")->required();
    orb->add_option("--group", job.group, "group generators JSON")->required();
    add_oracle(orb);
    add_common(orb);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*normalize) return cmd_normalize(job);
        if (*bergman) {
            check_caps(job, true, false);
            return dispatch<Bergman>(job);
        }
        if (*toeplitz) {
            check_caps(job, true, false);
            return dispatch<Toeplitz>(job);
        }
        if (*star) {
            check_caps(job, true, false);
            return dispatch<Star>(job);
        }
        if (*pexp) {
            check_caps(job, true, false);
            return dispatch<PsdoExpand>(job);
        }
        if (*pcom) return dispatch<PsdoCommutator>(job);
        if (*orc) {
            check_caps(job, false, true);
            return cmd_oracle(job);
        }
        if (*cmp) {
            check_caps(job, true, true);
            return cmd_compare(job);
        }
        if (*orb) {
            check_caps(job, false, true);
            return cmd_orbifold_compare(job);
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition: " << e.what() << "\n";
        return 3;
    } catch (const BudgetError& e) {
        std::cerr << "budget: " << e.what() << "\n";
        return 4;
    } catch (const ConditioningError& e) {
        std::cerr << "conditioning: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
