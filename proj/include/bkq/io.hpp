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

#ifndef BKQ_IO_HPP
#define BKQ_IO_HPP

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "chern_moser.hpp"
#include "errors.hpp"
#include "expansion.hpp"
#include "model_kernel.hpp"
#include "oracle.hpp"
#include "poly.hpp"
#include "psdo.hpp"
#include "scalar.hpp"
#include "toeplitz_star.hpp"
#include "weight.hpp"

namespace bkq::io {

using json = nlohmann::json;

inline json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

// Deterministic text: sorted keys, shortest round-trip doubles, trailing newline.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline const json& field(const json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
    return j.at(key);
}

// ---- scalars: numbers, or strings holding decimals / "p/q" ----

inline Rational rational_of(const json& v)
{
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_number()) return rational_from_double(v.get<double>());
    if (v.is_string()) return rational_from_string(v.get<std::string>());
    throw ParseError("expected a number or a rational string");
}

inline double double_of(const json& v)
{
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return static_cast<double>(rational_from_string(v.get<std::string>()));
    throw ParseError("expected a number or a rational string");
}

template <class S>
S scalar_of(const json& re, const json& im)
{
    if constexpr (std::is_same_v<S, QComplex>) return QComplex(rational_of(re), rational_of(im));
    else return cplx(double_of(re), double_of(im));
}

template <class S>
S scalar_from_json(const json& j)
{
    if (j.is_object()) return scalar_of<S>(field(j, "re"), j.contains("im") ? j.at("im") : json(0));
    return scalar_of<S>(j, json(0));
}

inline json part_to_json(const Rational& r) { return rational_to_string(r); }
inline json part_to_json(double d) { return d; }

inline json scalar_to_json(const cplx& z) { return {{"re", z.real()}, {"im", z.imag()}}; }
inline json scalar_to_json(const QComplex& z) { return {{"re", part_to_json(z.re)}, {"im", part_to_json(z.im)}}; }

// ---- polynomials ----
// Record {"a", "b", "re", "im"}: wirtinger a = z-exponents, b = zbar-exponents;
// symbol a = (x, y)-exponents, b = (theta1, theta2)-exponents.

template <class S>
json poly_to_json(const Poly<S>& p)
{
    const int half = p.alphabet().nvars() / 2;
    json arr = json::array();
    for (const auto& [e, c] : p.terms()) {
        json rec = scalar_to_json(c);
        std::vector<int> a(e.begin(), e.begin() + half), b(e.begin() + half, e.end());
        rec["a"] = a;
        rec["b"] = b;
        arr.push_back(rec);
    }
    return arr;
}

template <class S>
Poly<S> poly_from_json(const json& j, Alphabet alpha)
{
    if (!j.is_array()) throw ParseError("polynomial must be an array of term records");
    const int half = alpha.nvars() / 2;
    Poly<S> p(alpha);
    for (const auto& rec : j) {
        const json& a = field(rec, "a");
        const json& b = field(rec, "b");
        if (!a.is_array() || !b.is_array() || static_cast<int>(a.size()) != half || static_cast<int>(b.size()) != half)
            throw ParseError("term record exponent length must be " + std::to_string(half));
        Exponent e;
        for (const auto* part : {&a, &b})
            for (const auto& v : *part) {
                if (!v.is_number_integer() || v.template get<int>() < 0 || v.template get<int>() > 255)
                    throw ParseError("exponents must be integers in [0, 255]");
                e.push_back(static_cast<std::uint8_t>(v.template get<int>()));
            }
        p.add_term(e, scalar_of<S>(field(rec, "re"), rec.contains("im") ? rec.at("im") : json(0)));
    }
    return p;
}

// ---- matrices: row-major list of [re, im] pairs ----

inline json matrix_to_json(const Eigen::MatrixXcd& m)
{
    json arr = json::array();
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) arr.push_back({m(r, c).real(), m(r, c).imag()});
    return arr;
}

inline Eigen::MatrixXcd matrix_from_json(const json& j, int n)
{
    if (!j.is_array() || static_cast<int>(j.size()) != n * n)
        throw ParseError("matrix must hold " + std::to_string(n * n) + " [re, im] pairs");
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n * n; ++i) {
        const json& e = j[i];
        if (e.is_array() && e.size() == 2) m(i / n, i % n) = cplx(double_of(e[0]), double_of(e[1]));
        else m(i / n, i % n) = cplx(double_of(e), 0.0);
    }
    return m;
}

// ---- weights ----

template <class S>
json weight_to_json(const WeightSpec<S>& w)
{
    json lam = json::array();
    for (const auto& l : w.lambda) lam.push_back(scalar_to_json(l)["re"]);
    return {{"n", w.n}, {"lambda", lam}, {"phi1", poly_to_json(w.phi1)}, {"vol", poly_to_json(w.vol)}, {"R", w.R}, {"c", w.c}};
}

template <class S>
WeightSpec<S> weight_from_json(const json& j)
{
    WeightSpec<S> w;
    w.n = field(j, "n").get<int>();
    if (w.n < 1) throw ParseError("weight: n must be positive");
    const Alphabet a = Alphabet::wirtinger(w.n);
    const json& lam = field(j, "lambda");
    if (!lam.is_array() || static_cast<int>(lam.size()) != w.n) throw ParseError("weight: lambda must have n entries");
    for (const auto& l : lam) w.lambda.push_back(scalar_from_json<S>(l));
    w.phi1 = j.contains("phi1") ? poly_from_json<S>(j.at("phi1"), a) : Poly<S>(a);
    w.vol = j.contains("vol") ? poly_from_json<S>(j.at("vol"), a) : Poly<S>::constant(a, S(1));
    w.R = j.contains("R") ? double_of(j.at("R")) : 1.0;
    w.c = j.contains("c") ? double_of(j.at("c")) : 0.0;
    const double tol = std::is_same_v<S, cplx> ? 1e-12 : 0.0;
    for (const auto& l : w.lambda)
        if (to_cplx(l).imag() != 0.0) throw ParseError("weight: lambda must be real");
    if (!is_real_valued(w.phi1, tol) || !is_real_valued(w.vol, tol)) throw ParseError("weight: phi1 and vol must be real-valued");
    w.validate();
    return w;
}

// ---- raw jets and normal forms ----

inline json raw_jet_to_json(const cm::RawJet& r)
{
    return {{"n", r.n}, {"phi", poly_to_json(r.phi)}, {"metric", matrix_to_json(r.metric)}, {"vol", poly_to_json(r.vol)}, {"R", r.R}};
}

inline cm::RawJet raw_jet_from_json(const json& j)
{
    cm::RawJet r;
    r.n = field(j, "n").get<int>();
    if (r.n < 1) throw ParseError("raw jet: n must be positive");
    const Alphabet a = Alphabet::wirtinger(r.n);
    r.phi = poly_from_json<cplx>(field(j, "phi"), a);
    r.metric = j.contains("metric") ? matrix_from_json(j.at("metric"), r.n) : Eigen::MatrixXcd::Identity(r.n, r.n);
    r.vol = j.contains("vol") ? poly_from_json<cplx>(j.at("vol"), a) : Poly<cplx>::constant(a, 1.0);
    r.R = j.contains("R") ? double_of(j.at("R")) : 1.0;
    if (!is_real_valued(r.phi, 1e-12) || !is_real_valued(r.vol, 1e-12)) throw ParseError("raw jet: phi and vol must be real-valued");
    return r;
}

inline json normal_form_to_json(const cm::NormalForm& nf)
{
    return {{"coordinate_change", matrix_to_json(nf.coordinate_change)},
            {"psi", poly_to_json(nf.psi)},
            {"lambda", nf.lambda},
            {"weight", weight_to_json(nf.weight)},
            {"vol_scale", nf.vol_scale},
            {"roundtrip_error", nf.roundtrip_error}};
}

inline cm::NormalForm normal_form_from_json(const json& j)
{
    cm::NormalForm nf;
    nf.weight = weight_from_json<cplx>(field(j, "weight"));
    const int n = nf.weight.n;
    nf.coordinate_change = matrix_from_json(field(j, "coordinate_change"), n);
    nf.psi = poly_from_json<cplx>(field(j, "psi"), Alphabet::wirtinger(n));
    nf.lambda = field(j, "lambda").get<std::vector<double>>();
    nf.vol_scale = double_of(field(j, "vol_scale"));
    nf.roundtrip_error = double_of(field(j, "roundtrip_error"));
    return nf;
}

// ---- groups: {"generators": [matrix, ...]} or a bare list ----

inline model::FiniteUnitaryGroup group_from_json(const json& j, int n)
{
    const json& gens = j.is_object() ? field(j, "generators") : j;
    if (!gens.is_array() || gens.empty()) throw ParseError("group: non-empty generator list required");
    std::vector<Eigen::MatrixXcd> ms;
    for (const auto& g : gens) ms.push_back(matrix_from_json(g, n));
    return model::group_closure(ms);
}

inline json group_to_json(const std::vector<Eigen::MatrixXcd>& generators)
{
    json arr = json::array();
    for (const auto& g : generators) arr.push_back(matrix_to_json(g));
    return {{"generators", arr}};
}

// ---- observables: {"terms": [...], "jet_degree": D} or a bare term list ----

template <class S>
star::ObservableJet<S> observable_from_json(const json& j, int n)
{
    const Alphabet a = Alphabet::wirtinger(n);
    if (j.is_array()) return star::ObservableJet<S>(poly_from_json<S>(j, a));
    star::ObservableJet<S> f(poly_from_json<S>(field(j, "terms"), a));
    if (j.contains("jet_degree")) f.degree = j.at("jet_degree").get<int>();
    return f;
}

template <class S>
json observable_to_json(const star::ObservableJet<S>& f)
{
    json j{{"terms", poly_to_json(f.f)}};
    if (f.degree >= 0) j["jet_degree"] = f.degree;
    return j;
}

// ---- symbols: {"order", "grades": [[records], ...]} in (x, y, theta1, theta2) ----

template <class S>
json symbol_to_json(const psdo::SymbolExpansion<S>& s)
{
    json g = json::array();
    for (const auto& p : s.grades) g.push_back(poly_to_json(p));
    return {{"order", s.order}, {"grades", g}};
}

template <class S>
psdo::SymbolExpansion<S> symbol_from_json(const json& j, int n)
{
    const json& grades = field(j, "grades");
    if (!grades.is_array() || grades.empty()) throw ParseError("symbol: non-empty grade list required");
    std::vector<Poly<S>> gs;
    for (const auto& g : grades) gs.push_back(poly_from_json<S>(g, Alphabet::symbol(n)));
    return psdo::SymbolExpansion<S>::classify(field(j, "order").get<int>(), gs);
}

// ---- results ----

template <class S>
json expansion_to_json(const expansion::ExpansionResult<S>& r)
{
    json orders = json::object();
    for (int m = 0; m <= r.order(); ++m) {
        json contribs = json::array();
        for (const auto& c : r.contributions)
            if (c.order == m)
                contribs.push_back({{"j", c.j}, {"ell", c.ell}, {"normalized", scalar_to_json(c.value)},
                                    {"value", scalar_to_json(r.c0 * to_cplx(c.value))}});
        orders[std::to_string(m)] = {{"normalized", scalar_to_json(r.normalized[m])},
                                     {"value", scalar_to_json(r.value(m))},
                                     {"contributions", contribs}};
    }
    return {{"leading_power", r.leading_power}, {"c0", r.c0}, {"orders", orders}};
}

template <class S>
expansion::ExpansionResult<S> expansion_from_json(const json& j)
{
    expansion::ExpansionResult<S> r;
    r.leading_power = field(j, "leading_power").get<int>();
    r.c0 = double_of(field(j, "c0"));
    const json& orders = field(j, "orders");
    for (int m = 0; orders.contains(std::to_string(m)); ++m) {
        const json& o = orders.at(std::to_string(m));
        r.normalized.push_back(scalar_from_json<S>(field(o, "normalized")));
        for (const auto& c : field(o, "contributions"))
            r.contributions.push_back({m, field(c, "j").get<int>(), field(c, "ell").get<int>(),
                                       scalar_from_json<S>(field(c, "normalized"))});
    }
    if (r.normalized.empty()) throw ParseError("expansion: no orders");
    return r;
}

template <class S>
json star_to_json(const star::StarCoefficients<S>& sc, double commutator_residual, double associativity_residual)
{
    json C = json::array();
    for (const auto& c : sc.C) C.push_back(scalar_to_json(c));
    return {{"C", C}, {"extended", sc.extended}, {"commutator_residual", commutator_residual},
            {"associativity_residual", associativity_residual}};
}

template <class S>
json commutator_to_json(const psdo::CommutatorReport<S>& r)
{
    return {{"order_k0", symbol_to_json(r.order_k0)},
            {"principal_k_minus1", scalar_to_json(r.principal_k_minus1)},
            {"psi_bracket", scalar_to_json(r.psi_bracket)},
            {"engine", scalar_to_json(r.engine)},
            {"split_sum", scalar_to_json(r.split_sum)},
            {"absorbed_sum", scalar_to_json(r.absorbed_sum)}};
}

inline json diagnostics_to_json(const oracle::GramOracle& o)
{
    return {{"k", o.k},
            {"D", o.D},
            {"basis_size", o.projection.cols()},
            {"min_eigenvalue", o.diag.min_eigenvalue},
            {"condition_number", o.diag.condition_number},
            {"doubling_delta", o.diag.doubling_delta},
            {"coercivity", o.diag.coercivity},
            {"nodes", o.diag.nodes}};
}

// CSV helpers: shortest round-trip doubles, complex as re and im columns.
inline std::string num(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string point_label(const std::vector<cplx>& z)
{
    std::string s;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (i) s += ";";
        s += num(z[i].real()) + (z[i].imag() < 0 ? "" : "+") + num(z[i].imag()) + "i";
    }
    return s;
}

} // namespace bkq::io

#endif
