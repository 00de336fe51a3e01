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

#ifndef BKQ_TOEPLITZ_STAR_HPP
#define BKQ_TOEPLITZ_STAR_HPP

#include <vector>

#include "chern_moser.hpp"
#include "errors.hpp"
#include "expansion.hpp"
#include "poly.hpp"
#include "weight.hpp"

namespace bkq::star {

using expansion::ExpansionResult;

// A jet of an observable at the frame centre; degree < 0 marks an exact polynomial.
template <class S>
struct ObservableJet {
    Poly<S> f;
    int degree = -1;
    ObservableJet(Poly<S> p, int d = -1) : f(std::move(p)), degree(d) {}
};

template <class S>
void require_jet(const ObservableJet<S>& j, int needed, const char* who)
{
    require(j.f.alphabet().tag == Tag::wirtinger, std::string(who) + ": Wirtinger jet required");
    if (j.degree >= 0 && j.degree < needed)
        throw BudgetError(std::string(who) + ": jet degree " + std::to_string(j.degree) + " below required " +
                          std::to_string(needed));
}

template <class S>
ExpansionResult<S> toeplitz_diagonal_coeffs(const WeightSpec<S>& w, const ObservableJet<S>& f, int M)
{
    require(M >= 0, "toeplitz_diagonal_coeffs: M >= 0");
    require_jet(f, 2 * M, "toeplitz_diagonal_coeffs");
    auto cs = expansion::chain_sum<S>(w, {expansion::function_insertion(f.f)}, 2 * M);
    return expansion::collect(w, cs, M, w.n);
}

// Diagonal coefficients of T_f T_g.
template <class S>
ExpansionResult<S> composition_coeffs(const WeightSpec<S>& w, const Poly<S>& f, const Poly<S>& g, int M)
{
    auto cs = expansion::chain_sum<S>(w, {expansion::function_insertion(f), expansion::function_insertion(g)}, 2 * M);
    return expansion::collect(w, cs, M, w.n);
}

// i sum_j (1/(2 lambda_j)) (f_{z_j} g_{zbar_j} - f_{zbar_j} g_{z_j}).
template <class S>
Poly<S> poisson_bracket_L(const std::vector<S>& lambda, const Poly<S>& f, const Poly<S>& g)
{
    const Alphabet& a = f.alphabet();
    require(a.tag == Tag::wirtinger && g.alphabet() == a && static_cast<int>(lambda.size()) == a.n,
            "poisson_bracket_L: Wirtinger polys in n variables required");
    Poly<S> r(a);
    for (int j = 0; j < a.n; ++j) {
        Poly<S> t = f.derive(a.z(j)) * g.derive(a.zbar(j)) - f.derive(a.zbar(j)) * g.derive(a.z(j));
        r += t.scaled(imag_unit<S>() / (S(2) * lambda[j]));
    }
    return r;
}

// C_0..C_M at the centre, normalized so that a_0 = 1.
template <class S>
struct StarCoefficients {
    std::vector<S> C;
    bool extended = false;
};

// Exact extraction for M <= 1.
template <class S>
StarCoefficients<S> star_coefficients(const WeightSpec<S>& w, const ObservableJet<S>& f, const ObservableJet<S>& g,
                                      int M)
{
    require(M >= 0, "star_coefficients: M >= 0");
    if (M >= 2) throw PreconditionError("star_coefficients: M >= 2 needs star_coefficients_extended");
    require_jet(f, 2 * M + 2, "star_coefficients");
    require_jet(g, 2 * M + 2, "star_coefficients");
    StarCoefficients<S> r;
    r.C.push_back(f.f.constant_term() * g.f.constant_term());
    if (M == 0) return r;
    auto b = composition_coeffs(w, f.f, g.f, 1);
    auto a = toeplitz_diagonal_coeffs(w, ObservableJet<S>(f.f * g.f), 1);
    r.C.push_back(b.normalized[1] - a.normalized[1]);
    return r;
}

// C_1(f, g) as a function near 0: quadratic jet from values at re-centred points by central differences.
inline Poly<cplx> c1_jet(const WeightSpec<cplx>& w, const Poly<cplx>& f, const Poly<cplx>& g, double h = 5e-4)
{
    const int n = w.n;
    auto at = [&](const std::vector<double>& t) {
        std::vector<cplx> z0(n);
        bool centre = true;
        for (int j = 0; j < n; ++j) {
            z0[j] = cplx(t[j], t[n + j]);
            centre = centre && t[j] == 0.0 && t[n + j] == 0.0;
        }
        if (centre) return star_coefficients(w, ObservableJet<cplx>(f), ObservableJet<cplx>(g), 1).C[1];
        auto nf = cm::recenter(w, z0);
        Poly<cplx> ft = cm::transport_observable(f, z0, nf.coordinate_change);
        Poly<cplx> gt = cm::transport_observable(g, z0, nf.coordinate_change);
        return star_coefficients(nf.weight, ObservableJet<cplx>(ft), ObservableJet<cplx>(gt), 1).C[1];
    };
    const int d = 2 * n;
    const Alphabet ra = Alphabet::real(n);
    Poly<cplx> jet(ra);
    std::vector<double> t(d, 0.0);
    const cplx c0 = at(t);
    jet.add_term(Exponent(ra.nvars(), 0), c0);
    for (int i = 0; i < d; ++i) {
        t.assign(d, 0.0);
        t[i] = h;
        cplx p = at(t);
        t[i] = -h;
        cplx m = at(t);
        Exponent e(ra.nvars(), 0);
        e[i] = 1;
        jet.add_term(e, (p - m) / (2.0 * h));
        e[i] = 2;
        jet.add_term(e, 0.5 * (p - 2.0 * c0 + m) / (h * h));
        for (int l = i + 1; l < d; ++l) {
            cplx s[4];
            int idx = 0;
            for (double si : {1.0, -1.0})
                for (double sl : {1.0, -1.0}) {
                    t.assign(d, 0.0);
                    t[i] = si * h;
                    t[l] = sl * h;
                    s[idx++] = at(t);
                }
            Exponent f2(ra.nvars(), 0);
            f2[i] = 1;
            f2[l] = 1;
            jet.add_term(f2, (s[0] - s[1] - s[2] + s[3]) / (4.0 * h * h));
        }
    }
    return to_wirtinger(jet);
}

// C_0..C_2 with C_2 = b_2 - a_{2,fg} - a_{1,C_1}, the C_1 jet from re-centred finite differences.
inline StarCoefficients<cplx> star_coefficients_extended(const WeightSpec<cplx>& w, const ObservableJet<cplx>& f,
                                                         const ObservableJet<cplx>& g, int M = 2, double h = 5e-4)
{
    require(M >= 0 && M <= 2, "star_coefficients_extended: M <= 2");
    if (M <= 1) return star_coefficients(w, f, g, M);
    require_jet(f, 2 * M + 2, "star_coefficients_extended");
    require_jet(g, 2 * M + 2, "star_coefficients_extended");
    StarCoefficients<cplx> r = star_coefficients(w, f, g, 1);
    r.extended = true;
    auto b = composition_coeffs(w, f.f, g.f, 2);
    auto a = toeplitz_diagonal_coeffs(w, ObservableJet<cplx>(f.f * g.f), 2);
    Poly<cplx> c1 = c1_jet(w, f.f, g.f, h);
    auto a1 = toeplitz_diagonal_coeffs(w, ObservableJet<cplx>(c1), 1);
    r.C.push_back(b.normalized[2] - a.normalized[2] - a1.normalized[1]);
    return r;
}

// sum_{j+l=m} C_j(f, C_l(g,h)) - sum_{j+l=m} C_l(C_j(f,g), h) at the centre.
template <class S>
S associativity_residual(const WeightSpec<S>& w, const Poly<S>& f, const Poly<S>& g, const Poly<S>& h, int m)
{
    require(m >= 0 && m <= 1, "associativity_residual: m <= 1 (use the extended form for m = 2)");
    using J = ObservableJet<S>;
    if (m == 0) {
        S a = f.constant_term(), b = g.constant_term(), c = h.constant_term();
        return a * (b * c) - (a * b) * c;
    }
    S lhs = f.constant_term() * star_coefficients(w, J(g), J(h), 1).C[1] +
            star_coefficients(w, J(f), J(g * h), 1).C[1];
    S rhs = star_coefficients(w, J(f * g), J(h), 1).C[1] +
            star_coefficients(w, J(f), J(g), 1).C[1] * h.constant_term();
    return lhs - rhs;
}

// m = 2 with C_1 jets from the extended mode.
inline cplx associativity_residual_extended(const WeightSpec<cplx>& w, const Poly<cplx>& f, const Poly<cplx>& g,
                                            const Poly<cplx>& h, double step = 5e-4)
{
    using J = ObservableJet<cplx>;
    auto C = [&](const Poly<cplx>& a, const Poly<cplx>& b, int j) {
        return star_coefficients_extended(w, J(a), J(b), 2, step).C[j];
    };
    Poly<cplx> c1gh = c1_jet(w, g, h, step), c1fg = c1_jet(w, f, g, step);
    cplx lhs = f.constant_term() * C(g, h, 2) + star_coefficients(w, J(f), J(c1gh), 1).C[1] + C(f, g * h, 2);
    cplx rhs = C(f * g, h, 2) + star_coefficients(w, J(c1fg), J(h), 1).C[1] + C(f, g, 2) * h.constant_term();
    return lhs - rhs;
}

} // namespace bkq::star

#endif
