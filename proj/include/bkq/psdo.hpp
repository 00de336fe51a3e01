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

#ifndef BKQ_PSDO_HPP
#define BKQ_PSDO_HPP

#include <functional>
#include <map>
#include <vector>

#include "errors.hpp"
#include "expansion.hpp"
#include "poly.hpp"
#include "toeplitz_star.hpp"
#include "weight.hpp"

namespace bkq::psdo {

// Polynomial symbol p ~ p_0 + p_1 + ... of order m in (x_j, y_j, theta1_j, theta2_j).
template <class S>
struct SymbolExpansion {
    int order = 0;
    std::vector<Poly<S>> grades;
    bool classical = true;

    int n() const { return grades.empty() ? 0 : grades[0].alphabet().n; }

    // Each grade j must be theta-homogeneous of degree m - j (zero when m - j < 0).
    bool check_classical() const
    {
        for (std::size_t j = 0; j < grades.size(); ++j) {
            const Alphabet& a = grades[j].alphabet();
            require(a.tag == Tag::symbol, "SymbolExpansion: grades must use the symbol alphabet");
            const int want = order - static_cast<int>(j);
            for (const auto& [e, c] : grades[j].terms()) {
                int td = 0;
                for (int i = 2 * a.n; i < 4 * a.n; ++i) td += e[i];
                if (want < 0 || td != want) return false;
            }
        }
        return true;
    }

    void validate() const
    {
        require(!grades.empty(), "SymbolExpansion: at least one grade required");
        for (const auto& g : grades)
            require(g.alphabet() == grades[0].alphabet() && g.alphabet().tag == Tag::symbol,
                    "SymbolExpansion: grades must share one symbol alphabet");
    }

    Poly<S> total() const
    {
        Poly<S> r(grades.at(0).alphabet());
        for (const auto& g : grades) r += g;
        return r;
    }

    static SymbolExpansion classify(int order, const std::vector<Poly<S>>& grades)
    {
        SymbolExpansion s{order, grades, true};
        s.validate();
        s.classical = s.check_classical();
        return s;
    }
};

template <class S>
int theta_degree(const Poly<S>& p)
{
    const Alphabet& a = p.alphabet();
    int m = 0;
    for (const auto& [e, c] : p.terms()) {
        int td = 0;
        for (int i = 2 * a.n; i < 4 * a.n; ++i) td += e[i];
        m = std::max(m, td);
    }
    return m;
}

// Symbol of a multiplication operator by a Wirtinger poly f.
template <class S>
SymbolExpansion<S> multiplication_symbol(const Poly<S>& f)
{
    const Alphabet& a = f.alphabet();
    require(a.tag == Tag::wirtinger, "multiplication_symbol: Wirtinger poly required");
    Poly<S> r = to_real(f);
    const Alphabet sa = Alphabet::symbol(a.n);
    std::vector<int> map(2 * a.n);
    for (int i = 0; i < 2 * a.n; ++i) map[i] = i;
    return SymbolExpansion<S>::classify(0, {r.remap(sa, map)});
}

// (theta1_j, theta2_j) = (-d phi/d y_j, d phi/d x_j) as Wirtinger polys.
template <class S>
std::vector<Poly<S>> contact_polys(const WeightSpec<S>& w)
{
    const Alphabet a = Alphabet::wirtinger(w.n);
    const Poly<S> ph = w.phi();
    std::vector<Poly<S>> r(2 * w.n, Poly<S>(a));
    for (int j = 0; j < w.n; ++j) {
        r[j] = -wirtinger_derive(ph, j, DerivKind::real_y);
        r[w.n + j] = wirtinger_derive(ph, j, DerivKind::real_x);
    }
    return r;
}

template <class S>
std::vector<cplx> contact_covector(const WeightSpec<S>& w, const std::vector<cplx>& z)
{
    std::vector<cplx> r;
    for (const auto& p : contact_polys(w)) r.push_back(poly_eval(p, z));
    return r;
}

// p(z, -J d phi(z)) as a Wirtinger poly.
template <class S>
Poly<S> on_contact(const Poly<S>& p, const WeightSpec<S>& w)
{
    const Alphabet& sa = p.alphabet();
    require(sa == Alphabet::symbol(w.n), "on_contact: symbol alphabet mismatch");
    const Alphabet a = Alphabet::wirtinger(w.n);
    std::vector<Poly<S>> img(sa.nvars(), Poly<S>(a));
    auto th = contact_polys(w);
    const S half = ratio<S>(1, 2);
    for (int j = 0; j < w.n; ++j) {
        img[sa.x(j)] = Poly<S>::var(a, a.z(j), half) + Poly<S>::var(a, a.zbar(j), half);
        img[sa.y(j)] = Poly<S>::var(a, a.z(j), -half * imag_unit<S>()) + Poly<S>::var(a, a.zbar(j), half * imag_unit<S>());
        img[sa.t1(j)] = th[j];
        img[sa.t2(j)] = th[w.n + j];
    }
    return p.substitute(img, a);
}

// p evaluated at x = y = 0, theta = theta(0) = 0.
template <class S>
S at_origin(const Poly<S>& p)
{
    return p.constant_term();
}

// sum_alpha (1/alpha!) d_theta^alpha p . D_x^alpha q with D = -i d, regraded by total order.
template <class S>
SymbolExpansion<S> symbol_compose(const SymbolExpansion<S>& p, const SymbolExpansion<S>& q)
{
    p.validate();
    q.validate();
    const Alphabet sa = p.grades[0].alphabet();
    require(q.grades[0].alphabet() == sa, "symbol_compose: alphabet mismatch");
    const int n = sa.n;
    const S mi = -imag_unit<S>();
    std::map<int, Poly<S>> res;
    for (std::size_t a = 0; a < p.grades.size(); ++a)
        for (std::size_t b = 0; b < q.grades.size(); ++b) {
            std::function<void(int, int, const Poly<S>&, const Poly<S>&, const S&)> rec;
            rec = [&](int v, int depth, const Poly<S>& dp, const Poly<S>& dq, const S& coef) {
                if (dp.is_zero() || dq.is_zero()) return;
                if (v == 2 * n) {
                    auto ot = res.emplace(static_cast<int>(a + b) + depth, Poly<S>(sa)).first;
                    ot->second += (dp * dq).scaled(coef);
                    return;
                }
                const int tvar = v < n ? sa.t1(v) : sa.t2(v - n);
                const int xvar = v < n ? sa.x(v) : sa.y(v - n);
                Poly<S> cp = dp, cq = dq;
                S c = coef;
                for (int r = 0;; ++r) {
                    rec(v + 1, depth + r, cp, cq, c);
                    cp = cp.derive(tvar);
                    if (cp.is_zero()) break;
                    cq = cq.derive(xvar).scaled(mi);
                    if (cq.is_zero()) break;
                    c = c * ratio<S>(1, r + 1);
                }
            };
            rec(0, 0, p.grades[a], q.grades[b], S(1));
        }
    SymbolExpansion<S> r;
    r.order = p.order + q.order;
    int top = res.empty() ? 0 : res.rbegin()->first;
    r.grades.assign(top + 1, Poly<S>(sa));
    for (auto& [g, poly] : res) r.grades[g] = poly;
    r.classical = r.check_classical();
    return r;
}

template <class S>
SymbolExpansion<S> symbol_commutator(const SymbolExpansion<S>& p, const SymbolExpansion<S>& q)
{
    auto a = symbol_compose(p, q), b = symbol_compose(q, p);
    SymbolExpansion<S> r;
    r.order = a.order;
    const std::size_t G = std::max(a.grades.size(), b.grades.size());
    const Alphabet sa = p.grades[0].alphabet();
    r.grades.assign(G, Poly<S>(sa));
    for (std::size_t g = 0; g < a.grades.size(); ++g) r.grades[g] += a.grades[g];
    for (std::size_t g = 0; g < b.grades.size(); ++g) r.grades[g] -= b.grades[g];
    r.classical = r.check_classical();
    return r;
}

// {p, q}_Psi = sum_j (d_theta1 p d_x q + d_theta2 p d_y q - d_x p d_theta1 q - d_y p d_theta2 q).
template <class S>
Poly<S> symbol_poisson(const Poly<S>& p, const Poly<S>& q)
{
    const Alphabet& sa = p.alphabet();
    require(sa.tag == Tag::symbol && q.alphabet() == sa, "symbol_poisson: symbol alphabet required");
    Poly<S> r(sa);
    for (int j = 0; j < sa.n; ++j) {
        r += p.derive(sa.t1(j)) * q.derive(sa.x(j)) + p.derive(sa.t2(j)) * q.derive(sa.y(j));
        r -= p.derive(sa.x(j)) * q.derive(sa.t1(j)) + p.derive(sa.y(j)) * q.derive(sa.t2(j));
    }
    return r;
}

// (1/2) sum_j (d^2 p0 / d y_j d theta1_j - d^2 p0 / d x_j d theta2_j) at (x, y, theta).
template <class S>
Poly<S> sigma_hat_poly(const Poly<S>& p0)
{
    const Alphabet& sa = p0.alphabet();
    Poly<S> r(sa);
    for (int j = 0; j < sa.n; ++j)
        r += p0.derive(sa.y(j)).derive(sa.t1(j)) - p0.derive(sa.x(j)).derive(sa.t2(j));
    return r.scaled(ratio<S>(1, 2));
}

template <class S>
S sigma_hat(const Poly<S>& p0, const WeightSpec<S>& w)
{
    return on_contact(sigma_hat_poly(p0), w).constant_term();
}

// p_1 + (i/2) sum_j (d^2 p0 / d x_j d theta1_j + d^2 p0 / d y_j d theta2_j).
template <class S>
Poly<S> subprincipal(const SymbolExpansion<S>& P)
{
    const Poly<S>& p0 = P.grades.at(0);
    const Alphabet& sa = p0.alphabet();
    Poly<S> r = P.grades.size() > 1 ? P.grades[1] : Poly<S>(sa);
    Poly<S> t(sa);
    for (int j = 0; j < sa.n; ++j)
        t += p0.derive(sa.x(j)).derive(sa.t1(j)) + p0.derive(sa.y(j)).derive(sa.t2(j));
    return r + t.scaled(imag_unit<S>() * ratio<S>(1, 2));
}

// Local insertion factor A^{-1} p(x, D + DE) A on chain(n, 2), A = e^{-k phi1} vol^{1/2},
// E = -k sum lambda w wbar + 2k sum lambda w wbar', truncated at excess cap.
template <class S>
KPoly<S> psdo_insertion(const WeightSpec<S>& w, const Poly<S>& symbol, int cap)
{
    const int n = w.n;
    const Alphabet la = Alphabet::chain(n, 2);
    const Alphabet sa = symbol.alphabet();
    require(sa == Alphabet::symbol(n), "psdo_insertion: symbol alphabet mismatch");
    const int tmax = theta_degree(symbol);
    if (cap < -tmax) return KPoly<S>(la);
    const S I = imag_unit<S>(), half = ratio<S>(1, 2);

    auto expA = [&](int sign, int c) {
        KPoly<S> X = KPoly<S>::from_poly(expansion::to_slot(w.phi1, la, 0).scaled(S(sign)), 1);
        KPoly<S> e = expansion::exp_kpoly(X.truncated(c), c);
        Poly<S> q = expansion::to_slot(w.vol - Poly<S>::constant(w.vol.alphabet(), S(1)), la, 0);
        Poly<S> v = binomial_series(q, -sign, 2, c);
        return mul_excess(e, KPoly<S>::from_poly(v), c);
    };
    KPoly<S> A = expA(-1, cap + tmax);
    KPoly<S> Ainv = expA(1, std::max(cap + tmax, 0));

    // D_x E, D_y E per dimension
    std::vector<KPoly<S>> DxE, DyE;
    for (int j = 0; j < n; ++j) {
        const S lam = w.lambda[j];
        Poly<S> wv = Poly<S>::var(la, la.w(0, j)), wb = Poly<S>::var(la, la.wbar(0, j)),
                wn = Poly<S>::var(la, la.wbar(1, j));
        Poly<S> dx = ((wv + wb).scaled(-lam) + wn.scaled(S(2) * lam)).scaled(-I);
        Poly<S> dy = (wv - wb).scaled(lam) + wn.scaled(S(2) * lam);
        DxE.push_back(KPoly<S>::from_poly(dx, 1));
        DyE.push_back(KPoly<S>::from_poly(dy, 1));
    }
    auto step = [&](const KPoly<S>& g, int var, int c) {
        const int j = var % n;
        const bool is_x = var < n;
        KPoly<S> d = g.map_coeffs(
            [&](const Poly<S>& p) {
                Poly<S> a = p.derive(la.w(0, j)), b = p.derive(la.wbar(0, j));
                return is_x ? (a + b).scaled(-I) : a - b;
            },
            la);
        d += mul_excess(is_x ? DxE[j] : DyE[j], g, c);
        return d.truncated(c);
    };
    // x, y coefficients in slot-0 chain variables
    std::vector<Poly<S>> img(sa.nvars(), Poly<S>(la));
    for (int j = 0; j < n; ++j) {
        img[sa.x(j)] = Poly<S>::var(la, la.w(0, j), half) + Poly<S>::var(la, la.wbar(0, j), half);
        img[sa.y(j)] = Poly<S>::var(la, la.w(0, j), -half * I) + Poly<S>::var(la, la.wbar(0, j), half * I);
        img[sa.t1(j)] = Poly<S>(la);
        img[sa.t2(j)] = Poly<S>(la);
    }
    std::map<Exponent, Poly<S>> by_theta;
    for (const auto& [e, c] : symbol.terms()) {
        Exponent th(2 * n, 0), xy(sa.nvars(), 0);
        for (int i = 0; i < 2 * n; ++i) {
            th[i] = e[2 * n + i];
            xy[i] = e[i];
        }
        auto it = by_theta.emplace(th, Poly<S>(sa)).first;
        it->second.add_term(xy, c);
    }
    KPoly<S> acc(la);
    for (const auto& [th, coef] : by_theta) {
        int steps = 0;
        for (auto t : th) steps += t;
        KPoly<S> g = A.truncated(cap + steps);
        int left = steps;
        for (int v = 0; v < 2 * n; ++v)
            for (int r = 0; r < th[v]; ++r) {
                --left;
                g = step(g, v, cap + left);
            }
        Poly<S> cw = coef.substitute(img, la);
        acc += mul_excess(KPoly<S>::from_poly(cw), g, cap);
    }
    return mul_excess(Ainv, acc, cap);
}

template <class S>
expansion::Insertion<S> psdo_insertion_spec(const WeightSpec<S>& w, const Poly<S>& symbol)
{
    expansion::Insertion<S> ins;
    ins.lower_bound = -theta_degree(symbol);
    ins.build = [w, symbol](int cap) { return psdo_insertion(w, symbol, cap); };
    return ins;
}

// Diagonal expansion T_P(0,0) ~ sum_j c_j k^{n+m-j}; c_j normalized by C0. No order cap.
template <class S>
expansion::ExpansionResult<S> psdo_toeplitz_general(const WeightSpec<S>& w, const SymbolExpansion<S>& P, int M)
{
    P.validate();
    require(M >= 0, "psdo_toeplitz_coeffs: M >= 0");
    require(theta_degree(P.total()) <= P.order, "psdo_toeplitz_coeffs: grade theta degree exceeds the order");
    const int m = P.order;
    auto cs = expansion::chain_sum<S>(w, {psdo_insertion_spec(w, P.total())}, 2 * M - 2 * m);
    return expansion::collect(w, cs, M, w.n + m, -2 * m);
}

template <class S>
expansion::ExpansionResult<S> psdo_toeplitz_coeffs(const WeightSpec<S>& w, const SymbolExpansion<S>& P, int M)
{
    if (M > 1) throw PreconditionError("psdo_toeplitz_coeffs: orders above 1 are not supported");
    return psdo_toeplitz_general(w, P, M);
}

// c_1 / C0 at the centre by the closed form for phi1 = O(|z|^4):
// p_1 + (i/2) sum (p0_{x theta1} + p0_{y theta2}) + 1/2 sum ((1/(4 lambda))(p0_xx + p0_yy)
// + lambda (p0_{theta1 theta1} + p0_{theta2 theta2})) + (a_1 / C0) p0.
template <class S>
struct C1ClosedForm {
    S gaussian_form;   // the theta-theta form above
    S invariant_form;  // sigma_sub + Delta_L(p0 on contact)/2 + sigma_hat + (a1/C0) p0
};

template <class S>
C1ClosedForm<S> psdo_c1_closed_form(const WeightSpec<S>& w, const SymbolExpansion<S>& P)
{
    P.validate();
    const Alphabet wa = Alphabet::wirtinger(w.n);
    for (int j = 0; j < w.n; ++j)
        if (!is_zero_s(w.vol.derive(wa.z(j)).constant_term()))
            throw PreconditionError("psdo_c1_closed_form: vol must be flat to first order at the centre");
    const Poly<S>& p0 = P.grades.at(0);
    const Alphabet& sa = p0.alphabet();
    const S a1 = expansion::a1_closed_form(w);
    const S p00 = at_origin(p0);
    C1ClosedForm<S> r;
    S g = at_origin(subprincipal(P));
    for (int j = 0; j < sa.n; ++j) {
        const S lam = w.lambda[j];
        S xx = at_origin(p0.derive(sa.x(j)).derive(sa.x(j))) + at_origin(p0.derive(sa.y(j)).derive(sa.y(j)));
        S tt = at_origin(p0.derive(sa.t1(j)).derive(sa.t1(j))) + at_origin(p0.derive(sa.t2(j)).derive(sa.t2(j)));
        g += ratio<S>(1, 2) * (xx / (S(4) * lam) + lam * tt);
    }
    r.gaussian_form = g + a1 * p00;

    const Alphabet a = Alphabet::wirtinger(w.n);
    Poly<S> pc = on_contact(p0, w);
    S lap(0);
    for (int j = 0; j < w.n; ++j) {
        // d_xx + d_yy = 4 d_z d_zbar
        lap += pc.derive(a.z(j)).derive(a.zbar(j)).constant_term() / w.lambda[j];
    }
    r.invariant_form = on_contact(subprincipal(P), w).constant_term() + ratio<S>(1, 2) * lap + sigma_hat(p0, w) + a1 * p00;
    return r;
}

// Diagonal coefficients of T_P T_Q - T_Q T_P, leading power n + m1 + m2.
template <class S>
expansion::ExpansionResult<S> psdo_commutator_coeffs(const WeightSpec<S>& w, const SymbolExpansion<S>& P,
                                                     const SymbolExpansion<S>& Q, int M)
{
    const int m = P.order + Q.order;
    const int cap = 2 * M - 2 * m;
    auto ip = psdo_insertion_spec(w, P.total()), iq = psdo_insertion_spec(w, Q.total());
    auto pq = expansion::chain_sum<S>(w, {ip, iq}, cap);
    auto qp = expansion::chain_sum<S>(w, {iq, ip}, cap);
    for (const auto& [e, v] : qp.by_excess) {
        auto it = pq.by_excess.emplace(e, S(0)).first;
        it->second -= v;
    }
    for (const auto& [key, v] : qp.contributions) {
        auto it = pq.contributions.emplace(key, S(0)).first;
        it->second -= v;
    }
    return expansion::collect(w, pq, M, w.n + m, -2 * m);
}

template <class S>
struct CommutatorReport {
    SymbolExpansion<S> order_k0;    // p#q - q#p
    S principal_k_minus1;          // i {p0 on contact, q0 on contact}_L at 0
    S psi_bracket;                 // i {p0, q0}_Psi at (0, theta(0))
    S engine;                      // coefficient of k^{n+m1+m2-1} in diag [T_P, T_Q], over C0
    S split_sum;                   // grade-1 of the symbol commutator + both brackets
    S absorbed_sum;                // grade-1 of the symbol commutator + the L bracket
};

template <class S>
CommutatorReport<S> psdo_star_commutator(const WeightSpec<S>& w, const SymbolExpansion<S>& P,
                                         const SymbolExpansion<S>& Q)
{
    if (!P.classical || !Q.classical || !P.check_classical() || !Q.check_classical())
        throw PreconditionError("psdo_star_commutator: classical symbols required");
    CommutatorReport<S> r;
    r.order_k0 = symbol_commutator(P, Q);
    const Poly<S>& p0 = P.grades.at(0);
    const Poly<S>& q0 = Q.grades.at(0);
    r.principal_k_minus1 =
        imag_unit<S>() * star::poisson_bracket_L(w.lambda, on_contact(p0, w), on_contact(q0, w)).constant_term();
    r.psi_bracket = imag_unit<S>() * on_contact(symbol_poisson(p0, q0), w).constant_term();
    auto c = psdo_commutator_coeffs(w, P, Q, 1);
    r.engine = c.normalized[1];
    S g1 = r.order_k0.grades.size() > 1 ? on_contact(r.order_k0.grades[1], w).constant_term() : S(0);
    r.split_sum = g1 + r.principal_k_minus1 + r.psi_bracket;
    r.absorbed_sum = g1 + r.principal_k_minus1;
    return r;
}

} // namespace bkq::psdo

#endif
