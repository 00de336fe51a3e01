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

#ifndef BKQ_EXPANSION_HPP
#define BKQ_EXPANSION_HPP

#include <functional>
#include <map>
#include <tuple>
#include <vector>

#include "errors.hpp"
#include "poly.hpp"
#include "weight.hpp"

namespace bkq::expansion {

// Budgets for the chain factor: slot degree <= D_w and k-degree <= D_k (negative: automatic).
struct Budget {
    int D_w = -1;
    int D_k = -1;
};

// exp(X) for X with min excess >= 1, truncated at excess cap.
template <class S>
KPoly<S> exp_kpoly(const KPoly<S>& X, int cap)
{
    KPoly<S> r = KPoly<S>::constant(X.alphabet(), S(1));
    if (X.is_zero() || cap < 0) return r.truncated(std::max(cap, 0));
    require(X.min_excess() >= 1, "exp_kpoly: argument must have positive excess");
    KPoly<S> term = r;
    for (int j = 1; j * X.min_excess() <= cap; ++j) {
        term = mul_excess(term, X, cap).scaled(ratio<S>(1, j));
        if (term.is_zero()) break;
        r += term;
    }
    return r;
}

// Wirtinger poly in n variables placed in slot s of a chain alphabet.
template <class S>
Poly<S> to_slot(const Poly<S>& p, Alphabet chain, int s)
{
    const Alphabet& a = p.alphabet();
    require(a.tag == Tag::wirtinger && a.n == chain.n, "to_slot: Wirtinger poly with matching n required");
    std::vector<int> map(a.nvars());
    for (int j = 0; j < a.n; ++j) {
        map[a.z(j)] = chain.w(s, j);
        map[a.zbar(j)] = chain.wbar(s, j);
    }
    return p.remap(chain, map);
}

// Local two-slot factor (slot 0 = this point, slot 1 = next point) moved to slots (s, s+1) of an
// L-slot chain; when s is the last slot the next point is the centre 0.
template <class S>
KPoly<S> place_link(const KPoly<S>& local, int L, int s)
{
    const Alphabet la = local.alphabet();
    const Alphabet ca = Alphabet::chain(la.n, L);
    std::vector<int> map(la.nvars(), -1);
    for (int j = 0; j < la.n; ++j) {
        map[la.w(0, j)] = ca.w(s, j);
        map[la.wbar(0, j)] = ca.wbar(s, j);
        if (s + 1 < L) {
            map[la.w(1, j)] = ca.w(s + 1, j);
            map[la.wbar(1, j)] = ca.wbar(s + 1, j);
        }
    }
    return local.map_coeffs([&](const Poly<S>& p) { return p.remap(ca, map); }, ca);
}

// v(x, y) = e^{2k(phi1(x) - phi1(y))} vol(x)^{-1} vol(y) - 1 on chain(n, 2), truncated at excess cap.
template <class S>
KPoly<S> link_factor(const WeightSpec<S>& w, int cap)
{
    w.validate();
    const Alphabet la = Alphabet::chain(w.n, 2);
    if (cap < 1) return KPoly<S>(la);
    Poly<S> px = to_slot(w.phi1, la, 0), py = to_slot(w.phi1, la, 1);
    KPoly<S> X = KPoly<S>::from_poly((px - py).scaled(S(2)), 1);
    KPoly<S> e = exp_kpoly(X.truncated(cap), cap);
    Poly<S> q = w.vol - Poly<S>::constant(w.vol.alphabet(), S(1));
    Poly<S> vinv = binomial_series(to_slot(q, la, 0), -1, 1, cap);
    Poly<S> vy = to_slot(w.vol, la, 1);
    KPoly<S> m = mul_excess(KPoly<S>::from_poly(vinv), KPoly<S>::from_poly(vy), cap);
    KPoly<S> r = mul_excess(e, m, cap);
    r -= KPoly<S>::constant(la, S(1));
    return r;
}

template <class S>
struct ChainFactor {
    int D_w = 0;
    int D_k = 0;
    KPoly<S> v; // chain(n, 2): slot 0 = x, slot 1 = y
};

template <class S>
ChainFactor<S> chain_factor(const WeightSpec<S>& w, int D_w, int D_k)
{
    require(D_w >= 0 && D_k >= 0, "chain_factor: budgets must be non-negative");
    KPoly<S> full = link_factor(w, D_w);
    ChainFactor<S> r{D_w, D_k, KPoly<S>(full.alphabet())};
    for (const auto& [q, p] : full.by_power())
        if (q <= D_k) r.v.add(q, p.truncated(D_w));
    return r;
}

// u = prod_{nu} v(w^nu, w^{nu+1}) with the last slot chained to 0, truncated by the budgets.
template <class S>
KPoly<S> build_u(const WeightSpec<S>& w, int ell, const Budget& b)
{
    require(ell >= 1, "build_u: ell >= 1");
    require(b.D_w >= 0 && b.D_k >= 0, "build_u: explicit budgets required");
    ChainFactor<S> cf = chain_factor(w, b.D_w, b.D_k);
    const Alphabet ca = Alphabet::chain(w.n, ell);
    KPoly<S> u = KPoly<S>::constant(ca, S(1));
    for (int s = 0; s < ell; ++s) {
        KPoly<S> f = place_link(cf.v, ell, s);
        KPoly<S> r(ca);
        for (const auto& [qa, pa] : u.by_power())
            for (const auto& [qb, pb] : f.by_power())
                if (qa + qb <= b.D_k) r.add(qa + qb, mul_truncated(pa, pb, b.D_w));
        u = r;
    }
    return u;
}

// Number of Wick pairings of one chain monomial in one complex dimension, with
// E[w^mu wbar^nu] nonzero iff nu <= mu. Returns 0 for unbalanced monomials.
inline long long chain_pairings(const Exponent& e, const Alphabet& ca, int j, int& d)
{
    long long count = 1;
    int avail = 0, sa = 0, sb = 0;
    for (int mu = 0; mu < ca.slots; ++mu) {
        int a = e[ca.w(mu, j)], b = e[ca.wbar(mu, j)];
        sa += a;
        sb += b;
        avail += b;
        for (int t = 0; t < a; ++t) {
            if (avail <= 0) return 0;
            count *= avail;
            --avail;
        }
    }
    d = sa;
    return sa == sb ? count : 0;
}

// Gaussian chain expectation E[m] times (2k)^{d} per dimension, i.e. count * prod (2 lambda_j)^{-d_j};
// total degree 2d; returns false for a zero expectation.
template <class S>
bool chain_moment(const Exponent& e, const Alphabet& ca, const std::vector<S>& lambda, S& value, int& d)
{
    value = S(1);
    d = 0;
    for (int j = 0; j < ca.n; ++j) {
        int dj = 0;
        long long c = chain_pairings(e, ca, j, dj);
        if (c == 0) return false;
        S inv = S(1) / (S(2) * lambda[j]);
        S m = S(c);
        for (int t = 0; t < dj; ++t) m = m * inv;
        value = value * m;
        d += dj;
    }
    return true;
}

// Delta_ell^j expr at 0 by pairing counts: j! * count * prod lambda^{-d_j} on the degree-2j part.
template <class S>
S delta_l_apply(const Poly<S>& expr, const std::vector<S>& lambda, int ell, int j)
{
    const Alphabet& ca = expr.alphabet();
    require(ca.tag == Tag::chain && ca.slots == ell && ca.n == static_cast<int>(lambda.size()),
            "delta_l_apply: expr must live on the ell-slot chain");
    S total(0);
    S fact(1);
    for (int t = 2; t <= j; ++t) fact = fact * S(t);
    S two_j(1);
    for (int t = 0; t < j; ++t) two_j = two_j * S(2);
    for (const auto& [e, c] : expr.terms()) {
        if (total_degree(e) != 2 * j) continue;
        S v;
        int d;
        if (!chain_moment(e, ca, lambda, v, d)) continue;
        total += c * v * fact * two_j;
    }
    return total;
}

// Delta_ell applied literally as a differential operator, j times, then evaluated at 0.
template <class S>
S delta_l_literal(const Poly<S>& expr, const std::vector<S>& lambda, int ell, int j)
{
    const Alphabet& ca = expr.alphabet();
    require(ca.tag == Tag::chain && ca.slots == ell, "delta_l_literal: chain alphabet required");
    Poly<S> u = expr;
    for (int t = 0; t < j; ++t) {
        Poly<S> r(ca);
        for (int d = 0; d < ca.n; ++d) {
            S il = S(1) / lambda[d];
            for (int nu = 0; nu < ell; ++nu) {
                r += u.derive(ca.w(nu, d)).derive(ca.wbar(nu, d)).scaled(il);
                for (int mu = nu + 1; mu < ell; ++mu) r += u.derive(ca.wbar(nu, d)).derive(ca.w(mu, d)).scaled(il);
            }
        }
        u = r;
    }
    return u.constant_term();
}

// Contributions keyed by (excess e, Gaussian degree j, number of link factors ell).
template <class S>
struct ChainSum {
    std::map<int, S> by_excess;
    std::map<std::tuple<int, int, int>, S> contributions;
};

template <class S>
void accumulate_expectation(const KPoly<S>& amp, const std::vector<S>& lambda, int ell, ChainSum<S>& out)
{
    const Alphabet& ca = amp.alphabet();
    for (const auto& [q, p] : amp.by_power())
        for (const auto& [e, c] : p.terms()) {
            S v;
            int d;
            if (!chain_moment(e, ca, lambda, v, d)) continue;
            const int ex = 2 * d - 2 * q;
            S val = c * v;
            auto it = out.by_excess.emplace(ex, S(0)).first;
            it->second += val;
            auto jt = out.contributions.emplace(std::make_tuple(ex, d, ell), S(0)).first;
            jt->second += val;
        }
}

// An insertion slot: builder returns a local two-slot KPoly (slot 0 = the insertion point,
// slot 1 = the next point) truncated at the requested excess; lower_bound bounds its excess.
template <class S>
struct Insertion {
    std::function<KPoly<S>(int cap)> build;
    int lower_bound = 0;
};

template <class S>
Insertion<S> function_insertion(const Poly<S>& f)
{
    require(f.alphabet().tag == Tag::wirtinger, "function_insertion: Wirtinger poly required");
    Insertion<S> ins;
    ins.lower_bound = f.is_zero() ? 0 : f.valuation();
    ins.build = [f](int cap) {
        const Alphabet la = Alphabet::chain(f.alphabet().n, 2);
        if (cap < 0) return KPoly<S>(la);
        return KPoly<S>::from_poly(to_slot(f, la, 0).truncated(cap));
    };
    return ins;
}

// Sum over all chains 0 -> [gap_0 link slots] -> ins_0 -> [gap_1] -> ins_1 ... -> [gap_I] -> 0 of the
// normalized Gaussian expectation, pruned at total excess <= max_excess. A link slot carries
// v(w^s, w^{s+1}); an insertion slot carries its own factor and no v.
template <class S>
ChainSum<S> chain_sum(const WeightSpec<S>& w, const std::vector<Insertion<S>>& ins, int max_excess)
{
    w.validate();
    const int I = static_cast<int>(ins.size());
    int lb_sum = 0;
    for (const auto& i : ins) lb_sum += i.lower_bound;
    std::vector<KPoly<S>> built;
    std::vector<int> mins;
    int min_sum = 0;
    for (int i = 0; i < I; ++i) {
        KPoly<S> b = ins[i].build(max_excess - (lb_sum - ins[i].lower_bound));
        mins.push_back(b.is_zero() ? (1 << 20) : b.min_excess());
        if (!b.is_zero()) require(mins.back() >= ins[i].lower_bound, "chain_sum: insertion below its excess bound");
        min_sum += mins.back();
        built.push_back(std::move(b));
    }
    ChainSum<S> out;
    if (min_sum > max_excess) return out;
    const int vcap = max_excess - min_sum;
    KPoly<S> v = link_factor(w, vcap);
    const int vmin = v.is_zero() ? (1 << 20) : v.min_excess();
    require(v.is_zero() || vmin >= 1, "chain_sum: link factor must have positive excess");
    const int max_links = v.is_zero() ? 0 : vcap / vmin;
    std::vector<S> lambda = w.lambda;

    std::vector<int> gaps(I + 1, 0);
    std::function<void(int, int)> rec = [&](int g, int left) {
        if (g == I) {
            gaps[I] = left;
            int L = I;
            for (int x : gaps) L += x;
            int ell = 0;
            for (int x : gaps) ell += x;
            // factor list in slot order
            std::vector<KPoly<S>> fac;
            std::vector<int> fmin;
            int s = 0;
            for (int gi = 0; gi <= I; ++gi) {
                for (int t = 0; t < gaps[gi]; ++t, ++s) {
                    fac.push_back(place_link(v, L, s));
                    fmin.push_back(vmin);
                }
                if (gi < I) {
                    fac.push_back(place_link(built[gi], L, s));
                    fmin.push_back(mins[gi]);
                    ++s;
                }
            }
            const Alphabet ca = Alphabet::chain(w.n, std::max(L, 1));
            KPoly<S> amp = KPoly<S>::constant(ca, S(1));
            if (L == 0) {
                accumulate_expectation(KPoly<S>::constant(Alphabet::chain(w.n, 1), S(1)), lambda, 0, out);
                return;
            }
            int rest = 0;
            for (int x : fmin) rest += x;
            for (std::size_t i = 0; i < fac.size(); ++i) {
                rest -= fmin[i];
                amp = mul_excess(amp, fac[i], max_excess - rest);
                if (amp.is_zero()) return;
            }
            accumulate_expectation(amp, lambda, ell, out);
            return;
        }
        for (int x = 0; x <= left; ++x) {
            gaps[g] = x;
            rec(g + 1, left - x);
        }
    };
    for (int total = 0; total <= max_links; ++total) {
        if (total * vmin + min_sum > max_excess && total > 0) break;
        rec(0, total);
    }
    return out;
}

template <class S>
struct Contribution {
    int order = 0;
    int j = 0;
    int ell = 0;
    S value{};
};

// Coefficients normalized by C0 = prod lambda_j / pi; the printed value is C0 * normalized.
template <class S>
struct ExpansionResult {
    int leading_power = 0;
    double c0 = 0.0;
    std::vector<S> normalized;
    std::vector<Contribution<S>> contributions;

    int order() const { return static_cast<int>(normalized.size()) - 1; }
    cplx value(int m) const { return c0 * to_cplx(normalized.at(m)); }
    KSeries<cplx> series() const
    {
        KSeries<cplx> s{leading_power, {}};
        for (int m = 0; m <= order(); ++m) s.coeffs.push_back(value(m));
        return s;
    }
};

// Collect the even excesses 2m + shift, m = 0..M, into an ExpansionResult.
template <class S>
ExpansionResult<S> collect(const WeightSpec<S>& w, const ChainSum<S>& cs, int M, int leading, int shift = 0)
{
    ExpansionResult<S> r;
    r.leading_power = leading;
    r.c0 = w.c0();
    r.normalized.assign(M + 1, S(0));
    for (const auto& [e, val] : cs.by_excess) {
        if ((e - shift) % 2 != 0) {
            if (!is_zero_s(val)) throw Error("expansion: non-vanishing half-integer order contribution");
            continue;
        }
        int m = (e - shift) / 2;
        if (m >= 0 && m <= M) r.normalized[m] = val;
    }
    for (const auto& [key, val] : cs.contributions) {
        auto [e, j, ell] = key;
        if ((e - shift) % 2 || is_zero_s(val)) continue;
        int m = (e - shift) / 2;
        if (m >= 0 && m <= M) r.contributions.push_back({m, j, ell, val});
    }
    return r;
}

inline void check_budget(const Budget& b, int M)
{
    if (b.D_w >= 0 && b.D_w < 6 * M) throw BudgetError("expansion: slot-degree budget D_w must be >= 6M");
    if (b.D_k >= 0 && b.D_k < M) throw BudgetError("expansion: k-degree budget D_k must be >= M");
}

template <class S>
ExpansionResult<S> bergman_diagonal_coeffs(const WeightSpec<S>& w, int M, const Budget& b = {})
{
    require(M >= 0, "bergman_diagonal_coeffs: M >= 0");
    check_budget(b, M);
    auto cs = chain_sum<S>(w, {}, 2 * M);
    return collect(w, cs, M, w.n);
}

// The same coefficients by the literal enumeration j <= jmax, ell <= 2j (or ell <= lmax),
// with degree truncation 2 jmax and no excess pruning.
template <class S>
std::vector<S> bergman_coeffs_literal(const WeightSpec<S>& w, int M, int jmax, int lmax = -1)
{
    std::vector<S> a(M + 1, S(0));
    a[0] = S(1);
    const int D = 2 * jmax;
    const int ell_cap = lmax >= 0 ? lmax : 2 * jmax;
    for (int ell = 1; ell <= ell_cap; ++ell) {
        KPoly<S> u = build_u(w, ell, Budget{D, jmax});
        for (int j = 0; j <= jmax; ++j) {
            if (lmax < 0 && ell > 2 * j) continue;
            S fact(1), two(1);
            for (int t = 2; t <= j; ++t) fact = fact * S(t);
            for (int t = 0; t < j; ++t) two = two * S(2);
            for (const auto& [p, poly] : u.by_power()) {
                int m = j - p;
                if (m < 0 || m > M) continue;
                a[m] += delta_l_apply(poly, w.lambda, ell, j) / (two * fact);
            }
        }
    }
    return a;
}

// C0 [ 1/2 sum (1/lambda_j)(|d vol/dz_j|^2 - d^2 vol/dz_j dzbar_j)
//      + 1/4 sum (1/(lambda_j lambda_l)) d^4 phi / dz_j dzbar_j dz_l dzbar_l ] at 0, normalized by C0.
template <class S>
S a1_closed_form(const WeightSpec<S>& w)
{
    w.validate();
    if (!w.phi1.is_zero() && w.phi1.valuation() < 4)
        throw PreconditionError("a1_closed_form: phi1 has cubic terms; use bergman_diagonal_coeffs");
    const Alphabet a = Alphabet::wirtinger(w.n);
    const Poly<S> ph = w.phi();
    S r(0);
    const S half = ratio<S>(1, 2), quarter = ratio<S>(1, 4);
    for (int j = 0; j < w.n; ++j) {
        S dz = w.vol.derive(a.z(j)).constant_term();
        S dzb = w.vol.derive(a.zbar(j)).constant_term();
        S dd = w.vol.derive(a.z(j)).derive(a.zbar(j)).constant_term();
        r += half / w.lambda[j] * (dz * dzb - dd);
        for (int l = 0; l < w.n; ++l) {
            S d4 = ph.derive(a.z(j)).derive(a.zbar(j)).derive(a.z(l)).derive(a.zbar(l)).constant_term();
            r += quarter / (w.lambda[j] * w.lambda[l]) * d4;
        }
    }
    return r;
}

} // namespace bkq::expansion

#endif
