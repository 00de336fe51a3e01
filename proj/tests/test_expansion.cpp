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

#include "catch_amalgamated.hpp"

#include <random>

#include "bkq/expansion.hpp"
#include "bkq/gaussian.hpp"
#include "bkq/oracle.hpp"
#include "support.hpp"

using namespace bkq;
using namespace bkq::expansion;
using Q = QComplex;

namespace {

Poly<Q> wq(int n, std::vector<int> ex, long long num = 1, long long den = 1)
{
    return Poly<Q>::monomial(Alphabet::wirtinger(n), Exponent(ex.begin(), ex.end()), ratio<Q>(num, den));
}

WeightSpec<Q> quartic(long long num, long long den)
{
    auto w = WeightSpec<Q>::flat({Q(1)});
    w.phi1 = wq(1, {2, 2}, num, den);
    return w;
}

Q q(long long a, long long b = 1) { return ratio<Q>(a, b); }

} // namespace

TEST_CASE("link factor leading terms", "[expansion]")
{
    auto w = quartic(3, 1);
    ChainFactor<Q> cf = chain_factor(w, 8, 2);
    const Alphabet la = Alphabet::chain(1, 2);
    Poly<Q> lead(la);
    lead.add_term({2, 2, 0, 0}, q(6));
    lead.add_term({0, 0, 2, 2}, q(-6));
    CHECK(cf.v.by_power().at(1) == lead);
    CHECK(cf.v.by_power().count(0) == 0);
    CHECK(cf.v.by_power().at(2) == mul_truncated(lead, lead, -1).scaled(q(1, 2)));

    auto wv = WeightSpec<Q>::flat({Q(1)});
    wv.vol = wq(1, {0, 0}) + wq(1, {1, 0}, 1, 5) + wq(1, {0, 1}, 1, 5);
    ChainFactor<Q> cv = chain_factor(wv, 1, 0);
    Poly<Q> lin(la);
    lin.add_term({1, 0, 0, 0}, q(-1, 5));
    lin.add_term({0, 1, 0, 0}, q(-1, 5));
    lin.add_term({0, 0, 1, 0}, q(1, 5));
    lin.add_term({0, 0, 0, 1}, q(1, 5));
    CHECK(cv.v.by_power().at(0) == lin);
}

TEST_CASE("chain amplitude for two links", "[expansion]")
{
    auto w = quartic(1, 2);
    KPoly<Q> u = build_u(w, 2, Budget{8, 2});
    const Alphabet ca = Alphabet::chain(1, 2);
    Poly<Q> a(ca), b(ca);
    a.add_term({2, 2, 0, 0}, q(1));
    a.add_term({0, 0, 2, 2}, q(-1));
    b.add_term({0, 0, 2, 2}, q(1));
    CHECK(u.by_power().count(1) == 0);
    CHECK(u.by_power().at(2) == mul_truncated(a, b, -1));
}

TEST_CASE("Delta_ell examples and literal operator", "[expansion]")
{
    const std::vector<Q> l1{Q(1)};
    const Alphabet c1 = Alphabet::chain(1, 1), c2 = Alphabet::chain(1, 2);
    CHECK(delta_l_apply(Poly<Q>::monomial(c1, {1, 1}), l1, 1, 1) == q(1));
    CHECK(delta_l_apply(Poly<Q>::monomial(c1, {2, 2}), l1, 1, 2) == q(4));
    CHECK(delta_l_apply(Poly<Q>::monomial(c2, {0, 1, 1, 0}), l1, 2, 1) == q(1));
    CHECK(delta_l_apply(Poly<Q>::monomial(c2, {1, 0, 0, 1}), l1, 2, 1) == q(0));

    std::mt19937 rng(5);
    std::uniform_int_distribution<int> ci(-4, 4), ei(0, 2);
    for (int n : {1, 2})
        for (int ell : {1, 2, 3}) {
            const Alphabet ca = Alphabet::chain(n, ell);
            std::vector<Q> lam;
            for (int j = 0; j < n; ++j) lam.push_back(q(j + 1, 2));
            Poly<Q> p(ca);
            for (int t = 0; t < 30; ++t) {
                Exponent e(ca.nvars(), 0);
                for (auto& x : e) x = static_cast<std::uint8_t>(ei(rng) == 2 ? 1 : 0);
                p.add_term(e, Q(Rational(ci(rng), 3), Rational(ci(rng), 7)));
            }
            for (int j = 0; j <= 3; ++j) CHECK(delta_l_apply(p, lam, ell, j) == delta_l_literal(p, lam, ell, j));
        }
}

TEST_CASE("pairing counts agree with the Gaussian engine", "[expansion]")
{
    std::mt19937 rng(9);
    std::uniform_int_distribution<int> ci(-5, 5), ei(0, 3);
    for (int n : {1, 2})
        for (int ell : {1, 2, 3}) {
            std::vector<double> lam;
            std::vector<cplx> lamc;
            for (int j = 0; j < n; ++j) {
                lam.push_back(0.5 + j);
                lamc.push_back(0.5 + j);
            }
            const Alphabet ca = Alphabet::chain(n, ell);
            auto ph = gauss::chain_phase(lam, ell);
            for (int t = 0; t < 20; ++t) {
                Poly<cplx> p(ca);
                Exponent e(ca.nvars(), 0);
                for (auto& x : e) x = static_cast<std::uint8_t>(ei(rng) == 3 ? 1 : 0);
                int d = total_degree(e);
                if (d % 2) e[0] += 1;
                d = total_degree(e);
                p.add_term(e, cplx(ci(rng), ci(rng)));
                const int j = d / 2;
                double norm = std::pow(2.0, j);
                for (int i = 2; i <= j; ++i) norm *= i;
                cplx fast = delta_l_apply(p, lamc, ell, j) / norm;
                cplx ref = gauss::lj_apply(ph, gauss::chain_to_flat(p), j);
                CHECK(std::abs(fast - ref) < 1e-11 * (1.0 + std::abs(ref)));
            }
        }
}

TEST_CASE("Bergman coefficients: closed-form examples", "[expansion]")
{
    auto w = quartic(3, 7);
    auto r = bergman_diagonal_coeffs(w, 1);
    CHECK(r.normalized[0] == q(1));
    CHECK(r.normalized[1] == q(3, 7));
    CHECK(std::abs(r.value(1) - 3.0 / 7.0 / M_PI) < 1e-15);
    CHECK(a1_closed_form(w) == q(3, 7));

    auto wv = WeightSpec<Q>::flat({Q(1)});
    wv.vol = wq(1, {0, 0}) + wq(1, {1, 1}, 2, 9);
    CHECK(bergman_diagonal_coeffs(wv, 1).normalized[1] == q(-1, 9));

    auto wg = WeightSpec<Q>::flat({Q(1)});
    wg.vol = wq(1, {0, 0}) + wq(1, {1, 0}, 1, 3) + wq(1, {0, 1}, 1, 3);
    CHECK(bergman_diagonal_coeffs(wg, 1).normalized[1] == q(1, 18));
    CHECK(a1_closed_form(wg) == q(1, 18));

    auto w2 = WeightSpec<Q>::flat({Q(1), Q(2)});
    w2.phi1 = wq(2, {1, 1, 1, 1}, 5, 1);
    CHECK(bergman_diagonal_coeffs(w2, 1).normalized[1] == q(5, 4));
    CHECK(a1_closed_form(w2) == q(5, 4));
    CHECK(std::abs(w2.c0() - 2.0 / (M_PI * M_PI)) < 1e-16);

    auto w3 = WeightSpec<Q>::flat({Q(1)});
    w3.phi1 = wq(1, {2, 1}) + wq(1, {1, 2});
    CHECK_THROWS_AS(a1_closed_form(w3), PreconditionError);
}

TEST_CASE("Bergman coefficients agree with closed form on mixed weights", "[expansion]")
{
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> ci(-6, 6);
    for (int t = 0; t < 6; ++t) {
        const int n = 1 + t % 2;
        std::vector<Q> lam;
        for (int j = 0; j < n; ++j) lam.push_back(q(1 + ci(rng) % 3 + 6, 6));
        auto w = WeightSpec<Q>::flat(lam);
        const Alphabet a = Alphabet::wirtinger(n);
        Poly<Q> ph(a), vol = Poly<Q>::constant(a, q(1));
        for (int j = 0; j < n; ++j) {
            for (int l = 0; l < n; ++l) {
                Exponent e(a.nvars(), 0);
                e[a.z(j)] += 1;
                e[a.zbar(j)] += 1;
                e[a.z(l)] += 1;
                e[a.zbar(l)] += 1;
                ph.add_term(e, q(ci(rng), 5));
                Exponent f(a.nvars(), 0);
                f[a.z(j)] += 1;
                f[a.zbar(l)] += 1;
                Q c(Rational(ci(rng), 11), j == l ? Rational(0) : Rational(ci(rng), 13));
                vol.add_term(f, c);
                Exponent g(a.nvars(), 0);
                g[a.z(l)] += 1;
                g[a.zbar(j)] += 1;
                vol.add_term(g, conj_s(c));
            }
            Exponent e(a.nvars(), 0);
            e[a.z(j)] += 1;
            Q c(Rational(ci(rng), 7), Rational(ci(rng), 7));
            vol.add_term(e, c);
            Exponent eb(a.nvars(), 0);
            eb[a.zbar(j)] += 1;
            vol.add_term(eb, conj_s(c));
        }
        w.phi1 = (ph + conj_poly(ph)).scaled(q(1, 2));
        w.vol = vol;
        CHECK(bergman_diagonal_coeffs(w, 1).normalized[1] == a1_closed_form(w));
    }
}

TEST_CASE("stabilization against the literal enumeration", "[expansion]")
{
    auto w = quartic(1, 3);
    auto r = bergman_diagonal_coeffs(w, 2);
    CHECK(bergman_coeffs_literal(w, 2, 6) == r.normalized);
    CHECK(bergman_coeffs_literal(w, 2, 7, 15) == r.normalized);

    auto wv = WeightSpec<Q>::flat({Q(1)});
    wv.vol = wq(1, {0, 0}) + wq(1, {1, 0}, 1, 4) + wq(1, {0, 1}, 1, 4) + wq(1, {1, 1}, 1, 2);
    wv.phi1 = wq(1, {2, 1}, 1, 5) + wq(1, {1, 2}, 1, 5);
    auto rv = bergman_diagonal_coeffs(wv, 1);
    CHECK(bergman_coeffs_literal(wv, 1, 3) == rv.normalized);
    CHECK(bergman_coeffs_literal(wv, 1, 4, 9) == rv.normalized);

    auto w2 = WeightSpec<Q>::flat({Q(1), q(1, 2)});
    w2.phi1 = wq(2, {2, 0, 1, 0}, 1, 3) + wq(2, {1, 0, 2, 0}, 1, 3);
    auto r2 = bergman_diagonal_coeffs(w2, 1);
    CHECK(bergman_coeffs_literal(w2, 1, 3) == r2.normalized);
}

TEST_CASE("cubic weights contribute through chains", "[expansion]")
{
    auto w = WeightSpec<Q>::flat({Q(1)});
    w.phi1 = wq(1, {2, 1}, 1, 2) + wq(1, {1, 2}, 1, 2);
    auto r = bergman_diagonal_coeffs(w, 1);
    CHECK(r.normalized[1] == bergman_coeffs_literal(w, 1, 3)[1]);
    CHECK(!is_zero_s(r.normalized[1]));
    bool has_two_links = false;
    for (const auto& c : r.contributions)
        if (c.order == 1 && c.ell == 2) has_two_links = true;
    CHECK(has_two_links);
}

TEST_CASE("floating and exact agree", "[expansion]")
{
    auto w = quartic(2, 5);
    w.vol = wq(1, {0, 0}) + wq(1, {1, 1}, 1, 3) + wq(1, {2, 0}, 1, 8) + wq(1, {0, 2}, 1, 8);
    auto re = bergman_diagonal_coeffs(w, 2);
    auto rf = bergman_diagonal_coeffs(w.cast<cplx>(), 2);
    for (int m = 0; m <= 2; ++m) CHECK(std::abs(rf.value(m) - re.value(m)) < 1e-13);
}

TEST_CASE("budget errors", "[expansion]")
{
    auto w = quartic(1, 1);
    CHECK_THROWS_AS(bergman_diagonal_coeffs(w, 1, Budget{5, 1}), BudgetError);
    CHECK_THROWS_AS(bergman_diagonal_coeffs(w, 2, Budget{12, 1}), BudgetError);
    CHECK_NOTHROW(bergman_diagonal_coeffs(w, 1, Budget{6, 1}));
}

TEST_CASE("expansion against the quadrature oracle", "[expansion][oracle]")
{
    auto w = quartic(1, 10);
    w.R = 0.7;
    auto wc = w.cast<cplx>();
    auto r = bergman_diagonal_coeffs(w, 2);
    std::vector<double> ks{40.0, 80.0};
    std::vector<double> err;
    for (double k : ks) {
        auto o = oracle::build_gram(wc, k, 40);
        cplx b = oracle::bergman_numeric(o, {0.0}, {0.0});
        cplx s = evaluate_series(r.series(), k);
        err.push_back(std::abs(b - s) / std::abs(b));
    }
    INFO(err[0] << " " << err[1]);
    CHECK(err[0] < 5.0 / (ks[0] * ks[0] * ks[0]));
    CHECK(err[1] < 5.0 / (ks[1] * ks[1] * ks[1]));
}
