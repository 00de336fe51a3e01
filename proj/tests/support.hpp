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

#ifndef BKQ_TESTS_SUPPORT_HPP
#define BKQ_TESTS_SUPPORT_HPP

#include <random>
#include <vector>

#include "bkq/chern_moser.hpp"
#include "bkq/model_kernel.hpp"
#include "bkq/poly.hpp"
#include "bkq/quadrature.hpp"

namespace bkq::testing {

// int B_{phi0}(x, y) y^alpha d-lambda(y) on a polydisc, polar tensor rule per axis.
// B_{phi0} already carries e^{-2 phi0(y)}.
inline cplx reproduce_monomial(const model::ModelWeight& w, const std::vector<cplx>& x, const Exponent& alpha,
                               int radial = 48, int angular = 48)
{
    const int n = w.n();
    std::vector<std::vector<cplx>> pts(n);
    std::vector<std::vector<double>> wts(n);
    for (int j = 0; j < n; ++j) {
        double rmax = std::abs(x[j]) + 7.0 / std::sqrt(w.lambda[j]);
        Rule1D r = composite_legendre(radial / 4, 4, 0.0, rmax);
        for (std::size_t i = 0; i < r.nodes.size(); ++i)
            for (int t = 0; t < angular; ++t) {
                pts[j].push_back(std::polar(r.nodes[i], 2.0 * M_PI * t / angular));
                wts[j].push_back(2.0 * r.weights[i] * r.nodes[i] * 2.0 * M_PI / angular);
            }
    }
    std::vector<cplx> terms;
    std::vector<std::size_t> idx(n, 0);
    std::vector<cplx> y(n);
    const std::size_t per = pts[0].size();
    std::size_t total = 1;
    for (int j = 0; j < n; ++j) total *= per;
    terms.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
        double wt = 1.0;
        cplx m = 1.0;
        for (int j = 0; j < n; ++j) {
            y[j] = pts[j][idx[j]];
            wt *= wts[j][idx[j]];
            for (int q = 0; q < alpha[j]; ++q) m *= y[j];
        }
        terms.push_back(wt * m * model::bergman_fock_eval(w, x, y));
        for (int j = n - 1; j >= 0; --j) {
            if (++idx[j] < per) break;
            idx[j] = 0;
        }
    }
    return pairwise_sum(terms);
}

inline cplx monomial_value(const std::vector<cplx>& x, const Exponent& alpha)
{
    cplx m = 1.0;
    for (std::size_t j = 0; j < x.size(); ++j)
        for (int q = 0; q < alpha[j]; ++q) m *= x[j];
    return m;
}

inline std::vector<Exponent> holomorphic_exponents(int n, int maxdeg)
{
    std::vector<Exponent> out;
    for (int a = 0; a <= maxdeg; ++a) {
        if (n == 1) out.push_back({static_cast<std::uint8_t>(a)});
        else
            for (int b = 0; a + b <= maxdeg; ++b) out.push_back({static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b)});
    }
    return out;
}


// Random real weight jet: Hermitian positive Hessian, holomorphic gauge terms of degree <= 2,
// real cubic and quartic terms; random Hermitian positive metric and positive vol.
inline cm::RawJet random_raw_jet(std::mt19937& rng, int n)
{
    std::normal_distribution<double> g;
    const Alphabet a = Alphabet::wirtinger(n);
    cm::RawJet raw;
    raw.n = n;
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) B(i, j) = cplx(g(rng), g(rng));
    Eigen::MatrixXcd H = B * B.adjoint() + 0.5 * Eigen::MatrixXcd::Identity(n, n);
    Poly<cplx> q(a);
    q.add_term(Exponent(2 * n, 0), 0.5 * g(rng));
    for (int j = 0; j < n; ++j) {
        Exponent e(2 * n, 0);
        e[a.z(j)] = 1;
        q.add_term(e, cplx(g(rng), g(rng)));
        for (int l = j; l < n; ++l) {
            Exponent f(2 * n, 0);
            f[a.z(j)] += 1;
            f[a.z(l)] += 1;
            q.add_term(f, cplx(g(rng), g(rng)));
        }
    }
    Poly<cplx> phi = q + conj_poly(q);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            Exponent e(2 * n, 0);
            e[a.z(j)] = 1;
            e[a.zbar(l)] = 1;
            phi.add_term(e, H(j, l));
        }
    Poly<cplx> hi(a);
    std::uniform_int_distribution<int> pick(0, 2 * n - 1);
    for (int t = 0; t < 6; ++t) {
        Exponent e(2 * n, 0);
        int deg = 3 + t % 2;
        for (int d = 0; d < deg; ++d) e[pick(rng)] += 1;
        hi.add_term(e, 0.1 * cplx(g(rng), g(rng)));
    }
    raw.phi = phi + hi + conj_poly(hi);
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) C(i, j) = 0.3 * cplx(g(rng), g(rng));
    raw.metric = C * C.adjoint() + Eigen::MatrixXcd::Identity(n, n);
    Poly<cplx> v(a);
    for (int j = 0; j < n; ++j) {
        Exponent e(2 * n, 0);
        e[a.z(j)] = 1;
        v.add_term(e, 0.1 * cplx(g(rng), g(rng)));
        e[a.zbar(j)] = 1;
        v.add_term(e, 0.05 * g(rng));
    }
    raw.vol = Poly<cplx>::constant(a, 1.0 + 0.2 * std::abs(g(rng))) + v + conj_poly(v);
    raw.R = 0.3;
    return raw;
}

} // namespace bkq::testing

#endif
