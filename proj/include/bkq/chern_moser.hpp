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

#ifndef BKQ_CHERN_MOSER_HPP
#define BKQ_CHERN_MOSER_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "errors.hpp"
#include "poly.hpp"
#include "weight.hpp"

namespace bkq::cm {

struct RawJet {
    int n = 1;
    Poly<cplx> phi;
    Eigen::MatrixXcd metric;
    Poly<cplx> vol;
    double R = 1.0;
};

struct NormalForm {
    Eigen::MatrixXcd coordinate_change; // z = A zeta; unitary when the metric is the identity
    Poly<cplx> psi;                     // holomorphic gauge, phi_raw = phi_new o A^{-1} + Re psi
    std::vector<double> lambda;
    WeightSpec<cplx> weight;
    double vol_scale = 1.0;  // vol(A zeta)|det A|^2 at 0, divided out of weight.vol
    double roundtrip_error = 0.0;
};

inline bool pure_holomorphic(const Exponent& e, int n)
{
    for (int j = 0; j < n; ++j)
        if (e[n + j]) return false;
    return true;
}

// psi = phi(0) + 2 (holomorphic terms of degree 1 and 2).
inline Poly<cplx> gauge_polynomial(const Poly<cplx>& phi)
{
    const int n = phi.alphabet().n;
    Poly<cplx> psi(phi.alphabet());
    for (const auto& [e, c] : phi.terms()) {
        int d = total_degree(e);
        if (d == 0) psi.add_term(e, c);
        else if (d <= 2 && pure_holomorphic(e, n)) psi.add_term(e, 2.0 * c);
    }
    return psi;
}

// p(A zeta) with z = A zeta, zbar = conj(A) zetabar.
inline Poly<cplx> linear_change(const Poly<cplx>& p, const Eigen::MatrixXcd& A)
{
    const Alphabet a = p.alphabet();
    const int n = a.n;
    std::vector<Poly<cplx>> img(a.nvars(), Poly<cplx>(a));
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            img[a.z(j)] += Poly<cplx>::var(a, a.z(l), A(j, l));
            img[a.zbar(j)] += Poly<cplx>::var(a, a.zbar(l), std::conj(A(j, l)));
        }
    return p.substitute(img, a);
}

// p(z0 + zeta).
inline Poly<cplx> taylor_shift(const Poly<cplx>& p, const std::vector<cplx>& z0)
{
    const Alphabet a = p.alphabet();
    require(static_cast<int>(z0.size()) == a.n, "taylor_shift: point dimension mismatch");
    std::vector<Poly<cplx>> img;
    for (int i = 0; i < a.nvars(); ++i) img.push_back(Poly<cplx>::var(a, i));
    for (int j = 0; j < a.n; ++j) {
        img[a.z(j)] += Poly<cplx>::constant(a, z0[j]);
        img[a.zbar(j)] += Poly<cplx>::constant(a, std::conj(z0[j]));
    }
    return p.substitute(img, a);
}

inline Poly<cplx> chop(const Poly<cplx>& p, double tol)
{
    Poly<cplx> r(p.alphabet());
    for (const auto& [e, c] : p.terms())
        if (std::abs(c) > tol) r.add_term(e, c);
    return r;
}

inline Poly<cplx> real_part(const Poly<cplx>& p)
{
    return (p + conj_poly(p)).scaled(0.5);
}

inline NormalForm normalize_weight(const RawJet& raw)
{
    const int n = raw.n;
    const Alphabet a = Alphabet::wirtinger(n);
    require(raw.phi.alphabet() == a && raw.vol.alphabet() == a, "normalize_weight: jets must be Wirtinger polys in n variables");
    require(is_real_valued(raw.phi, 1e-12), "normalize_weight: phi jet is not real-valued");
    require(is_real_valued(raw.vol, 1e-12), "normalize_weight: vol jet is not real-valued");
    require(raw.metric.rows() == n && raw.metric.cols() == n, "normalize_weight: metric shape");
    const double mscale = std::max(1.0, raw.metric.cwiseAbs().maxCoeff());
    require((raw.metric - raw.metric.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * mscale,
            "normalize_weight: metric not Hermitian");
    require(raw.vol.constant_term().real() > 0.0, "normalize_weight: vol(0) must be positive");

    NormalForm nf;
    nf.psi = gauge_polynomial(raw.phi);
    Poly<cplx> phig = raw.phi - real_part(nf.psi);

    // Hermitian forms K(v) = v^* K v with K = H^T, where H_{jl} is the coefficient of z_j zbar_l.
    Eigen::MatrixXcd K(n, n), KG = raw.metric.transpose();
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            Exponent e(a.nvars(), 0);
            e[a.z(j)] += 1;
            e[a.zbar(l)] += 1;
            K(l, j) = phig.coeff(e);
        }
    const double hscale = std::max(1.0, K.cwiseAbs().maxCoeff());
    require((K - K.adjoint()).cwiseAbs().maxCoeff() <= 1e-10 * hscale, "normalize_weight: Hessian not Hermitian");
    K = 0.5 * (K + K.adjoint());

    Eigen::LLT<Eigen::MatrixXcd> llt(KG);
    require(llt.info() == Eigen::Success, "normalize_weight: metric not positive definite");
    Eigen::MatrixXcd Linv = Eigen::MatrixXcd(llt.matrixL()).inverse();
    Eigen::MatrixXcd M = Linv * K * Linv.adjoint();
    M = 0.5 * (M + M.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int p, int q) { return es.eigenvalues()(p) > es.eigenvalues()(q); });
    Eigen::MatrixXcd A(n, n);
    Eigen::MatrixXcd B = Linv.adjoint();
    for (int c = 0; c < n; ++c) {
        Eigen::VectorXcd col = B * es.eigenvectors().col(order[c]);
        for (int r = 0; r < n; ++r)
            if (std::abs(col(r)) > 1e-12) {
                col *= std::abs(col(r)) / col(r);
                break;
            }
        A.col(c) = col;
        nf.lambda.push_back(es.eigenvalues()(order[c]));
    }
    nf.coordinate_change = A;

    Poly<cplx> phin = linear_change(phig, A);
    Poly<cplx> voln = linear_change(raw.vol, A).scaled(std::norm(A.determinant()));
    nf.vol_scale = voln.constant_term().real();
    voln = voln.scaled(1.0 / nf.vol_scale);
    voln.add_term(Exponent(a.nvars(), 0), 1.0 - voln.constant_term());

    WeightSpec<cplx> w;
    w.n = n;
    for (double l : nf.lambda) w.lambda.push_back(l);
    Poly<cplx> phi1 = phin - w.phi0();
    const double tol = 1e-10 * std::max(1.0, phin.coeff_l1());
    for (const auto& [e, c] : phi1.terms())
        if (total_degree(e) <= 2 && std::abs(c) > tol)
            throw PreconditionError("normalize_weight: residual quadratic part did not vanish");
    Poly<cplx> high(a);
    for (const auto& [e, c] : phi1.terms())
        if (total_degree(e) >= 3) high.add_term(e, c);
    w.phi1 = real_part(high);
    w.vol = real_part(voln);
    w.R = raw.R;
    nf.weight = w;

    // Round trip: phi_raw(z) = phi_new(A^{-1} z) + Re psi(z).
    Poly<cplx> back = linear_change(w.phi(), A.inverse()) + real_part(nf.psi);
    Poly<cplx> diff = back - raw.phi;
    nf.roundtrip_error = diff.coeff_l1() / std::max(1.0, raw.phi.coeff_l1());
    if (nf.roundtrip_error > 1e-10) throw PreconditionError("normalize_weight: round-trip reconstruction failed");
    nf.weight.c = nf.weight.coercivity().c;
    return nf;
}

// Re-centre a normalized weight at z0: Taylor shift, isotropic metric vol(z0)^{1/n} I
// (so the new volume density is 1 at the centre), then normalize.
inline NormalForm recenter(const WeightSpec<cplx>& w, const std::vector<cplx>& z0)
{
    RawJet raw;
    raw.n = w.n;
    raw.phi = taylor_shift(w.phi(), z0);
    raw.vol = taylor_shift(w.vol, z0);
    double v0 = raw.vol.constant_term().real();
    require(v0 > 0.0, "recenter: vol must be positive at the new centre");
    raw.metric = std::pow(v0, 1.0 / w.n) * Eigen::MatrixXcd::Identity(w.n, w.n);
    raw.R = w.R;
    return normalize_weight(raw);
}

// f(z0 + A zeta) for an observable written in the old frame.
inline Poly<cplx> transport_observable(const Poly<cplx>& f, const std::vector<cplx>& z0, const Eigen::MatrixXcd& A)
{
    return linear_change(taylor_shift(f, z0), A);
}

} // namespace bkq::cm

#endif
