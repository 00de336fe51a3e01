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

#ifndef BKQ_GAUSSIAN_HPP
#define BKQ_GAUSSIAN_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <vector>

#include "errors.hpp"
#include "poly.hpp"
#include "quadrature.hpp"

namespace bkq::gauss {

// F(x) = value + 1/2 <F''(x - x0), x - x0> in d real variables.
struct QuadraticPhase {
    int dim = 0;
    Eigen::MatrixXcd hessian;
    Eigen::VectorXcd critical_point;
    cplx value_at_critical = 0.0;
};

// Sigma = i (F'')^{-1} / k, the covariance of the normalized Gaussian exp(ikF).
struct GaussianCovariance {
    Eigen::MatrixXcd sigma;
    double k = 1.0;
};

inline void validate(const QuadraticPhase& ph)
{
    const auto& H = ph.hessian;
    require(ph.dim > 0 && H.rows() == ph.dim && H.cols() == ph.dim, "QuadraticPhase: hessian shape");
    const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    require((H - H.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale, "QuadraticPhase: hessian not symmetric");
    Eigen::MatrixXd im = H.imag();
    im = 0.5 * (im + im.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(im);
    if (es.eigenvalues().minCoeff() < -1e-12 * scale)
        throw PreconditionError("QuadraticPhase: Im F'' is not positive semidefinite");
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(H);
    double mn = 1e300, mx = 0.0;
    for (int i = 0; i < ph.dim; ++i) {
        mn = std::min(mn, std::abs(ces.eigenvalues()(i)));
        mx = std::max(mx, std::abs(ces.eigenvalues()(i)));
    }
    if (!(mn > 1e-12 * mx)) throw NondegeneracyError("QuadraticPhase: singular hessian");
}

inline GaussianCovariance covariance(const QuadraticPhase& ph, double k)
{
    validate(ph);
    return {cplx(0.0, 1.0) * ph.hessian.inverse() / k, k};
}

// det(k F'' / 2 pi i)^{-1/2}: product of principal roots over eigenvalues of -i F''.
inline cplx det_prefactor(const QuadraticPhase& ph, double k)
{
    validate(ph);
    Eigen::MatrixXcd A = cplx(0.0, -1.0) * ph.hessian;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(A);
    cplx p = 1.0;
    for (int i = 0; i < ph.dim; ++i) p /= std::sqrt(k * ces.eigenvalues()(i) / (2.0 * M_PI));
    return p;
}

// L_j on monomials via the operator O = 1/2 sum C_ab d_a d_b with C = (F'')^{-1}:
// L_j x^g (x0) = i^j O^j x^g / j!, evaluated at the centre by the recursion
// O^j/j! x^g = (1/j) O^{j-1}/(j-1)! (O x^g). Results are memoized per exponent.
class LjEvaluator {
public:
    explicit LjEvaluator(const QuadraticPhase& ph) : ph_(ph)
    {
        validate(ph);
        C_ = ph.hessian.inverse();
    }

    cplx monomial(const Exponent& g)
    {
        require(static_cast<int>(g.size()) == ph_.dim, "LjEvaluator: exponent length mismatch");
        const int deg = total_degree(g);
        if (deg % 2) return 0.0;
        return std::pow(cplx(0.0, 1.0), deg / 2) * reduced(g);
    }

    template <class S>
    cplx apply(const Poly<S>& u, int j)
    {
        require(u.alphabet().nvars() == ph_.dim, "lj_apply: polynomial variables do not match phase dimension");
        require(u.alphabet().tag == Tag::flat || u.alphabet().tag == Tag::real,
                "lj_apply: real-coordinate polynomial required");
        Poly<S> c = centered(u);
        cplx s = 0.0;
        for (const auto& [e, coef] : c.terms())
            if (total_degree(e) == 2 * j) s += to_cplx(coef) * monomial(e);
        return s;
    }

    template <class S>
    Poly<S> centered(const Poly<S>& u) const
    {
        if (ph_.critical_point.size() == 0 || ph_.critical_point.cwiseAbs().maxCoeff() == 0.0) return u;
        const Alphabet& a = u.alphabet();
        std::vector<Poly<S>> img;
        for (int i = 0; i < ph_.dim; ++i)
            img.push_back(Poly<S>::var(a, i) + Poly<S>::constant(a, from_cplx<S>(ph_.critical_point(i))));
        return u.substitute(img, a);
    }

private:
    cplx reduced(const Exponent& g)
    {
        const int deg = total_degree(g);
        if (deg == 0) return 1.0;
        auto it = memo_.find(g);
        if (it != memo_.end()) return it->second;
        const int j = deg / 2;
        cplx s = 0.0;
        Exponent h = g;
        for (int a = 0; a < ph_.dim; ++a) {
            if (g[a] == 0) continue;
            if (g[a] >= 2) {
                h[a] -= 2;
                s += 0.5 * C_(a, a) * double(g[a] * (g[a] - 1)) * reduced(h);
                h[a] += 2;
            }
            for (int b = a + 1; b < ph_.dim; ++b) {
                if (g[b] == 0) continue;
                h[a] -= 1;
                h[b] -= 1;
                s += C_(a, b) * double(g[a] * g[b]) * reduced(h);
                h[a] += 1;
                h[b] += 1;
            }
        }
        s /= double(j);
        memo_.emplace(g, s);
        return s;
    }

    QuadraticPhase ph_;
    Eigen::MatrixXcd C_;
    std::map<Exponent, cplx> memo_;
};

template <class S>
cplx lj_apply(const QuadraticPhase& ph, const Poly<S>& u, int j)
{
    LjEvaluator ev(ph);
    return ev.apply(u, j);
}

// Isserlis sum over perfect matchings of the labelled factors of x^g.
inline cplx wick_oracle(const GaussianCovariance& cov, const Exponent& g)
{
    std::vector<int> f;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (int q = 0; q < g[i]; ++q) f.push_back(static_cast<int>(i));
    if (f.size() % 2) return 0.0;
    std::vector<char> used(f.size(), 0);
    std::function<cplx()> rec = [&]() -> cplx {
        std::size_t first = 0;
        while (first < f.size() && used[first]) ++first;
        if (first == f.size()) return 1.0;
        used[first] = 1;
        cplx s = 0.0;
        for (std::size_t b = first + 1; b < f.size(); ++b) {
            if (used[b]) continue;
            used[b] = 1;
            s += cov.sigma(f[first], f[b]) * rec();
            used[b] = 0;
        }
        used[first] = 0;
        return s;
    };
    return rec();
}

// Full stationary-phase expansion: e^{ikF(x0)} det(kF''/2pi i)^{-1/2} sum_j k^{-j} L_j u.
// det(kF''/2pi i)^{-1/2} = k^{-d/2} unit_prefactor.
struct PhaseExpansion {
    int dim = 0;
    cplx unit_prefactor = 1.0;
    cplx phase_value = 0.0;
    KSeries<cplx> series;

    cplx evaluate(double k, int upto = -1) const
    {
        return std::exp(cplx(0.0, k) * phase_value) * unit_prefactor * std::pow(k, -0.5 * dim) *
               evaluate_series(series, k, upto);
    }
};

template <class S>
PhaseExpansion quadratic_phase_expand(const QuadraticPhase& ph, const KSeries<Poly<S>>& u, int M)
{
    LjEvaluator ev(ph);
    PhaseExpansion r;
    r.dim = ph.dim;
    r.unit_prefactor = det_prefactor(ph, 1.0);
    r.phase_value = ph.value_at_critical;
    r.series.leading_power = u.leading_power;
    for (int t = 0; t <= M; ++t) {
        cplx c = 0.0;
        for (int m = 0; m <= std::min(t, u.truncation_order()); ++m) c += ev.apply(u.coeffs[m], t - m);
        r.series.coeffs.push_back(c);
    }
    return r;
}

struct QuadSpec {
    int nodes = 24;
    int refine = 8;
};

struct QuadResult {
    cplx value = 0.0;
    double error_estimate = 0.0;
};

namespace detail {

template <class S>
cplx hermite_tensor(const QuadraticPhase& ph, const Poly<S>& u, double k, int N)
{
    const int d = ph.dim;
    Eigen::MatrixXd Q = k * ph.hessian.imag();
    Q = 0.5 * (Q + Q.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(Q);
    if (llt.info() != Eigen::Success) throw PreconditionError("oscillatory_quadrature: Im F'' must be positive definite");
    Eigen::MatrixXd L = llt.matrixL();
    Eigen::MatrixXd LinvT = L.transpose().inverse();
    Eigen::MatrixXd ReH = ph.hessian.real();
    Eigen::VectorXd x0 = ph.critical_point.size() ? Eigen::VectorXd(ph.critical_point.real()) : Eigen::VectorXd::Zero(d);
    Rule1D gh = gauss_hermite(N);
    double total = std::pow(double(N), d);
    if (total > 5e7) throw BudgetError("oscillatory_quadrature: tensor grid too large");
    std::vector<int> idx(d, 0);
    std::vector<cplx> vals;
    vals.reserve(static_cast<std::size_t>(total));
    std::vector<cplx> pt(d);
    const double sq2 = std::sqrt(2.0);
    while (true) {
        Eigen::VectorXd t(d);
        double w = 1.0;
        for (int i = 0; i < d; ++i) {
            t(i) = sq2 * gh.nodes[idx[i]];
            w *= gh.weights[idx[i]];
        }
        Eigen::VectorXd x = LinvT * t;
        double re = 0.5 * k * x.dot(ReH * x);
        for (int i = 0; i < d; ++i) pt[i] = x0(i) + x(i);
        vals.push_back(w * u.evaluate(pt) * std::exp(cplx(0.0, re)));
        int c = 0;
        while (c < d && ++idx[c] == N) idx[c++] = 0;
        if (c == d) break;
    }
    cplx s = pairwise_sum(vals);
    return s * std::pow(2.0, 0.5 * d) / L.determinant() * std::exp(cplx(0.0, k) * ph.value_at_critical);
}

} // namespace detail

// Direct numerical integral of u e^{ikF} over R^d (Lebesgue), tensor Gauss-Hermite
// in coordinates whitening k Im F''.
template <class S>
QuadResult oscillatory_quadrature(const QuadraticPhase& ph, const Poly<S>& u, double k, QuadSpec spec = {})
{
    validate(ph);
    require(u.alphabet().nvars() == ph.dim, "oscillatory_quadrature: dimension mismatch");
    if (ph.critical_point.size() && ph.critical_point.imag().cwiseAbs().maxCoeff() > 0.0)
        throw PreconditionError("oscillatory_quadrature: real critical point required");
    QuadResult r;
    r.value = detail::hermite_tensor(ph, u, k, spec.nodes);
    cplx fine = detail::hermite_tensor(ph, u, k, spec.nodes + spec.refine);
    r.error_estimate = std::abs(fine - r.value);
    r.value = fine;
    return r;
}

// Flat real coordinates of a chain alphabet: slot s, dim j -> x at 2ns+j, y at 2ns+n+j.
template <class S>
Poly<S> chain_to_flat(const Poly<S>& p)
{
    const Alphabet& a = p.alphabet();
    require(a.tag == Tag::chain, "chain_to_flat: chain alphabet required");
    Alphabet f = Alphabet::flat(a.nvars());
    std::vector<Poly<S>> img(a.nvars(), Poly<S>(f));
    for (int s = 0; s < a.slots; ++s)
        for (int j = 0; j < a.n; ++j) {
            int xi = a.w(s, j), yi = a.wbar(s, j);
            img[a.w(s, j)] = Poly<S>::var(f, xi) + Poly<S>::var(f, yi, imag_unit<S>());
            img[a.wbar(s, j)] = Poly<S>::var(f, xi) - Poly<S>::var(f, yi, imag_unit<S>());
        }
    return p.substitute(img, f);
}

// F = 2i sum_j lambda_j (sum_nu |w^nu_j|^2 - sum_{nu<ell} w^nu_j wbar^{nu+1}_j) as a chain poly.
inline Poly<cplx> chain_phase_poly(const std::vector<double>& lambda, int ell)
{
    const int n = static_cast<int>(lambda.size());
    Alphabet a = Alphabet::chain(n, ell);
    Poly<cplx> F(a);
    for (int j = 0; j < n; ++j) {
        const cplx c(0.0, 2.0 * lambda[j]);
        for (int s = 0; s < ell; ++s) {
            Exponent e(a.nvars(), 0);
            e[a.w(s, j)] = 1;
            e[a.wbar(s, j)] = 1;
            F.add_term(e, c);
        }
        for (int s = 0; s + 1 < ell; ++s) {
            Exponent e(a.nvars(), 0);
            e[a.w(s, j)] = 1;
            e[a.wbar(s + 1, j)] = 1;
            F.add_term(e, -c);
        }
    }
    return F;
}

// Constant Hessian of a homogeneous quadratic in flat variables.
template <class S>
Eigen::MatrixXcd hessian_of_quadratic(const Poly<S>& q)
{
    const int d = q.alphabet().nvars();
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) H(a, b) = to_cplx(q.derive(a).derive(b).constant_term());
    return H;
}

inline QuadraticPhase chain_phase(const std::vector<double>& lambda, int ell)
{
    require(!lambda.empty() && ell >= 1, "chain_phase: n >= 1, ell >= 1");
    Poly<cplx> F = chain_to_flat(chain_phase_poly(lambda, ell));
    QuadraticPhase ph;
    ph.dim = F.alphabet().nvars();
    ph.hessian = hessian_of_quadratic(F);
    ph.critical_point = Eigen::VectorXcd::Zero(ph.dim);
    return ph;
}

} // namespace bkq::gauss

#endif
