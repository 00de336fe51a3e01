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

#ifndef BKQ_ORACLE_HPP
#define BKQ_ORACLE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>
#include <vector>

#include "chern_moser.hpp"
#include "errors.hpp"
#include "model_kernel.hpp"
#include "poly.hpp"
#include "quadrature.hpp"
#include "weight.hpp"

namespace bkq::oracle {

using CVec = std::vector<cplx>;

struct QuadSpec {
    int nodes_per_panel = 16;
    int panels = 0;        // 0: chosen from k, c and the degree
    int angular = 0;       // 0: max(4D+4, 32)
    double cut = 90.0;     // radial cut where t^D e^{-t} has decayed below e^{-cut}
    bool check_doubling = true;
    int threads = 1;
    std::size_t chunk = 4096;
};

struct Diagnostics {
    double min_eigenvalue = 0.0;
    double condition_number = 0.0;
    double doubling_delta = -1.0;
    double coercivity = 0.0;
    std::size_t nodes = 0;
};

struct GramOracle {
    WeightSpec<cplx> weight;
    double k = 1.0;
    int D = 0;
    std::vector<Exponent> basis;   // holomorphic exponents alpha, |alpha| <= D
    std::vector<double> scale;     // Gaussian norms used to scale z^alpha
    Eigen::MatrixXcd projection;   // columns: basis functions in scaled monomial coordinates
    Eigen::MatrixXcd gram;         // Gram of the basis functions (G_ij = <b_i, b_j>)
    Eigen::MatrixXcd gram_inverse;
    Eigen::MatrixXcd chol_inv;     // C = L^{-1}, G = L L^*
    double measure_factor = 1.0;
    Diagnostics diag;
    std::vector<cplx> pts;         // node coordinates, row-major nodes x n
    std::vector<double> w;         // node weights incl. e^{-2k phi} vol and the d-lambda factor
    QuadSpec quad;

    int n() const { return weight.n; }
    std::size_t node_count() const { return w.size(); }

    Eigen::VectorXcd monomials(const CVec& z) const
    {
        Eigen::VectorXcd e(basis.size());
        for (std::size_t a = 0; a < basis.size(); ++a) {
            cplx m = 1.0 / scale[a];
            for (int j = 0; j < n(); ++j)
                for (int q = 0; q < basis[a][j]; ++q) m *= z[j];
            e(a) = m;
        }
        return e;
    }
    Eigen::VectorXcd functions(const CVec& z) const { return projection.transpose() * monomials(z); }
    double phi(const CVec& z) const { return poly_eval(weight.phi(), z).real(); }
};

inline std::vector<Exponent> exponents_upto(int n, int D)
{
    std::vector<Exponent> out;
    Exponent e(n, 0);
    std::function<void(int, int)> rec = [&](int j, int left) {
        if (j == n) {
            out.push_back(e);
            return;
        }
        for (int q = 0; q <= left; ++q) {
            e[j] = static_cast<std::uint8_t>(q);
            rec(j + 1, left - q);
        }
        e[j] = 0;
    };
    rec(0, D);
    std::stable_sort(out.begin(), out.end(), GradedLess());
    return out;
}

namespace detail {

inline double factorial(int m)
{
    double f = 1.0;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
}

struct AxisRule {
    std::vector<cplx> z;
    std::vector<double> w;
};

inline AxisRule axis_rule(double R, double k, double c, int D, const QuadSpec& q, int mult)
{
    double rcut = R;
    if (c > 0.0) rcut = std::min(R, std::sqrt((2.0 * D + q.cut) / (k * c)));
    int panels = q.panels > 0 ? q.panels : static_cast<int>(std::ceil(rcut * std::sqrt(k * std::max(c, 1e-3)))) + 2;
    int ang = q.angular > 0 ? q.angular : std::max(4 * D + 4, 32);
    Rule1D rad = composite_legendre(q.nodes_per_panel, panels * mult, 0.0, rcut);
    ang *= mult;
    AxisRule r;
    for (std::size_t i = 0; i < rad.nodes.size(); ++i)
        for (int t = 0; t < ang; ++t) {
            double th = 2.0 * M_PI * (t + 0.5) / ang;
            r.z.push_back(std::polar(rad.nodes[i], th));
            // d-lambda = 2 dx dy = 2 r dr dtheta
            r.w.push_back(2.0 * rad.weights[i] * rad.nodes[i] * 2.0 * M_PI / ang);
        }
    return r;
}

inline void build_nodes(GramOracle& o, int mult)
{
    const int n = o.n();
    double c = o.diag.coercivity;
    std::vector<AxisRule> axes;
    for (int j = 0; j < n; ++j) axes.push_back(axis_rule(o.weight.R, o.k, c, o.D, o.quad, mult));
    std::size_t total = 1;
    for (const auto& a : axes) total *= a.z.size();
    if (total > 200000000ull) throw BudgetError("oracle: quadrature grid too large");
    o.pts.assign(total * n, 0.0);
    o.w.assign(total, 0.0);
    Poly<cplx> ph = o.weight.phi();
    std::vector<std::size_t> idx(n, 0);
    CVec z(n);
    for (std::size_t i = 0; i < total; ++i) {
        double wt = 1.0;
        for (int j = 0; j < n; ++j) {
            z[j] = axes[j].z[idx[j]];
            wt *= axes[j].w[idx[j]];
            o.pts[i * n + j] = z[j];
        }
        double v = poly_eval(o.weight.vol, z).real();
        o.w[i] = wt * std::exp(-2.0 * o.k * poly_eval(ph, z).real()) * v;
        for (int j = n - 1; j >= 0; --j) {
            if (++idx[j] < axes[j].z.size()) break;
            idx[j] = 0;
        }
    }
}

} // namespace detail

// M_{ab} = sum_i w_i A_{ia} conj(E_{ib}) with E the basis values and A = row(i) supplied by the
// caller (defaults to E). Chunks of fixed size are reduced pairwise, so the result does not
// depend on the thread count.
using RowFn = std::function<void(std::size_t node, const Eigen::VectorXcd& e, Eigen::VectorXcd& a)>;

inline Eigen::MatrixXcd assemble(const GramOracle& o, const RowFn& row = nullptr, bool raw_monomials = false)
{
    const std::size_t N = o.node_count();
    const int nb = raw_monomials ? static_cast<int>(o.basis.size()) : static_cast<int>(o.projection.cols());
    const std::size_t chunk = std::max<std::size_t>(1, o.quad.chunk);
    const std::size_t nchunks = (N + chunk - 1) / chunk;
    std::vector<Eigen::MatrixXcd> parts(nchunks, Eigen::MatrixXcd::Zero(nb, nb));
    auto work = [&](std::size_t c0, std::size_t step) {
        CVec z(o.n());
        for (std::size_t c = c0; c < nchunks; c += step) {
            std::size_t lo = c * chunk, hi = std::min(N, lo + chunk);
            Eigen::MatrixXcd E(hi - lo, nb), A(hi - lo, nb);
            Eigen::VectorXcd a(nb);
            for (std::size_t i = lo; i < hi; ++i) {
                for (int j = 0; j < o.n(); ++j) z[j] = o.pts[i * o.n() + j];
                Eigen::VectorXcd e = raw_monomials ? o.monomials(z) : o.functions(z);
                if (row) row(i, e, a);
                else a = e;
                double sw = o.w[i];
                E.row(i - lo) = e.transpose();
                A.row(i - lo) = sw * a.transpose();
            }
            parts[c] = A.transpose() * E.conjugate();
        }
    };
    int T = std::max(1, o.quad.threads);
    if (T == 1 || nchunks == 1) work(0, 1);
    else {
        std::vector<std::thread> pool;
        for (int t = 0; t < T; ++t) pool.emplace_back(work, t, T);
        for (auto& th : pool) th.join();
    }
    if (parts.empty()) return Eigen::MatrixXcd::Zero(nb, nb);
    return pairwise_sum(parts);
}

inline void factorize(GramOracle& o)
{
    Eigen::MatrixXcd G = 0.5 * (o.gram + o.gram.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G);
    o.diag.min_eigenvalue = es.eigenvalues().minCoeff();
    o.diag.condition_number = es.eigenvalues().maxCoeff() / std::max(o.diag.min_eigenvalue, 1e-300);
    if (!(o.diag.min_eigenvalue > 0.0)) throw ConditioningError("oracle: Gram matrix not positive definite");
    if (o.diag.condition_number > 1e13) throw ConditioningError("oracle: Gram matrix ill-conditioned");
    Eigen::LLT<Eigen::MatrixXcd> llt(G);
    if (llt.info() != Eigen::Success) throw ConditioningError("oracle: Cholesky failed");
    Eigen::MatrixXcd L = llt.matrixL();
    o.chol_inv = L.inverse();
    o.gram_inverse = o.chol_inv.adjoint() * o.chol_inv;
}

inline GramOracle prepare(const WeightSpec<cplx>& weight, double k, int D, const QuadSpec& q)
{
    weight.validate();
    weight.require_positive();
    require(k > 0.0 && D >= 0, "build_gram: k > 0 and D >= 0 required");
    GramOracle o;
    o.weight = weight;
    o.k = k;
    o.D = D;
    o.quad = q;
    o.diag.coercivity = weight.coercivity().c;
    if (!(o.diag.coercivity > 0.0)) throw PreconditionError("build_gram: weight not coercive on its ball");
    o.basis = exponents_upto(weight.n, D);
    auto lam = weight.lambda_d();
    for (const auto& a : o.basis) {
        double s2 = 1.0;
        for (int j = 0; j < weight.n; ++j)
            s2 *= 2.0 * M_PI * detail::factorial(a[j]) / std::pow(2.0 * k * lam[j], a[j] + 1);
        o.scale.push_back(std::sqrt(s2));
    }
    o.projection = Eigen::MatrixXcd::Identity(o.basis.size(), o.basis.size());
    return o;
}

inline void finish(GramOracle& o)
{
    detail::build_nodes(o, 1);
    o.diag.nodes = o.node_count();
    o.gram = assemble(o);
    if (o.quad.check_doubling) {
        GramOracle fine = o;
        detail::build_nodes(fine, 2);
        Eigen::MatrixXcd G2 = assemble(fine);
        o.diag.doubling_delta = (G2 - o.gram).cwiseAbs().maxCoeff() / o.gram.cwiseAbs().maxCoeff();
    }
    factorize(o);
}

inline GramOracle build_gram(const WeightSpec<cplx>& weight, double k, int D, const QuadSpec& q = {})
{
    GramOracle o = prepare(weight, k, D, q);
    finish(o);
    return o;
}

// Raw Gram entry G_{alpha beta} = int z^alpha zbar^beta e^{-2k phi} vol d-lambda (full monomial basis only).
inline cplx gram_raw(const GramOracle& o, std::size_t a, std::size_t b)
{
    return o.gram(a, b) * o.scale[a] * o.scale[b];
}

// B(x,y) = sum (G^{-1})_{ba} b_a(x) conj(b_b(y)), times the orbifold measure factor.
inline cplx bergman_numeric(const GramOracle& o, const CVec& x, const CVec& y)
{
    require(static_cast<int>(x.size()) == o.n() && static_cast<int>(y.size()) == o.n(), "bergman_numeric: dimension");
    Eigen::VectorXcd a = o.functions(x), b = o.functions(y);
    return o.measure_factor * b.dot(o.gram_inverse * a);
}

inline cplx localized_numeric(const GramOracle& o, const CVec& x, const CVec& y)
{
    return std::exp(-o.k * (o.phi(x) + o.phi(y))) * bergman_numeric(o, x, y);
}

inline cplx scaled_bergman_numeric(const GramOracle& o, const CVec& x, const CVec& y)
{
    const double s = 1.0 / std::sqrt(o.k);
    CVec xs(x), ys(y);
    for (auto& v : xs) v *= s;
    for (auto& v : ys) v *= s;
    return std::pow(o.k, -o.n()) * localized_numeric(o, xs, ys);
}

struct ToeplitzMatrix {
    Eigen::MatrixXcd T; // T_ij = <f e_j, e_i> in the orthonormalized basis
    double norm = 0.0;
};

inline ToeplitzMatrix toeplitz_from_moments(const GramOracle& o, const Eigen::MatrixXcd& M)
{
    ToeplitzMatrix r;
    r.T = (o.chol_inv * M * o.chol_inv.adjoint()).transpose();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(r.T);
    r.norm = svd.singularValues()(0);
    return r;
}

template <class S>
ToeplitzMatrix toeplitz_numeric(const GramOracle& o, const Poly<S>& f)
{
    require(f.alphabet() == Alphabet::wirtinger(o.n()), "toeplitz_numeric: f must be a Wirtinger poly in n variables");
    Poly<cplx> fc = f.template cast<cplx>();
    Eigen::MatrixXcd M = assemble(o, [&](std::size_t i, const Eigen::VectorXcd& e, Eigen::VectorXcd& a) {
        CVec z(o.pts.begin() + i * o.n(), o.pts.begin() + (i + 1) * o.n());
        a = poly_eval(fc, z) * e;
    });
    return toeplitz_from_moments(o, M);
}

// Localized kernel of an operator given by its matrix in the orthonormalized basis.
inline cplx operator_kernel(const GramOracle& o, const Eigen::MatrixXcd& T, const CVec& x, const CVec& y)
{
    Eigen::VectorXcd ex = o.chol_inv * o.functions(x), ey = o.chol_inv * o.functions(y);
    cplx v = ex.transpose() * T * ey.conjugate();
    return o.measure_factor * std::exp(-o.k * (o.phi(x) + o.phi(y))) * v;
}

// Symbol p(x, y, theta) with left quantization, theta -> D = -i d; requires vol = 1.
// <P~ b_a, b_b> = int [p(z,D)(e^{-k phi} b_a)] conj(e^{-k phi} b_b) d-lambda.
template <class S>
ToeplitzMatrix psdo_toeplitz_numeric(const GramOracle& o, const Poly<S>& symbol)
{
    const int n = o.n();
    require(symbol.alphabet() == Alphabet::symbol(n), "psdo_toeplitz_numeric: symbol alphabet required");
    require(o.weight.vol == Poly<cplx>::constant(Alphabet::wirtinger(n), 1.0), "psdo_toeplitz_numeric: vol must be 1");
    const Alphabet ra = Alphabet::real(n);
    Poly<cplx> p = symbol.template cast<cplx>();
    Poly<cplx> phr = to_real(o.weight.phi());
    const cplx I(0.0, 1.0);
    // D_a + i k d_a phi acting on real polys.
    auto step = [&](const Poly<cplx>& g, int var) {
        return g.derive(var).scaled(-I) + mul_truncated(phr.derive(var).scaled(I * o.k), g, -1);
    };
    // Group the symbol by theta exponent.
    std::map<Exponent, Poly<cplx>> by_theta;
    for (const auto& [e, c] : p.terms()) {
        Exponent th(e.begin() + 2 * n, e.end()), xy(2 * n, 0);
        std::copy(e.begin(), e.begin() + 2 * n, xy.begin());
        auto it = by_theta.emplace(th, Poly<cplx>(ra)).first;
        it->second.add_term(xy, c);
    }
    // Applied polynomials per raw monomial alpha.
    const std::size_t nb = o.basis.size();
    std::vector<Poly<cplx>> applied;
    for (std::size_t a = 0; a < nb; ++a) {
        Poly<cplx> zm = Poly<cplx>::constant(Alphabet::wirtinger(n), 1.0 / o.scale[a]);
        for (int j = 0; j < n; ++j)
            for (int q = 0; q < o.basis[a][j]; ++q) zm = zm * Poly<cplx>::var(Alphabet::wirtinger(n), j);
        Poly<cplx> base = to_real(zm);
        Poly<cplx> acc(ra);
        for (const auto& [th, coef] : by_theta) {
            Poly<cplx> g = base;
            for (int j = 0; j < n; ++j) {
                for (int q = 0; q < th[j]; ++q) g = step(g, ra.x(j));
                for (int q = 0; q < th[n + j]; ++q) g = step(g, ra.y(j));
            }
            acc += coef * g;
        }
        applied.push_back(acc);
    }
    // flattened terms and per-node power tables
    int maxdeg = 0;
    std::vector<std::vector<std::pair<Exponent, cplx>>> flat(nb);
    for (std::size_t a = 0; a < nb; ++a)
        for (const auto& [e, c] : applied[a].terms()) {
            flat[a].emplace_back(e, c);
            for (auto x : e) maxdeg = std::max(maxdeg, static_cast<int>(x));
        }
    Eigen::MatrixXcd M = assemble(o, [&](std::size_t i, const Eigen::VectorXcd&, Eigen::VectorXcd& row) {
        Eigen::MatrixXd pw(2 * n, maxdeg + 1);
        for (int j = 0; j < n; ++j) {
            cplx z = o.pts[i * n + j];
            pw(j, 0) = pw(n + j, 0) = 1.0;
            for (int d = 1; d <= maxdeg; ++d) {
                pw(j, d) = pw(j, d - 1) * z.real();
                pw(n + j, d) = pw(n + j, d - 1) * z.imag();
            }
        }
        Eigen::VectorXcd raw(nb);
        for (std::size_t a = 0; a < nb; ++a) {
            cplx s = 0.0;
            for (const auto& [e, c] : flat[a]) {
                double m = 1.0;
                for (int v = 0; v < 2 * n; ++v) m *= pw(v, e[v]);
                s += c * m;
            }
            raw(a) = s;
        }
        row = o.projection.transpose() * raw;
    });
    return toeplitz_from_moments(o, M);
}

// Checks phi1, vol and phi0 invariance under every group element.
inline void require_weight_invariant(const WeightSpec<cplx>& w, const model::FiniteUnitaryGroup& G)
{
    model::require_invariant(G, w.model());
    for (const auto& g : G.elements) {
        double e1 = (cm::linear_change(w.phi1, g) - w.phi1).coeff_l1();
        double e2 = (cm::linear_change(w.vol, g) - w.vol).coeff_l1();
        if (e1 > 1e-10 * (1.0 + w.phi1.coeff_l1()) || e2 > 1e-10 * (1.0 + w.vol.coeff_l1()))
            throw InvarianceError("invariant_gram: weight is not invariant under the group");
    }
}

// Gram oracle on the G-invariant polynomials: Reynolds averages of monomials, pruned and
// re-orthonormalized per degree; kernel multiplied by |G| (quotient measure convention).
inline GramOracle invariant_gram(const WeightSpec<cplx>& weight, double k, int D, const model::FiniteUnitaryGroup& G,
                                 const QuadSpec& q = {})
{
    require(G.dim() == weight.n, "invariant_gram: group dimension mismatch");
    require_weight_invariant(weight, G);
    GramOracle o = prepare(weight, k, D, q);
    const int n = weight.n;
    const Alphabet a = Alphabet::wirtinger(n);
    std::vector<Eigen::VectorXcd> cols;
    for (int d = 0; d <= D; ++d) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < o.basis.size(); ++i)
            if (total_degree(o.basis[i]) == d) idx.push_back(i);
        Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(o.basis.size(), idx.size());
        for (std::size_t c = 0; c < idx.size(); ++c) {
            Exponent e(a.nvars(), 0);
            for (int j = 0; j < n; ++j) e[j] = o.basis[idx[c]][j];
            Poly<cplx> m = Poly<cplx>::monomial(a, e);
            Poly<cplx> avg(a);
            for (const auto& g : G.elements) avg += cm::linear_change(m, g);
            avg = avg.scaled(1.0 / G.order());
            for (const auto& [f, cf] : avg.terms()) {
                Exponent hol(f.begin(), f.begin() + n);
                auto it = std::find(o.basis.begin(), o.basis.end(), hol);
                std::size_t r = static_cast<std::size_t>(it - o.basis.begin());
                V(r, c) += cf * o.scale[r];
            }
        }
        if (idx.empty()) continue;
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(V, Eigen::ComputeThinU);
        const auto& sv = svd.singularValues();
        for (int i = 0; i < sv.size(); ++i)
            if (sv(i) > 1e-10 * std::max(1.0, sv(0))) cols.push_back(svd.matrixU().col(i));
    }
    require(!cols.empty(), "invariant_gram: no invariant polynomials up to degree D");
    o.projection.resize(o.basis.size(), cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) o.projection.col(c) = cols[c];
    o.measure_factor = G.order();
    finish(o);
    return o;
}

} // namespace bkq::oracle

#endif
