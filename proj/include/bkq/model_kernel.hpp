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

#ifndef BKQ_MODEL_KERNEL_HPP
#define BKQ_MODEL_KERNEL_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "errors.hpp"
#include "scalar.hpp"

namespace bkq::model {

using CVec = std::vector<cplx>;

struct ModelWeight {
    std::vector<double> lambda;

    int n() const { return static_cast<int>(lambda.size()); }
    bool positive() const
    {
        for (double l : lambda)
            if (!(l > 0.0)) return false;
        return !lambda.empty();
    }
    double c0() const
    {
        double c = 1.0;
        for (double l : lambda) c *= l / M_PI;
        return c;
    }
};

struct FiniteUnitaryGroup {
    std::vector<Eigen::MatrixXcd> elements;
    std::vector<std::vector<int>> table; // table[a][b] = index of elements[a]*elements[b]

    int order() const { return static_cast<int>(elements.size()); }
    int dim() const { return elements.empty() ? 0 : static_cast<int>(elements[0].rows()); }
};

inline void check_point(const ModelWeight& w, const CVec& x)
{
    require(static_cast<int>(x.size()) == w.n(), "model kernel: point dimension mismatch");
}

// B_{phi0}(x,y) = prod(lambda/pi) exp(2 sum lambda (x ybar - |y|^2)).
inline cplx bergman_fock_eval(const ModelWeight& w, const CVec& x, const CVec& y)
{
    if (!w.positive()) throw DegenerateWeightError("bergman_fock_eval: non-positive lambda, kernel is 0");
    check_point(w, x);
    check_point(w, y);
    cplx e = 0.0;
    for (int j = 0; j < w.n(); ++j) e += 2.0 * w.lambda[j] * (x[j] * std::conj(y[j]) - std::norm(y[j]));
    return w.c0() * std::exp(e);
}

// P_{phi0}(x,y) = prod(lambda/pi) exp(sum lambda (2 x ybar - |x|^2 - |y|^2)).
inline cplx conjugated_kernel_eval(const ModelWeight& w, const CVec& x, const CVec& y)
{
    if (!w.positive()) throw DegenerateWeightError("conjugated_kernel_eval: non-positive lambda, kernel is 0");
    check_point(w, x);
    check_point(w, y);
    cplx e = 0.0;
    for (int j = 0; j < w.n(); ++j)
        e += w.lambda[j] * (2.0 * x[j] * std::conj(y[j]) - std::norm(x[j]) - std::norm(y[j]));
    return w.c0() * std::exp(e);
}

inline bool is_unitary(const Eigen::MatrixXcd& g, double tol = 1e-10)
{
    if (g.rows() != g.cols()) return false;
    Eigen::MatrixXcd d = g.adjoint() * g - Eigen::MatrixXcd::Identity(g.rows(), g.cols());
    return d.cwiseAbs().maxCoeff() <= tol;
}

inline FiniteUnitaryGroup group_closure(const std::vector<Eigen::MatrixXcd>& generators, int max_order = 256)
{
    require(!generators.empty(), "group_closure: no generators");
    const int n = static_cast<int>(generators[0].rows());
    for (const auto& g : generators) {
        require(g.rows() == n && g.cols() == n, "group_closure: generator shape mismatch");
        if (!is_unitary(g)) throw PreconditionError("group_closure: non-unitary generator");
    }
    FiniteUnitaryGroup G;
    auto find = [&](const Eigen::MatrixXcd& m) {
        for (int i = 0; i < G.order(); ++i)
            if ((G.elements[i] - m).norm() <= 1e-8) return i;
        return -1;
    };
    G.elements.push_back(Eigen::MatrixXcd::Identity(n, n));
    for (std::size_t i = 0; i < G.elements.size(); ++i) {
        for (const auto& g : generators) {
            Eigen::MatrixXcd m = g * G.elements[i];
            if (find(m) < 0) {
                if (G.order() >= max_order) throw PreconditionError("group_closure: group order exceeds cap");
                G.elements.push_back(m);
            }
        }
    }
    G.table.assign(G.order(), std::vector<int>(G.order(), -1));
    for (int a = 0; a < G.order(); ++a)
        for (int b = 0; b < G.order(); ++b) {
            int c = find(G.elements[a] * G.elements[b]);
            if (c < 0) throw PreconditionError("group_closure: not closed");
            G.table[a][b] = c;
        }
    return G;
}

inline CVec act(const Eigen::MatrixXcd& g, const CVec& y)
{
    CVec r(y.size(), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j) r[i] += g(i, j) * y[j];
    return r;
}

// Sum lambda_j |(g z)_j|^2 = sum lambda_j |z_j|^2 on random points.
inline bool preserves(const FiniteUnitaryGroup& G, const ModelWeight& w, double tol = 1e-10, unsigned seed = 7)
{
    if (G.dim() != w.n()) return false;
    std::mt19937 rng(seed);
    std::normal_distribution<double> N;
    for (int t = 0; t < 8; ++t) {
        CVec z(w.n());
        for (auto& v : z) v = cplx(N(rng), N(rng));
        double base = 0.0;
        for (int j = 0; j < w.n(); ++j) base += w.lambda[j] * std::norm(z[j]);
        for (const auto& g : G.elements) {
            CVec gz = act(g, z);
            double s = 0.0;
            for (int j = 0; j < w.n(); ++j) s += w.lambda[j] * std::norm(gz[j]);
            if (std::abs(s - base) > tol * (1.0 + base)) return false;
        }
    }
    return true;
}

inline void require_invariant(const FiniteUnitaryGroup& G, const ModelWeight& w)
{
    if (!preserves(G, w)) throw InvarianceError("group does not preserve the model weight");
}

// k^n sum_g P_{phi0}(sqrt(k) x, sqrt(k) g y).
inline cplx orbifold_kernel_eval(const ModelWeight& w, const FiniteUnitaryGroup& G, double k, const CVec& x,
                                 const CVec& y)
{
    require_invariant(G, w);
    const double s = std::sqrt(k);
    CVec xs(x), ys;
    for (auto& v : xs) v *= s;
    cplx sum = 0.0;
    for (const auto& g : G.elements) {
        ys = act(g, y);
        for (auto& v : ys) v *= s;
        sum += conjugated_kernel_eval(w, xs, ys);
    }
    return std::pow(k, w.n()) * sum;
}

inline cplx orbifold_toeplitz_leading(const ModelWeight& w, const FiniteUnitaryGroup& G, cplx f_center, double k,
                                      const CVec& x, const CVec& y)
{
    if (f_center == cplx(0.0, 0.0)) {
        require_invariant(G, w);
        return 0.0;
    }
    return f_center * orbifold_kernel_eval(w, G, k, x, y);
}

inline Eigen::MatrixXcd rotation(int n, int axis, int m)
{
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Identity(n, n);
    g(axis, axis) = std::polar(1.0, 2.0 * M_PI / m);
    return g;
}

} // namespace bkq::model

#endif
