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

#ifndef BKQ_QUADRATURE_HPP
#define BKQ_QUADRATURE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "errors.hpp"

namespace bkq {

struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Golub-Welsch on a symmetric tridiagonal Jacobi matrix with zero diagonal.
inline Rule1D golub_welsch(const std::vector<double>& offdiag, double mu0)
{
    const int n = static_cast<int>(offdiag.size()) + 1;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) J(i, i + 1) = J(i + 1, i) = offdiag[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    Rule1D r;
    for (int i = 0; i < n; ++i) {
        r.nodes.push_back(es.eigenvalues()(i));
        double v0 = es.eigenvectors()(0, i);
        r.weights.push_back(mu0 * v0 * v0);
    }
    return r;
}

// Gauss-Legendre on [a, b].
inline Rule1D gauss_legendre(int n, double a = -1.0, double b = 1.0)
{
    require(n >= 1, "gauss_legendre: n >= 1");
    std::vector<double> off;
    for (int i = 1; i < n; ++i) off.push_back(i / std::sqrt(4.0 * i * i - 1.0));
    Rule1D r = golub_welsch(off, 2.0);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = 0.5 * (b - a) * r.nodes[i] + 0.5 * (b + a);
        r.weights[i] *= 0.5 * (b - a);
    }
    return r;
}

// Composite Gauss-Legendre: `panels` equal panels with n nodes each.
inline Rule1D composite_legendre(int n, int panels, double a, double b)
{
    Rule1D r;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        Rule1D q = gauss_legendre(n, a + p * h, a + (p + 1) * h);
        r.nodes.insert(r.nodes.end(), q.nodes.begin(), q.nodes.end());
        r.weights.insert(r.weights.end(), q.weights.begin(), q.weights.end());
    }
    return r;
}

// Gauss-Hermite for weight exp(-s^2) on the real line.
inline Rule1D gauss_hermite(int n)
{
    require(n >= 1, "gauss_hermite: n >= 1");
    std::vector<double> off;
    for (int i = 1; i < n; ++i) off.push_back(std::sqrt(0.5 * i));
    return golub_welsch(off, std::sqrt(M_PI));
}

// Sum with a fixed pairwise reduction tree; result depends only on the input order.
template <class T>
T pairwise_sum(const std::vector<T>& v, std::size_t lo, std::size_t hi)
{
    require(hi > lo, "pairwise_sum: empty range");
    if (hi - lo <= 8) {
        T s = v[lo];
        for (std::size_t i = lo + 1; i < hi; ++i) s += v[i];
        return s;
    }
    std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

template <class T>
T pairwise_sum(const std::vector<T>& v)
{
    if (v.empty()) return T{};
    return pairwise_sum(v, 0, v.size());
}

} // namespace bkq

#endif
