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

#include "bkq/model_kernel.hpp"
#include "support.hpp"

using namespace bkq;
using namespace bkq::model;

TEST_CASE("Fock kernel closed form", "[model_kernel]")
{
    CHECK(std::abs(bergman_fock_eval({{1.0}}, {0.0}, {0.0}) - 1.0 / M_PI) < 1e-15);
    CHECK(std::abs(bergman_fock_eval({{1.0, 2.0}}, {0.0, 0.0}, {0.0, 0.0}) - 2.0 / (M_PI * M_PI)) < 1e-15);
    CHECK(std::abs(bergman_fock_eval({{1.0}}, {1.0}, {1.0}) - 1.0 / M_PI) < 1e-15);
    CHECK_THROWS_AS(bergman_fock_eval({{-1.0}}, {0.0}, {0.0}), DegenerateWeightError);
    CHECK_THROWS_AS(conjugated_kernel_eval({{0.0}}, {0.0}, {0.0}), DegenerateWeightError);
}

TEST_CASE("conjugated kernel", "[model_kernel]")
{
    ModelWeight w{{1.0, 0.5}};
    for (cplx x : {cplx(0.3, 0.1), cplx(-1.0, 2.0)})
        CHECK(std::abs(conjugated_kernel_eval(w, {x, 2.0 * x}, {x, 2.0 * x}) - w.c0()) < 1e-14);
    CHECK(std::abs(conjugated_kernel_eval({{1.0}}, {0.0}, {1.0}) - std::exp(-1.0) / M_PI) < 1e-15);
    std::mt19937 rng(1);
    std::normal_distribution<double> g;
    for (int t = 0; t < 10; ++t) {
        std::vector<cplx> x{{g(rng), g(rng)}, {g(rng), g(rng)}}, y{{g(rng), g(rng)}, {g(rng), g(rng)}};
        cplx a = conjugated_kernel_eval(w, x, y), b = conjugated_kernel_eval(w, y, x);
        CHECK(std::abs(a - std::conj(b)) <= 1e-14 * std::abs(a));
        CHECK(std::abs(a) <= std::sqrt(conjugated_kernel_eval(w, x, x).real() * conjugated_kernel_eval(w, y, y).real()) * (1 + 1e-14));
    }
}

TEST_CASE("reproducing property by quadrature", "[model_kernel]")
{
    ModelWeight w1{{1.0}};
    std::vector<cplx> x{cplx(0.4, -0.3)};
    for (const auto& a : testing::holomorphic_exponents(1, 4)) {
        cplx v = testing::reproduce_monomial(w1, x, a);
        cplx q = testing::monomial_value(x, a);
        CHECK(std::abs(v - q) <= 1e-6 * std::abs(q));
    }
    ModelWeight w2{{1.0, 2.0}};
    std::vector<cplx> x2{cplx(0.2, 0.1), cplx(-0.3, 0.25)};
    for (const auto& a : testing::holomorphic_exponents(2, 2)) {
        cplx v = testing::reproduce_monomial(w2, x2, a, 64, 24);
        cplx q = testing::monomial_value(x2, a);
        CHECK(std::abs(v - q) <= 1e-6 * std::abs(q));
    }
}

TEST_CASE("group closure", "[model_kernel]")
{
    auto G = group_closure({-Eigen::MatrixXcd::Identity(1, 1)});
    CHECK(G.order() == 2);
    G = group_closure({rotation(1, 0, 3)});
    CHECK(G.order() == 3);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            CHECK((G.elements[a] * G.elements[b] - G.elements[G.table[a][b]]).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::MatrixXcd swap(2, 2);
    swap << 0, 1, 1, 0;
    auto S = group_closure({swap});
    CHECK(S.order() == 2);
    CHECK(preserves(S, {{1.0, 1.0}}));
    CHECK_FALSE(preserves(S, {{1.0, 2.0}}));
    CHECK_THROWS_AS(require_invariant(S, {{1.0, 2.0}}), InvarianceError);
    Eigen::MatrixXcd bad(1, 1);
    bad << 2.0;
    CHECK_THROWS_AS(group_closure({bad}), PreconditionError);
    Eigen::MatrixXcd irr(1, 1);
    irr << std::polar(1.0, 1.0);
    CHECK_THROWS_AS(group_closure({irr}, 64), PreconditionError);
}

TEST_CASE("orbifold kernel", "[model_kernel]")
{
    ModelWeight w{{1.0}};
    auto I = group_closure({Eigen::MatrixXcd::Identity(1, 1)});
    cplx x = cplx(0.3, 0.2), y = cplx(-0.1, 0.4);
    CHECK(std::abs(orbifold_kernel_eval(w, I, 4.0, {x}, {y}) - 4.0 * conjugated_kernel_eval(w, {2.0 * x}, {2.0 * y})) < 1e-14);
    auto Z2 = group_closure({-Eigen::MatrixXcd::Identity(1, 1)});
    CHECK(std::abs(orbifold_kernel_eval(w, Z2, 1.0, {0.0}, {0.0}) - 2.0 / M_PI) < 1e-15);
    auto Z3 = group_closure({rotation(1, 0, 3)});
    for (const auto& g : Z3.elements) {
        auto gy = act(g, {y});
        CHECK(std::abs(orbifold_kernel_eval(w, Z3, 3.0, {x}, gy) - orbifold_kernel_eval(w, Z3, 3.0, {x}, {y})) < 1e-12);
    }
    cplx d = orbifold_kernel_eval(w, Z3, 3.0, {x}, {x});
    CHECK(std::abs(d.imag()) < 1e-14);
    CHECK(d.real() > 0.0);
}

TEST_CASE("orbifold Toeplitz leading term", "[model_kernel]")
{
    ModelWeight w{{1.0, 2.0}};
    auto I = group_closure({Eigen::MatrixXcd::Identity(2, 2)});
    std::vector<cplx> z{0.1, -0.2};
    CHECK(orbifold_toeplitz_leading(w, I, 0.0, 5.0, z, z) == cplx(0.0));
    CHECK(std::abs(orbifold_toeplitz_leading(w, I, 1.0, 5.0, z, z) - orbifold_kernel_eval(w, I, 5.0, z, z)) < 1e-14);
    CHECK(std::abs(orbifold_toeplitz_leading(w, I, 2.0, 5.0, z, z) - 2.0 * 25.0 * w.c0()) < 1e-12);
}
