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

#ifndef BKQ_WEIGHT_HPP
#define BKQ_WEIGHT_HPP

#include <cmath>
#include <random>
#include <type_traits>
#include <vector>

#include "errors.hpp"
#include "model_kernel.hpp"
#include "poly.hpp"

namespace bkq {

// Normalized local weight phi = sum lambda_j |z_j|^2 + phi1 with volume density vol.
template <class S>
struct WeightSpec {
    int n = 1;
    std::vector<S> lambda;
    Poly<S> phi1;
    Poly<S> vol;
    double R = 1.0;
    double c = 0.0;

    static WeightSpec flat(const std::vector<S>& lambda, double R = 1.0)
    {
        WeightSpec w;
        w.n = static_cast<int>(lambda.size());
        w.lambda = lambda;
        w.phi1 = Poly<S>(Alphabet::wirtinger(w.n));
        w.vol = Poly<S>::constant(Alphabet::wirtinger(w.n), S(1));
        w.R = R;
        return w;
    }

    std::vector<double> lambda_d() const
    {
        std::vector<double> l;
        for (const auto& v : lambda) l.push_back(to_cplx(v).real());
        return l;
    }
    model::ModelWeight model() const { return {lambda_d()}; }
    double c0() const { return model().c0(); }

    Poly<S> phi0() const
    {
        Alphabet a = Alphabet::wirtinger(n);
        Poly<S> p(a);
        for (int j = 0; j < n; ++j) {
            Exponent e(a.nvars(), 0);
            e[a.z(j)] = 1;
            e[a.zbar(j)] = 1;
            p.add_term(e, lambda[j]);
        }
        return p;
    }
    Poly<S> phi() const { return phi0() + phi1; }

    template <class T>
    WeightSpec<T> cast() const
    {
        WeightSpec<T> w;
        w.n = n;
        for (const auto& v : lambda) w.lambda.push_back(from_cplx<T>(to_cplx(v)));
        w.phi1 = phi1.template cast<T>();
        w.vol = vol.template cast<T>();
        w.R = R;
        w.c = c;
        return w;
    }

    // Structural checks shared by every consumer of a normalized weight.
    void validate() const
    {
        Alphabet a = Alphabet::wirtinger(n);
        require(n >= 1 && static_cast<int>(lambda.size()) == n, "WeightSpec: lambda length must equal n");
        require(phi1.alphabet() == a && vol.alphabet() == a, "WeightSpec: phi1/vol must be Wirtinger polys in n variables");
        for (const auto& l : lambda) {
            cplx v = to_cplx(l);
            require(v.imag() == 0.0, "WeightSpec: lambda must be real");
        }
        const double tol = std::is_same_v<S, cplx> ? 1e-12 : 0.0;
        require(is_real_valued(phi1, tol), "WeightSpec: phi1 must be real-valued");
        require(is_real_valued(vol, tol), "WeightSpec: vol must be real-valued");
        require(phi1.is_zero() || phi1.valuation() >= 3, "WeightSpec: phi1 must have valuation >= 3");
        require(vol.constant_term() == S(1), "WeightSpec: vol(0) must equal 1");
    }

    void require_positive() const
    {
        for (double l : lambda_d())
            if (!(l > 0.0)) throw DegenerateWeightError("WeightSpec: lambda must be positive");
    }

    // min over sampled points of the polydisc |z_j| <= R of 2 phi / |z|^2 and min of vol.
    struct Coercivity {
        double c = 0.0;
        double min_vol = 0.0;
    };
    Coercivity coercivity(int samples = 4000, unsigned seed = 11) const
    {
        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        Poly<S> ph = phi();
        Coercivity r{1e300, 1e300};
        for (int t = 0; t < samples; ++t) {
            std::vector<cplx> z(n);
            double r2 = 0.0;
            for (auto& v : z) {
                double rad = R * std::sqrt(U(rng)), ang = 2.0 * M_PI * U(rng);
                if (t < n * 16) rad = R; // boundary samples
                v = std::polar(rad, ang);
                r2 += std::norm(v);
            }
            if (r2 < 1e-12) continue;
            r.c = std::min(r.c, 2.0 * poly_eval(ph, z).real() / r2);
            r.min_vol = std::min(r.min_vol, poly_eval(vol, z).real());
        }
        return r;
    }
};

} // namespace bkq

#endif
