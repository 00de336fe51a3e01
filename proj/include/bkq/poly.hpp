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

#ifndef BKQ_POLY_HPP
#define BKQ_POLY_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "scalar.hpp"

namespace bkq {

using Exponent = std::vector<std::uint8_t>;

inline int total_degree(const Exponent& e)
{
    int d = 0;
    for (auto v : e) d += v;
    return d;
}

// Graded lexicographic: total degree first, then exponent vectors.
struct GradedLess {
    bool operator()(const Exponent& a, const Exponent& b) const
    {
        int da = total_degree(a), db = total_degree(b);
        if (da != db) return da < db;
        return a < b;
    }
};

enum class Tag : int { wirtinger, real, symbol, chain, flat };

// Variable layout of a polynomial ring.
//   wirtinger: z_1..z_n, zbar_1..zbar_n
//   real:      x_1..x_n, y_1..y_n
//   symbol:    x, y, theta1, theta2 (n each)
//   chain:     per slot s: w^s_1..w^s_n, wbar^s_1..wbar^s_n
//   flat:      d anonymous real variables
struct Alphabet {
    Tag tag = Tag::wirtinger;
    int n = 1;
    int slots = 1;

    static Alphabet wirtinger(int n) { return {Tag::wirtinger, n, 1}; }
    static Alphabet real(int n) { return {Tag::real, n, 1}; }
    static Alphabet symbol(int n) { return {Tag::symbol, n, 1}; }
    static Alphabet chain(int n, int slots) { return {Tag::chain, n, slots}; }
    static Alphabet flat(int d) { return {Tag::flat, d, 1}; }

    int nvars() const
    {
        switch (tag) {
        case Tag::wirtinger:
        case Tag::real: return 2 * n;
        case Tag::symbol: return 4 * n;
        case Tag::chain: return 2 * n * slots;
        case Tag::flat: return n;
        }
        return 0;
    }

    int z(int j) const { return j; }
    int zbar(int j) const { return n + j; }
    int x(int j) const { return j; }
    int y(int j) const { return n + j; }
    int t1(int j) const { return 2 * n + j; }
    int t2(int j) const { return 3 * n + j; }
    int w(int s, int j) const { return 2 * n * s + j; }
    int wbar(int s, int j) const { return 2 * n * s + n + j; }

    std::string name() const
    {
        switch (tag) {
        case Tag::wirtinger: return "wirtinger(" + std::to_string(n) + ")";
        case Tag::real: return "real(" + std::to_string(n) + ")";
        case Tag::symbol: return "symbol(" + std::to_string(n) + ")";
        case Tag::chain: return "chain(" + std::to_string(n) + "," + std::to_string(slots) + ")";
        case Tag::flat: return "flat(" + std::to_string(n) + ")";
        }
        return "?";
    }

    friend bool operator==(const Alphabet& a, const Alphabet& b)
    {
        return a.tag == b.tag && a.n == b.n && (a.tag != Tag::chain || a.slots == b.slots);
    }
    friend bool operator!=(const Alphabet& a, const Alphabet& b) { return !(a == b); }
};

template <class S>
class Poly {
public:
    using scalar_type = S;
    using Terms = std::map<Exponent, S, GradedLess>;

    Poly() = default;
    explicit Poly(Alphabet a) : alpha_(a) {}

    static Poly constant(Alphabet a, const S& c)
    {
        Poly p(a);
        p.add_term(Exponent(a.nvars(), 0), c);
        return p;
    }
    static Poly var(Alphabet a, int idx, const S& c = S(1))
    {
        Poly p(a);
        Exponent e(a.nvars(), 0);
        e.at(idx) = 1;
        p.add_term(e, c);
        return p;
    }
    static Poly monomial(Alphabet a, Exponent e, const S& c = S(1))
    {
        require(static_cast<int>(e.size()) == a.nvars(), "monomial: exponent length mismatch");
        Poly p(a);
        p.add_term(e, c);
        return p;
    }

    const Alphabet& alphabet() const { return alpha_; }
    const Terms& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    void add_term(const Exponent& e, const S& c)
    {
        if (is_zero_s(c)) return;
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            terms_.emplace(e, c);
            return;
        }
        it->second += c;
        if (is_zero_s(it->second)) terms_.erase(it);
    }

    S coeff(const Exponent& e) const
    {
        auto it = terms_.find(e);
        return it == terms_.end() ? S(0) : it->second;
    }
    S constant_term() const { return coeff(Exponent(alpha_.nvars(), 0)); }

    int degree() const { return terms_.empty() ? -1 : total_degree(terms_.rbegin()->first); }
    int valuation() const { return terms_.empty() ? -1 : total_degree(terms_.begin()->first); }

    Poly& operator+=(const Poly& o)
    {
        same(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    Poly& operator-=(const Poly& o)
    {
        same(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator-(const Poly& a) { return a.scaled(S(-1)); }
    friend Poly operator*(const Poly& a, const Poly& b) { return mul_truncated(a, b, -1); }
    friend Poly operator*(const S& s, const Poly& a) { return a.scaled(s); }
    Poly& operator*=(const Poly& o) { return *this = mul_truncated(*this, o, -1); }

    Poly scaled(const S& s) const
    {
        Poly r(alpha_);
        if (is_zero_s(s)) return r;
        for (const auto& [e, c] : terms_) r.terms_.emplace_hint(r.terms_.end(), e, c * s);
        return r;
    }

    // Product keeping only total degree <= max_degree (max_degree < 0: no limit).
    friend Poly mul_truncated(const Poly& a, const Poly& b, int max_degree)
    {
        a.same(b);
        Poly r(a.alpha_);
        const int nv = a.alpha_.nvars();
        Exponent e(nv);
        for (const auto& [ea, ca] : a.terms_) {
            int da = total_degree(ea);
            if (max_degree >= 0 && da > max_degree) break;
            for (const auto& [eb, cb] : b.terms_) {
                if (max_degree >= 0 && da + total_degree(eb) > max_degree) break;
                for (int i = 0; i < nv; ++i) e[i] = static_cast<std::uint8_t>(ea[i] + eb[i]);
                r.add_term(e, ca * cb);
            }
        }
        return r;
    }

    Poly truncated(int max_degree) const
    {
        Poly r(alpha_);
        for (const auto& [e, c] : terms_) {
            if (total_degree(e) > max_degree) break;
            r.terms_.emplace_hint(r.terms_.end(), e, c);
        }
        return r;
    }
    Poly homogeneous(int d) const
    {
        Poly r(alpha_);
        for (const auto& [e, c] : terms_)
            if (total_degree(e) == d) r.terms_.emplace_hint(r.terms_.end(), e, c);
        return r;
    }

    // Formal partial derivative in variable idx.
    Poly derive(int idx) const
    {
        require(idx >= 0 && idx < alpha_.nvars(), "derive: variable index out of range");
        Poly r(alpha_);
        for (const auto& [e, c] : terms_) {
            if (e[idx] == 0) continue;
            Exponent f = e;
            f[idx] -= 1;
            r.add_term(f, c * S(static_cast<long>(e[idx])));
        }
        return r;
    }

    cplx evaluate(const std::vector<cplx>& v) const
    {
        require(static_cast<int>(v.size()) == alpha_.nvars(), "evaluate: point length mismatch");
        cplx s = 0.0;
        for (const auto& [e, c] : terms_) {
            cplx m = to_cplx(c);
            for (std::size_t i = 0; i < e.size(); ++i)
                for (int q = 0; q < e[i]; ++q) m *= v[i];
            s += m;
        }
        return s;
    }

    S evaluate_exact(const std::vector<S>& v) const
    {
        require(static_cast<int>(v.size()) == alpha_.nvars(), "evaluate: point length mismatch");
        S s(0);
        for (const auto& [e, c] : terms_) {
            S m = c;
            for (std::size_t i = 0; i < e.size(); ++i)
                for (int q = 0; q < e[i]; ++q) m *= v[i];
            s += m;
        }
        return s;
    }

    // Rename variables: variable i becomes var_map[i] of target; var_map[i] < 0 means
    // the variable is set to 0.
    Poly remap(Alphabet target, const std::vector<int>& var_map) const
    {
        require(static_cast<int>(var_map.size()) == alpha_.nvars(), "remap: map length mismatch");
        Poly r(target);
        Exponent f(target.nvars());
        for (const auto& [e, c] : terms_) {
            std::fill(f.begin(), f.end(), 0);
            bool drop = false;
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (e[i] == 0) continue;
                if (var_map[i] < 0) {
                    drop = true;
                    break;
                }
                f[var_map[i]] = static_cast<std::uint8_t>(f[var_map[i]] + e[i]);
            }
            if (!drop) r.add_term(f, c);
        }
        return r;
    }

    // Replace variable i by images[i] (all in one target alphabet).
    Poly substitute(const std::vector<Poly>& images, Alphabet target, int max_degree = -1) const
    {
        require(static_cast<int>(images.size()) == alpha_.nvars(), "substitute: image count mismatch");
        for (const auto& im : images) require(im.alpha_ == target, "substitute: image alphabet mismatch");
        std::vector<std::vector<Poly>> powers(images.size());
        auto power = [&](std::size_t i, int q) -> const Poly& {
            auto& pw = powers[i];
            if (pw.empty()) pw.push_back(Poly::constant(target, S(1)));
            while (static_cast<int>(pw.size()) <= q) pw.push_back(mul_truncated(pw.back(), images[i], max_degree));
            return pw[q];
        };
        Poly r(target);
        for (const auto& [e, c] : terms_) {
            Poly m = Poly::constant(target, c);
            for (std::size_t i = 0; i < e.size(); ++i)
                if (e[i] > 0) m = mul_truncated(m, power(i, e[i]), max_degree);
            r += m;
        }
        return r;
    }

    template <class T>
    Poly<T> cast() const
    {
        Poly<T> r(alpha_);
        for (const auto& [e, c] : terms_) r.add_term(e, from_cplx<T>(to_cplx(c)));
        return r;
    }

    double coeff_l1() const
    {
        double s = 0.0;
        for (const auto& kv : terms_) s += magnitude(kv.second);
        return s;
    }

    friend bool operator==(const Poly& a, const Poly& b)
    {
        return a.alpha_ == b.alpha_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    void same(const Poly& o) const
    {
        if (alpha_ != o.alpha_)
            throw PreconditionError("alphabet mismatch: " + alpha_.name() + " vs " + o.alpha_.name());
    }

private:
    Alphabet alpha_{};
    Terms terms_;
};

template <>
template <>
inline Poly<QComplex> Poly<QComplex>::cast<QComplex>() const
{
    return *this;
}

enum class DerivKind { holomorphic, antiholomorphic, real_x, real_y, theta1, theta2 };

// Partial derivative in a named coordinate of complex slot `slot`.
template <class S>
Poly<S> wirtinger_derive(const Poly<S>& p, int slot, DerivKind kind)
{
    const Alphabet& a = p.alphabet();
    require(slot >= 0 && slot < a.n, "wirtinger_derive: slot out of range");
    switch (a.tag) {
    case Tag::wirtinger:
        switch (kind) {
        case DerivKind::holomorphic: return p.derive(a.z(slot));
        case DerivKind::antiholomorphic: return p.derive(a.zbar(slot));
        case DerivKind::real_x: return p.derive(a.z(slot)) + p.derive(a.zbar(slot));
        case DerivKind::real_y:
            return (p.derive(a.z(slot)) - p.derive(a.zbar(slot))).scaled(imag_unit<S>());
        default: throw PreconditionError("wirtinger_derive: theta derivative on a Wirtinger poly");
        }
    case Tag::real:
    case Tag::symbol:
        switch (kind) {
        case DerivKind::real_x: return p.derive(a.x(slot));
        case DerivKind::real_y: return p.derive(a.y(slot));
        case DerivKind::theta1:
            require(a.tag == Tag::symbol, "wirtinger_derive: theta on real poly");
            return p.derive(a.t1(slot));
        case DerivKind::theta2:
            require(a.tag == Tag::symbol, "wirtinger_derive: theta on real poly");
            return p.derive(a.t2(slot));
        case DerivKind::holomorphic:
            return (p.derive(a.x(slot)) - p.derive(a.y(slot)).scaled(imag_unit<S>())).scaled(ratio<S>(1, 2));
        case DerivKind::antiholomorphic:
            return (p.derive(a.x(slot)) + p.derive(a.y(slot)).scaled(imag_unit<S>())).scaled(ratio<S>(1, 2));
        }
        break;
    default: break;
    }
    throw PreconditionError("wirtinger_derive: unsupported alphabet " + a.name());
}

// Polarized evaluation z -> point, zbar -> conj_point.
template <class S>
cplx poly_eval(const Poly<S>& p, const std::vector<cplx>& point, const std::vector<cplx>& conj_point)
{
    const Alphabet& a = p.alphabet();
    require(a.tag == Tag::wirtinger, "poly_eval: Wirtinger alphabet required");
    require(static_cast<int>(point.size()) == a.n && static_cast<int>(conj_point.size()) == a.n,
            "poly_eval: point length mismatch");
    std::vector<cplx> v(point);
    v.insert(v.end(), conj_point.begin(), conj_point.end());
    return p.evaluate(v);
}

template <class S>
cplx poly_eval(const Poly<S>& p, const std::vector<cplx>& point)
{
    std::vector<cplx> c(point.size());
    for (std::size_t i = 0; i < point.size(); ++i) c[i] = std::conj(point[i]);
    return poly_eval(p, point, c);
}

// sum_{j} p^j / j!, truncated to total degree <= D.
template <class S>
Poly<S> exp_truncated(const Poly<S>& p, int D)
{
    require(is_zero_s(p.constant_term()), "exp_truncated: nonzero constant term");
    Poly<S> result = Poly<S>::constant(p.alphabet(), S(1));
    if (p.is_zero()) return result;
    Poly<S> term = result;
    const int v = p.valuation();
    for (int j = 1; j * v <= D; ++j) {
        term = mul_truncated(term, p, D).scaled(ratio<S>(1, j));
        if (term.is_zero()) break;
        result += term;
    }
    return result;
}

template <class S>
Poly<S> pow_truncated(const Poly<S>& p, int e, int D = -1)
{
    Poly<S> r = Poly<S>::constant(p.alphabet(), S(1));
    for (int i = 0; i < e; ++i) r = mul_truncated(r, p, D);
    return r;
}

// (1 + q)^s as a binomial series in q (zero constant term), truncated to degree <= D.
template <class S>
Poly<S> binomial_series(const Poly<S>& q, long long snum, long long sden, int D)
{
    require(is_zero_s(q.constant_term()), "binomial_series: q must vanish at 0");
    Poly<S> result = Poly<S>::constant(q.alphabet(), S(1));
    if (q.is_zero()) return result;
    Poly<S> term = result;
    const int v = q.valuation();
    S coef(1);
    for (int j = 1; j * v <= D; ++j) {
        // coef_j = coef_{j-1} * (s - j + 1) / j
        coef = coef * ratio<S>(snum - (j - 1) * sden, sden) * ratio<S>(1, j);
        term = mul_truncated(term, q, D);
        if (term.is_zero()) break;
        result += term.scaled(coef);
    }
    return result;
}

// Complex conjugate function: swaps z and zbar blocks and conjugates coefficients.
template <class S>
Poly<S> conj_poly(const Poly<S>& p)
{
    const Alphabet& a = p.alphabet();
    Poly<S> r(a);
    for (const auto& [e, c] : p.terms()) {
        Exponent f = e;
        if (a.tag == Tag::wirtinger || a.tag == Tag::chain) {
            const int blocks = a.tag == Tag::chain ? a.slots : 1;
            for (int s = 0; s < blocks; ++s)
                for (int j = 0; j < a.n; ++j) std::swap(f[2 * a.n * s + j], f[2 * a.n * s + a.n + j]);
        }
        r.add_term(f, conj_s(c));
    }
    return r;
}

// Real-valued check: p equals its conjugate function.
template <class S>
bool is_real_valued(const Poly<S>& p, double tol = 0.0)
{
    Poly<S> d = p - conj_poly(p);
    if (tol == 0.0) return d.is_zero();
    return d.coeff_l1() <= tol * (1.0 + p.coeff_l1());
}

// Wirtinger -> real coordinates: z = x + i y, zbar = x - i y.
template <class S>
Poly<S> to_real(const Poly<S>& p)
{
    const Alphabet& a = p.alphabet();
    require(a.tag == Tag::wirtinger, "to_real: Wirtinger alphabet required");
    Alphabet r = Alphabet::real(a.n);
    std::vector<Poly<S>> img(a.nvars(), Poly<S>(r));
    for (int j = 0; j < a.n; ++j) {
        img[a.z(j)] = Poly<S>::var(r, r.x(j)) + Poly<S>::var(r, r.y(j), imag_unit<S>());
        img[a.zbar(j)] = Poly<S>::var(r, r.x(j)) - Poly<S>::var(r, r.y(j), imag_unit<S>());
    }
    return p.substitute(img, r);
}

// Real -> Wirtinger: x = (z + zbar)/2, y = (z - zbar)/(2i).
template <class S>
Poly<S> to_wirtinger(const Poly<S>& p)
{
    const Alphabet& a = p.alphabet();
    require(a.tag == Tag::real, "to_wirtinger: real alphabet required");
    Alphabet w = Alphabet::wirtinger(a.n);
    std::vector<Poly<S>> img(a.nvars(), Poly<S>(w));
    const S half = ratio<S>(1, 2);
    const S mhalf_i = -half * imag_unit<S>();
    for (int j = 0; j < a.n; ++j) {
        img[a.x(j)] = Poly<S>::var(w, w.z(j), half) + Poly<S>::var(w, w.zbar(j), half);
        img[a.y(j)] = Poly<S>::var(w, w.z(j), mhalf_i) - Poly<S>::var(w, w.zbar(j), mhalf_i);
    }
    return p.substitute(img, w);
}

// Polynomial in k with polynomial coefficients, k-power -> coefficient.
// Truncation is by excess: (total degree) - 2 (k-power).
template <class S>
class KPoly {
public:
    KPoly() = default;
    explicit KPoly(Alphabet a) : alpha_(a) {}

    static KPoly from_poly(const Poly<S>& p, int kpow = 0)
    {
        KPoly r(p.alphabet());
        if (!p.is_zero()) r.by_power_[kpow] = p;
        return r;
    }
    static KPoly constant(Alphabet a, const S& c) { return from_poly(Poly<S>::constant(a, c)); }

    const Alphabet& alphabet() const { return alpha_; }
    const std::map<int, Poly<S>>& by_power() const { return by_power_; }
    bool is_zero() const { return by_power_.empty(); }

    void add(int kpow, const Poly<S>& p)
    {
        if (p.is_zero()) return;
        auto it = by_power_.find(kpow);
        if (it == by_power_.end()) {
            by_power_.emplace(kpow, p);
            return;
        }
        it->second += p;
        if (it->second.is_zero()) by_power_.erase(it);
    }

    KPoly& operator+=(const KPoly& o)
    {
        for (const auto& [q, p] : o.by_power_) add(q, p);
        return *this;
    }
    KPoly& operator-=(const KPoly& o)
    {
        for (const auto& [q, p] : o.by_power_) add(q, -p);
        return *this;
    }
    friend KPoly operator+(KPoly a, const KPoly& b) { return a += b; }
    friend KPoly operator-(KPoly a, const KPoly& b) { return a -= b; }

    KPoly scaled(const S& s) const
    {
        KPoly r(alpha_);
        for (const auto& [q, p] : by_power_) r.add(q, p.scaled(s));
        return r;
    }

    // Smallest excess among stored terms (large value when zero).
    int min_excess() const
    {
        int m = 1 << 20;
        for (const auto& [q, p] : by_power_) m = std::min(m, p.valuation() - 2 * q);
        return m;
    }
    int max_kpower() const { return by_power_.empty() ? 0 : by_power_.rbegin()->first; }

    KPoly truncated(int max_excess) const
    {
        KPoly r(alpha_);
        for (const auto& [q, p] : by_power_) {
            int D = max_excess + 2 * q;
            if (D >= 0) r.add(q, p.truncated(D));
        }
        return r;
    }

    KPoly map_coeffs(const std::function<Poly<S>(const Poly<S>&)>& f, Alphabet target) const
    {
        KPoly r(target);
        for (const auto& [q, p] : by_power_) r.add(q, f(p));
        return r;
    }

    friend KPoly mul_excess(const KPoly& a, const KPoly& b, int max_excess)
    {
        KPoly r(a.alpha_);
        for (const auto& [qa, pa] : a.by_power_)
            for (const auto& [qb, pb] : b.by_power_) {
                int D = max_excess + 2 * (qa + qb);
                if (D < 0) continue;
                r.add(qa + qb, mul_truncated(pa, pb, D));
            }
        return r;
    }

    friend bool operator==(const KPoly& a, const KPoly& b)
    {
        return a.alpha_ == b.alpha_ && a.by_power_ == b.by_power_;
    }

private:
    Alphabet alpha_{};
    std::map<int, Poly<S>> by_power_;
};

// Asymptotic series sum_{m=0}^{M} k^{p-m} c_m.
template <class T>
struct KSeries {
    int leading_power = 0;
    std::vector<T> coeffs;

    int truncation_order() const { return static_cast<int>(coeffs.size()) - 1; }
};

template <class T>
KSeries<T> operator+(const KSeries<T>& a, const KSeries<T>& b)
{
    require(!a.coeffs.empty() && !b.coeffs.empty(), "KSeries: empty operand");
    const int top = std::max(a.leading_power, b.leading_power);
    const int low = std::max(a.leading_power - a.truncation_order(), b.leading_power - b.truncation_order());
    KSeries<T> r{top, {}};
    for (int p = top; p >= low; --p) {
        T c = T();
        bool set = false;
        for (const auto* s : {&a, &b}) {
            int m = s->leading_power - p;
            if (m < 0 || m > s->truncation_order()) continue;
            c = set ? c + s->coeffs[m] : s->coeffs[m];
            set = true;
        }
        r.coeffs.push_back(c);
    }
    return r;
}

template <class T>
KSeries<T> operator*(const KSeries<T>& a, const KSeries<T>& b)
{
    require(!a.coeffs.empty() && !b.coeffs.empty(), "KSeries: empty operand");
    const int M = std::min(a.truncation_order(), b.truncation_order());
    KSeries<T> r{a.leading_power + b.leading_power, {}};
    for (int m = 0; m <= M; ++m) {
        T c = a.coeffs[0] * b.coeffs[m];
        for (int i = 1; i <= m; ++i) c = c + a.coeffs[i] * b.coeffs[m - i];
        r.coeffs.push_back(c);
    }
    return r;
}

template <class T>
cplx evaluate_series(const KSeries<T>& s, double k, int upto = -1)
{
    cplx v = 0.0;
    int M = upto < 0 ? s.truncation_order() : std::min(upto, s.truncation_order());
    for (int m = 0; m <= M; ++m) v += to_cplx(s.coeffs[m]) * std::pow(k, s.leading_power - m);
    return v;
}

} // namespace bkq

#endif
