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

#ifndef BKQ_SCALAR_HPP
#define BKQ_SCALAR_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <cmath>
#include <complex>
#include <ostream>
#include <string>
#include <system_error>

#include "errors.hpp"

namespace bkq {

using cplx = std::complex<double>;
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Exact complex rational. Only field operations; no transcendental functions.
class QComplex {
public:
    Rational re{0};
    Rational im{0};

    QComplex() = default;
    QComplex(int v) : re(v) {}
    QComplex(long v) : re(v) {}
    QComplex(long long v) : re(v) {}
    QComplex(Rational r) : re(std::move(r)) {}
    QComplex(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

    QComplex& operator+=(const QComplex& o) { re += o.re; im += o.im; return *this; }
    QComplex& operator-=(const QComplex& o) { re -= o.re; im -= o.im; return *this; }
    QComplex& operator*=(const QComplex& o)
    {
        if (o.im == 0) {
            re *= o.re;
            im *= o.re;
            return *this;
        }
        Rational r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = std::move(r);
        return *this;
    }
    QComplex& operator/=(const QComplex& o)
    {
        if (o.re == 0 && o.im == 0) throw PreconditionError("QComplex: division by zero");
        if (o.im == 0) {
            re /= o.re;
            im /= o.re;
            return *this;
        }
        Rational d = o.re * o.re + o.im * o.im;
        Rational r = (re * o.re + im * o.im) / d;
        im = (im * o.re - re * o.im) / d;
        re = std::move(r);
        return *this;
    }
    friend QComplex operator+(QComplex a, const QComplex& b) { return a += b; }
    friend QComplex operator-(QComplex a, const QComplex& b) { return a -= b; }
    friend QComplex operator*(QComplex a, const QComplex& b) { return a *= b; }
    friend QComplex operator/(QComplex a, const QComplex& b) { return a /= b; }
    friend QComplex operator-(const QComplex& a) { return QComplex(-a.re, -a.im); }
    friend bool operator==(const QComplex& a, const QComplex& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const QComplex& a, const QComplex& b) { return !(a == b); }

    friend std::ostream& operator<<(std::ostream& os, const QComplex& q)
    {
        return os << "(" << q.re << "," << q.im << ")";
    }
};

// Scalar interface shared by cplx and QComplex.
inline cplx conj_s(const cplx& z) { return std::conj(z); }
inline QComplex conj_s(const QComplex& z) { return QComplex(z.re, -z.im); }

inline bool is_zero_s(const cplx& z) { return z == cplx(0.0, 0.0); }
inline bool is_zero_s(const QComplex& z) { return z.re == 0 && z.im == 0; }

inline cplx to_cplx(const cplx& z) { return z; }
inline cplx to_cplx(const QComplex& z)
{
    return {static_cast<double>(z.re), static_cast<double>(z.im)};
}

inline double magnitude(const cplx& z) { return std::abs(z); }
inline double magnitude(const QComplex& z) { return std::abs(to_cplx(z)); }

template <class S> S ratio(long long p, long long q);
template <> inline cplx ratio<cplx>(long long p, long long q)
{
    return {static_cast<double>(p) / static_cast<double>(q), 0.0};
}
template <> inline QComplex ratio<QComplex>(long long p, long long q)
{
    return QComplex(Rational(p, q));
}

template <class S> S imag_unit();
template <> inline cplx imag_unit<cplx>() { return {0.0, 1.0}; }
template <> inline QComplex imag_unit<QComplex>() { return QComplex(Rational(0), Rational(1)); }

// Exact binary value of a double.
inline Rational rational_from_double_exact(double v)
{
    if (!std::isfinite(v)) throw ParseError("non-finite number");
    if (v == 0.0) return Rational(0);
    int e = 0;
    double m = std::frexp(v, &e);
    long long mant = static_cast<long long>(std::ldexp(m, 53));
    e -= 53;
    Rational r(mant);
    if (e > 0) r *= Rational(BigInt(1) << e);
    if (e < 0) r /= Rational(BigInt(1) << (-e));
    return r;
}

// Parse a decimal string ("-0.125", "1e-3", "3/7") into an exact rational.
inline Rational rational_from_string(const std::string& s)
{
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        if (den == 0) throw ParseError("zero denominator in '" + s + "'");
        return Rational(num, den);
    }
    std::string mant = s;
    long long exp10 = 0;
    auto epos = s.find_first_of("eE");
    if (epos != std::string::npos) {
        mant = s.substr(0, epos);
        exp10 = std::stoll(s.substr(epos + 1));
    }
    bool neg = false;
    if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
        neg = mant[0] == '-';
        mant = mant.substr(1);
    }
    auto dot = mant.find('.');
    if (dot != std::string::npos) {
        exp10 -= static_cast<long long>(mant.size() - dot - 1);
        mant.erase(dot, 1);
    }
    if (mant.empty() || mant.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("malformed number '" + s + "'");
    Rational r{BigInt(mant)};
    BigInt p = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(exp10 < 0 ? -exp10 : exp10));
    if (exp10 > 0) r *= Rational(p);
    if (exp10 < 0) r /= Rational(p);
    return neg ? Rational(-r) : r;
}

// Decimal value a human wrote: shortest round-trip representation of v.
inline Rational rational_from_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    if (res.ec != std::errc()) throw ParseError("number formatting failed");
    return rational_from_string(std::string(buf, res.ptr));
}

inline std::string rational_to_string(const Rational& r)
{
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

template <class S> S from_cplx(const cplx& z);
template <> inline cplx from_cplx<cplx>(const cplx& z) { return z; }
template <> inline QComplex from_cplx<QComplex>(const cplx& z)
{
    return QComplex(rational_from_double(z.real()), rational_from_double(z.imag()));
}

} // namespace bkq

#endif
