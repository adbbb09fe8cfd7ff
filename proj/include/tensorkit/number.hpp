#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>

namespace tk {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Complex number with exact rational components, or a double pair once any
// floating-point value enters a computation (float contagion: the result of
// mixing exact and float operands is float).
class Complex {
public:
    Complex() : re_(0), im_(0), approx_(false) {}
    Complex(long v) : re_(v), im_(0), approx_(false) {}
    Complex(const Rational& re) : re_(re), im_(0), approx_(false) {}
    Complex(const Rational& re, const Rational& im) : re_(re), im_(im), approx_(false) {}

    static Complex imaginaryUnit() { return Complex(Rational(0), Rational(1)); }
    static Complex fromDouble(double re, double im = 0.0) {
        Complex c;
        c.approx_ = true;
        c.fre_ = re;
        c.fim_ = im;
        return c;
    }

    bool isFloat() const { return approx_; }
    bool isZero() const {
        return approx_ ? (fre_ == 0.0 && fim_ == 0.0) : (re_ == 0 && im_ == 0);
    }
    bool isOne() const {
        return approx_ ? (fre_ == 1.0 && fim_ == 0.0) : (re_ == 1 && im_ == 0);
    }
    bool isMinusOne() const {
        return approx_ ? (fre_ == -1.0 && fim_ == 0.0) : (re_ == -1 && im_ == 0);
    }
    bool isReal() const { return approx_ ? fim_ == 0.0 : im_ == 0; }
    bool isRational() const { return !approx_ && im_ == 0; }
    bool isInteger() const {
        return isRational() && boost::multiprecision::denominator(re_) == 1;
    }
    // fits in long and is integer
    std::optional<long> asLong() const;

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }
    std::complex<double> toDouble() const {
        if (approx_) return {fre_, fim_};
        return {static_cast<double>(re_), static_cast<double>(im_)};
    }

    Complex operator-() const;
    Complex conj() const;
    friend Complex operator+(const Complex& a, const Complex& b);
    friend Complex operator-(const Complex& a, const Complex& b);
    friend Complex operator*(const Complex& a, const Complex& b);
    friend Complex operator/(const Complex& a, const Complex& b);
    Complex& operator+=(const Complex& o) { return *this = *this + o; }
    Complex& operator*=(const Complex& o) { return *this = *this * o; }

    friend bool operator==(const Complex& a, const Complex& b);
    friend bool operator!=(const Complex& a, const Complex& b) { return !(a == b); }

    // Integer power (exponent may be negative for nonzero base).
    Complex pow(long e) const;

    // a**(p/q) when the result is exact (perfect roots of a nonnegative
    // rational); nullopt otherwise.
    static std::optional<Complex> rationalPower(const Complex& base, const Rational& exp);

    uint32_t hash() const;
    std::string toString() const;  // in expression syntax, e.g. "1/3", "2*I", "1.38307 - 0.144188*I"

private:
    Rational re_, im_;
    bool approx_;
    double fre_ = 0.0, fim_ = 0.0;
};

}  // namespace tk
