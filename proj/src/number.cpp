#include "tensorkit/number.hpp"

#include <sstream>

namespace tk {

namespace mp = boost::multiprecision;

std::optional<long> Complex::asLong() const {
    if (!isInteger()) return std::nullopt;
    BigInt n = mp::numerator(re_);
    if (n > std::numeric_limits<long>::max() || n < std::numeric_limits<long>::min())
        return std::nullopt;
    return static_cast<long>(n);
}

Complex Complex::operator-() const {
    if (approx_) return fromDouble(-fre_, -fim_);
    return Complex(-re_, -im_);
}

Complex Complex::conj() const {
    if (approx_) return fromDouble(fre_, -fim_);
    return Complex(re_, -im_);
}

Complex operator+(const Complex& a, const Complex& b) {
    if (a.approx_ || b.approx_) {
        auto x = a.toDouble(), y = b.toDouble();
        return Complex::fromDouble(x.real() + y.real(), x.imag() + y.imag());
    }
    return Complex(a.re_ + b.re_, a.im_ + b.im_);
}

Complex operator-(const Complex& a, const Complex& b) { return a + (-b); }

Complex operator*(const Complex& a, const Complex& b) {
    if (a.approx_ || b.approx_) {
        auto z = a.toDouble() * b.toDouble();
        return Complex::fromDouble(z.real(), z.imag());
    }
    return Complex(a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_);
}

Complex operator/(const Complex& a, const Complex& b) {
    if (a.approx_ || b.approx_) {
        auto z = a.toDouble() / b.toDouble();
        return Complex::fromDouble(z.real(), z.imag());
    }
    Rational n = b.re_ * b.re_ + b.im_ * b.im_;
    return Complex((a.re_ * b.re_ + a.im_ * b.im_) / n, (a.im_ * b.re_ - a.re_ * b.im_) / n);
}

bool operator==(const Complex& a, const Complex& b) {
    if (a.approx_ != b.approx_) return false;
    if (a.approx_) return a.fre_ == b.fre_ && a.fim_ == b.fim_;
    return a.re_ == b.re_ && a.im_ == b.im_;
}

Complex Complex::pow(long e) const {
    if (approx_) {
        auto z = std::pow(toDouble(), static_cast<double>(e));
        return fromDouble(z.real(), z.imag());
    }
    if (e == 0) return Complex(1);
    bool inv = e < 0;
    unsigned long n = inv ? -static_cast<unsigned long>(e) : static_cast<unsigned long>(e);
    Complex base = *this, acc(1);
    while (n) {
        if (n & 1) acc = acc * base;
        base = base * base;
        n >>= 1;
    }
    if (inv) return Complex(1) / acc;
    return acc;
}

namespace {

// exact q-th root of a nonnegative integer, if perfect
std::optional<BigInt> perfectRoot(const BigInt& n, unsigned long q) {
    if (n == 0 || n == 1 || q == 1) return n;
    BigInt lo = 1, hi = n;
    while (lo < hi) {
        BigInt mid = (lo + hi + 1) / 2;
        BigInt p = mp::pow(mid, static_cast<unsigned>(q));
        if (p <= n)
            lo = mid;
        else
            hi = mid - 1;
    }
    if (mp::pow(lo, static_cast<unsigned>(q)) == n) return lo;
    return std::nullopt;
}

void appendDouble(std::ostream& os, double v) {
    std::ostringstream tmp;
    tmp.precision(6);
    tmp << v;
    os << tmp.str();
}

}  // namespace

std::optional<Complex> Complex::rationalPower(const Complex& base, const Rational& exp) {
    if (base.isFloat()) {
        auto z = std::pow(base.toDouble(), static_cast<double>(exp));
        return fromDouble(z.real(), z.imag());
    }
    BigInt p = mp::numerator(exp), q = mp::denominator(exp);
    if (q == 1) {
        if (!base.isZero() || p >= 0) {
            if (p <= 1024 && p >= -1024) return base.pow(static_cast<long>(p));
        }
        return std::nullopt;
    }
    if (!base.isRational() || base.re() < 0) return std::nullopt;
    if (q > 64) return std::nullopt;
    unsigned long qi = static_cast<unsigned long>(q);
    BigInt num = mp::numerator(base.re()), den = mp::denominator(base.re());
    auto rn = perfectRoot(num, qi);
    auto rd = perfectRoot(den, qi);
    if (!rn || !rd) return std::nullopt;
    Complex root(Rational(*rn, *rd));
    if (p < -1024 || p > 1024) return std::nullopt;
    return root.pow(static_cast<long>(p));
}

uint32_t Complex::hash() const {
    auto mix = [](uint32_t h, uint32_t v) {
        h ^= v + 0x9e3779b9u + (h << 6) + (h >> 2);
        return h;
    };
    if (approx_) {
        uint64_t a, b;
        std::memcpy(&a, &fre_, 8);
        std::memcpy(&b, &fim_, 8);
        return mix(mix(17u, static_cast<uint32_t>(a ^ (a >> 32))),
                   static_cast<uint32_t>(b ^ (b >> 32)));
    }
    uint32_t h = 31u;
    for (const Rational* r : {&re_, &im_}) {
        h = mix(h, static_cast<uint32_t>(mp::hash_value(*r)));
    }
    return h;
}

std::string Complex::toString() const {
    std::ostringstream os;
    if (approx_) {
        if (fim_ == 0.0) {
            appendDouble(os, fre_);
        } else if (fre_ == 0.0) {
            appendDouble(os, fim_);
            os << "*I";
        } else {
            appendDouble(os, fre_);
            os << (fim_ > 0 ? " + " : " - ");
            appendDouble(os, std::abs(fim_));
            os << "*I";
        }
        return os.str();
    }
    auto rat = [](const Rational& r) {
        std::ostringstream t;
        t << r;
        return t.str();
    };
    if (im_ == 0) return rat(re_);
    std::string imPart = im_ == 1 ? "I" : (im_ == -1 ? "-I" : rat(im_) + "*I");
    if (re_ == 0) return imPart;
    if (im_ > 0) return rat(re_) + "+" + imPart;
    return rat(re_) + "-" + (im_ == -1 ? "I" : rat(-im_) + "*I");
}

}  // namespace tk
