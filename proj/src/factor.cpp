#include <algorithm>
#include <map>

#include "tensorkit/mapping.hpp"
#include "tensorkit/transforms.hpp"

namespace tk {

namespace {

namespace mp = boost::multiprecision;

// dense univariate polynomial over the rationals, coefficient of x^i at [i]
struct Poly {
    std::vector<Rational> c;

    int degree() const {
        for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i)
            if (c[i] != 0) return i;
        return -1;
    }
    void trim() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }
    bool isZero() const { return degree() < 0; }
    Rational lead() const { return c[degree()]; }

    static Poly x() { return Poly{{Rational(0), Rational(1)}}; }

    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.isZero() || b.isZero()) return Poly{};
        Poly r;
        r.c.assign(a.c.size() + b.c.size() - 1, Rational(0));
        for (size_t i = 0; i < a.c.size(); ++i)
            for (size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
        return r;
    }
    friend Poly operator-(const Poly& a, const Poly& b) {
        Poly r = a;
        if (r.c.size() < b.c.size()) r.c.resize(b.c.size(), Rational(0));
        for (size_t i = 0; i < b.c.size(); ++i) r.c[i] -= b.c[i];
        r.trim();
        return r;
    }
    Poly scaled(const Rational& k) const {
        Poly r = *this;
        for (auto& v : r.c) v *= k;
        return r;
    }
    Poly derivative() const {
        Poly r;
        if (c.size() < 2) return r;
        r.c.resize(c.size() - 1);
        for (size_t i = 1; i < c.size(); ++i) r.c[i - 1] = c[i] * Rational(i);
        return r;
    }
    Rational eval(const Rational& v) const {
        Rational acc(0);
        for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) acc = acc * v + c[i];
        return acc;
    }
};

// division with remainder over the rationals
void divmod(const Poly& a, const Poly& b, Poly& q, Poly& r) {
    q = Poly{};
    r = a;
    r.trim();
    int db = b.degree();
    while (r.degree() >= db && !r.isZero()) {
        int shift = r.degree() - db;
        Rational k = r.lead() / b.lead();
        Poly t;
        t.c.assign(shift + 1, Rational(0));
        t.c[shift] = k;
        if (static_cast<int>(q.c.size()) < shift + 1) q.c.resize(shift + 1, Rational(0));
        q.c[shift] += k;
        r = r - t * b;
    }
}

Poly polyGcd(Poly a, Poly b) {
    a.trim();
    b.trim();
    while (!b.isZero()) {
        Poly q, r;
        divmod(a, b, q, r);
        a = b;
        b = r;
    }
    if (!a.isZero()) a = a.scaled(Rational(1) / a.lead());
    return a;
}

std::vector<BigInt> smallDivisors(const BigInt& n0) {
    BigInt n = n0 < 0 ? BigInt(-n0) : n0;
    std::vector<BigInt> r;
    if (n == 0 || n > BigInt(1000000000000LL)) return r;
    for (BigInt d = 1; d * d <= n; ++d) {
        if (n % d == 0) {
            r.push_back(d);
            r.push_back(n / d);
        }
        if (r.size() > 2000) return {};
    }
    return r;
}

// factor a rational univariate polynomial: returns (constant, factors with
// multiplicity); factors have integer coefficients and positive leading term
struct Factored {
    Rational constant{1};
    std::vector<std::pair<Poly, int>> factors;
};

void clearDenominators(Poly& p, Rational& content) {
    BigInt lcm = 1;
    for (auto& v : p.c) lcm = mp::lcm(lcm, mp::denominator(v));
    p = p.scaled(Rational(lcm));
    BigInt g = 0;
    for (auto& v : p.c) g = mp::gcd(g, mp::numerator(v));
    if (g != 0) p = p.scaled(Rational(1, g));
    if (p.lead() < 0) {
        p = p.scaled(Rational(-1));
        content *= Rational(-1);
    }
    content *= Rational(g, lcm);
}

void factorSquareFree(Poly p, int multiplicity, Factored& out) {
    // strip rational roots, then split quadratics exactly
    bool progress = true;
    while (progress && p.degree() > 1) {
        progress = false;
        Rational content(1);
        clearDenominators(p, content);
        out.constant *= content;
        auto ps = smallDivisors(mp::numerator(p.c[0]));
        auto qs = smallDivisors(mp::numerator(p.lead()));
        if (p.c[0] == 0) {
            // x divides
            Poly q, r;
            divmod(p, Poly::x(), q, r);
            out.factors.push_back({Poly::x(), multiplicity});
            p = q;
            progress = true;
            continue;
        }
        if (ps.empty() || qs.empty()) break;
        for (auto& pp : ps) {
            for (auto& qq : qs) {
                for (int sgn : {1, -1}) {
                    Rational root(sgn * pp, qq);
                    if (p.eval(root) == 0) {
                        // divide by (q*x - p*sgn) normalized
                        Poly lin{{-root, Rational(1)}};
                        Poly q2, r2;
                        divmod(p, lin, q2, r2);
                        Rational c2(1);
                        Poly linInt = lin;
                        clearDenominators(linInt, c2);
                        out.constant *= c2;
                        out.factors.push_back({linInt, multiplicity});
                        p = q2.scaled(Rational(1) / c2);
                        progress = true;
                        goto next;
                    }
                }
            }
        }
    next:;
    }
    Rational content(1);
    clearDenominators(p, content);
    out.constant *= content;
    if (p.degree() == 2) {
        // exact square root of the discriminant
        Rational a = p.c[2], b = p.c[1], c = p.c[0];
        Rational disc = b * b - Rational(4) * a * c;
        if (disc >= 0) {
            auto root = Complex::rationalPower(Complex(disc), Rational(1, 2));
            if (root && root->isRational()) {
                Rational sq = root->re();
                Rational r1 = (-b + sq) / (Rational(2) * a);
                Rational r2 = (-b - sq) / (Rational(2) * a);
                Poly l1{{-r1, Rational(1)}}, l2{{-r2, Rational(1)}};
                Rational c1(1), c2(1);
                clearDenominators(l1, c1);
                clearDenominators(l2, c2);
                out.constant *= a * c1 * c2;
                out.factors.push_back({l1, multiplicity});
                out.factors.push_back({l2, multiplicity});
                return;
            }
        }
    }
    if (p.degree() >= 1)
        out.factors.push_back({p, multiplicity});
    else
        out.constant *= p.isZero() ? Rational(0) : p.c[0];
}

std::optional<Factored> factorUnivariate(Poly p) {
    Factored out;
    if (p.degree() <= 0) return std::nullopt;
    // Yun-style square-free decomposition
    int mult = 1;
    while (p.degree() > 0) {
        Poly d = p.derivative();
        Poly g = polyGcd(p, d);
        if (g.degree() <= 0) {
            factorSquareFree(p, mult, out);
            break;
        }
        Poly q, r;
        divmod(p, g, q, r);  // q: square-free part at this multiplicity level
        Poly q2, r2;
        divmod(q, polyGcd(q, g), q2, r2);
        if (q2.degree() > 0) factorSquareFree(q2, mult, out);
        p = g;
        ++mult;
        if (mult > 64) return std::nullopt;
    }
    return out;
}

// expression <-> polynomial in one atomic variable
bool toPoly(const ExprPtr& e, const ExprPtr& var, Poly& out) {
    if (auto* n = as<NumberExpr>(e)) {
        if (n->value().isFloat() || !n->value().isRational()) return false;
        out.c = {n->value().re()};
        return true;
    }
    if (structuralEqual(e, var)) {
        out = Poly::x();
        return true;
    }
    switch (e->kind()) {
        case Kind::Sum: {
            Poly acc;
            for (auto& t : as<SumExpr>(e)->terms()) {
                Poly q;
                if (!toPoly(t, var, q)) return false;
                Poly sum = acc;
                if (sum.c.size() < q.c.size()) sum.c.resize(q.c.size(), Rational(0));
                for (size_t i = 0; i < q.c.size(); ++i) sum.c[i] += q.c[i];
                acc = sum;
            }
            out = acc;
            return true;
        }
        case Kind::Product: {
            auto* p = as<ProductExpr>(e);
            if (!p->scalarFactor().isRational()) return false;
            Poly acc{{p->scalarFactor().re()}};
            for (auto& f : p->factors()) {
                Poly q;
                if (!toPoly(f, var, q)) return false;
                acc = acc * q;
            }
            out = acc;
            return true;
        }
        case Kind::Power: {
            auto* p = as<PowerExpr>(e);
            auto* x = as<NumberExpr>(p->exponent());
            if (!x || x->value().isFloat() || !x->value().isInteger()) return false;
            auto n = x->value().asLong();
            if (!n || *n < 0 || *n > 64) return false;
            Poly b;
            if (!toPoly(p->base(), var, b)) return false;
            Poly acc{{Rational(1)}};
            for (long i = 0; i < *n; ++i) acc = acc * b;
            out = acc;
            return true;
        }
        default:
            return false;
    }
}

// the single non-number atom of an indexless polynomial expression, if any
bool findSingleAtom(const ExprPtr& e, ExprPtr& atom) {
    switch (e->kind()) {
        case Kind::Number:
            return true;
        case Kind::SimpleTensor:
            if (!e->indices().empty()) return false;
            if (atom && !structuralEqual(atom, e)) return false;
            if (!atom) atom = e;
            return true;
        case Kind::Sum:
        case Kind::Product:
            for (size_t i = 0; i < e->size(); ++i)
                if (!findSingleAtom(e->child(i), atom)) return false;
            return true;
        case Kind::Power: {
            auto* p = as<PowerExpr>(e);
            auto* x = as<NumberExpr>(p->exponent());
            if (!x || x->value().isFloat() || !x->value().isInteger() || x->value().re() < 0)
                return false;
            return findSingleAtom(p->base(), atom);
        }
        default:
            return false;
    }
}

ExprPtr polyToExpr(const Poly& p, const ExprPtr& var) {
    std::vector<ExprPtr> terms;
    for (size_t i = 0; i < p.c.size(); ++i) {
        if (p.c[i] == 0) continue;
        if (i == 0) {
            terms.push_back(makeNumber(Complex(p.c[i])));
        } else {
            terms.push_back(
                makeProduct({makePower(var, makeInt(static_cast<long>(i)))}, Complex(p.c[i])));
        }
    }
    return makeSum(std::move(terms));
}

// factor an indexless sum when it is a univariate polynomial
ExprPtr tryFactorSum(const ExprPtr& e) {
    if (e->kind() != Kind::Sum || !e->indices().empty()) return e;
    ExprPtr atom;
    if (!findSingleAtom(e, atom) || !atom) return e;
    Poly p;
    if (!toPoly(e, atom, p)) return e;
    auto f = factorUnivariate(p);
    if (!f || f->factors.empty()) return e;
    // verify: the product of factors reproduces the polynomial
    Poly check{{f->constant}};
    for (auto& [fp, m] : f->factors)
        for (int i = 0; i < m; ++i) check = check * fp;
    Poly diff = check - p;
    if (!diff.isZero()) return e;

    std::vector<ExprPtr> parts;
    for (auto& [fp, m] : f->factors)
        parts.push_back(makePower(polyToExpr(fp, atom), makeInt(m)));
    return makeProduct(std::move(parts), Complex(f->constant));
}

}  // namespace

ExprPtr factorReduced(const ExprPtr& target) {
    ExprPtr t = together(target);
    // factor indexless polynomial parts: whole sums, sum factors inside
    // products, and power bases
    return transformParentAfterChild(t, enterEverywhere(), [](const ExprPtr& n) -> ExprPtr {
        if (n->kind() == Kind::Sum && n->indices().empty()) return tryFactorSum(n);
        return n;
    });
}

}  // namespace tk
