#include "tensorkit/printer.hpp"

#include <sstream>

#include "tensorkit/context.hpp"

namespace tk {

namespace {

struct Printer {
    OutputFormat fmt;

    bool utf8() const { return fmt == OutputFormat::UTF8; }
    bool latex() const { return fmt == OutputFormat::LaTeX; }
    bool wolfram() const { return fmt == OutputFormat::WolframMathematica; }

    std::string indices(const Indices& idx) const {
        if (idx.empty()) return "";
        std::ostringstream os;
        size_t i = 0;
        bool firstGroup = true;
        while (i < idx.size()) {
            size_t j = i;
            while (j < idx.size() && idx[j].upper() == idx[i].upper()) ++j;
            if (latex() && !firstGroup) os << "{}";
            os << (idx[i].upper() ? "^{" : "_{");
            for (size_t k = i; k < j; ++k) os << indexName(idx[k].type(), idx[k].name(), utf8());
            os << "}";
            firstGroup = false;
            i = j;
        }
        return os.str();
    }

    std::string name(NameId id) const {
        const std::string& base = Context::get().descriptor(id).base;
        if (utf8() && base.size() > 1 && base[0] == '\\') {
            if (auto li = lookupIndexName(base)) return indexName(li->first, li->second, true);
        }
        return base;
    }

    // is `e` a sum or a negative-looking product needing parens inside a product
    bool needsParensInProduct(const ExprPtr& e) const {
        if (e->kind() == Kind::Sum || e->kind() == Kind::Rule) return true;
        return false;
    }

    bool needsParensAsBase(const ExprPtr& e) const {
        switch (e->kind()) {
            case Kind::Sum:
            case Kind::Product:
            case Kind::Rule:
            case Kind::Power:
                return true;
            case Kind::Number: {
                const Complex& v = as<NumberExpr>(e)->value();
                if (v.isFloat()) return true;
                return !(v.isInteger() && v.re() >= 0);
            }
            default:
                return false;
        }
    }

    std::string coefficient(const Complex& c, bool& negated) const {
        // renders |c| (factoring a leading minus out when purely negative)
        negated = false;
        Complex v = c;
        if (!c.isFloat()) {
            if ((c.isReal() && c.re() < 0) || (c.re() == 0 && c.im() < 0)) {
                negated = true;
                v = -c;
            }
        }
        std::string body = v.toString();
        bool simple = v.isInteger() || (v.re() == 0 && v.im() == 1);
        if (!v.isFloat() && v.re() == 0 && v.im() != 0) {
            // pure imaginary like 4*I counts as simple enough
            simple = boost::multiprecision::denominator(v.im()) == 1;
        }
        if (v.isFloat()) simple = false;
        if (!simple) body = "(" + body + ")";
        return body;
    }

    std::string print(const ExprPtr& e) const {
        switch (e->kind()) {
            case Kind::Number: {
                const Complex& v = as<NumberExpr>(e)->value();
                if (latex() && v.isRational() && !v.isFloat() &&
                    boost::multiprecision::denominator(v.re()) != 1) {
                    std::ostringstream os;
                    os << "\\frac{" << boost::multiprecision::numerator(v.re()) << "}{"
                       << boost::multiprecision::denominator(v.re()) << "}";
                    return os.str();
                }
                return v.toString();
            }
            case Kind::SimpleTensor: {
                auto* t = as<SimpleTensorExpr>(e);
                std::string base = name(t->name());
                if (Context::get().isAnyDeltaName(t->name()) && t->indices().size() == 2 &&
                    t->indices()[0].upper() != t->indices()[1].upper())
                    base = "d";
                return base + indices(t->indices());
            }
            case Kind::TensorField: {
                auto* t = as<TensorFieldExpr>(e);
                std::ostringstream os;
                os << name(t->name()) << indices(t->indices()) << "[";
                for (size_t i = 0; i < t->args().size(); ++i) {
                    if (i) os << ", ";
                    os << print(t->args()[i]);
                    if (i < t->argBindings().size() && !t->argBindings()[i].empty())
                        os << ":" << t->argBindings()[i].toString(utf8());
                }
                os << "]";
                return os.str();
            }
            case Kind::Sum: {
                auto* s = as<SumExpr>(e);
                std::ostringstream os;
                for (size_t i = 0; i < s->terms().size(); ++i) {
                    std::string t = print(s->terms()[i]);
                    if (i == 0) {
                        os << t;
                    } else if (!t.empty() && t[0] == '-') {
                        os << t;
                    } else {
                        os << "+" << t;
                    }
                }
                return os.str();
            }
            case Kind::Product:
                return printProduct(as<ProductExpr>(e));
            case Kind::Power: {
                auto* p = as<PowerExpr>(e);
                if (wolfram())
                    return "Power[" + print(p->base()) + ", " + print(p->exponent()) + "]";
                std::string b = print(p->base());
                if (needsParensAsBase(p->base())) b = "(" + b + ")";
                std::string x = print(p->exponent());
                bool parenExp = true;
                if (auto* n = as<NumberExpr>(p->exponent())) {
                    if (n->value().isInteger() && n->value().re() >= 0) parenExp = false;
                }
                if (p->exponent()->kind() == Kind::SimpleTensor) parenExp = false;
                if (parenExp) x = "(" + x + ")";
                return b + "**" + x;
            }
            case Kind::ScalarFunction: {
                auto* f = as<ScalarFunctionExpr>(e);
                return std::string(functionName(f->fn())) + "[" + print(f->arg()) + "]";
            }
            case Kind::Rule: {
                auto* r = as<RuleExpr>(e);
                return print(r->lhs()) + " = " + print(r->rhs());
            }
        }
        return "?";
    }

    std::string printProduct(const ProductExpr* p) const {
        if (latex()) return printProductLatex(p);
        std::ostringstream os;
        bool negated = false;
        bool first = true;
        if (!p->scalarFactor().isOne()) {
            if (p->scalarFactor().isMinusOne()) {
                os << "-";
            } else {
                std::string c = coefficient(p->scalarFactor(), negated);
                if (negated) os << "-";
                os << c;
                first = false;
            }
        }
        for (auto& f : p->factors()) {
            if (!first) os << "*";
            first = false;
            std::string s = print(f);
            if (needsParensInProduct(f)) s = "(" + s + ")";
            os << s;
        }
        return os.str();
    }

    std::string printProductLatex(const ProductExpr* p) const {
        // negative integer powers become the denominator of a \frac; all other
        // factors stay outside it
        std::vector<ExprPtr> num;
        std::vector<std::pair<ExprPtr, Complex>> den;  // base, |exponent|
        for (auto& f : p->factors()) {
            if (auto* pw = as<PowerExpr>(f)) {
                if (auto* n = as<NumberExpr>(pw->exponent())) {
                    if (!n->value().isFloat() && n->value().isInteger() && n->value().re() < 0) {
                        den.push_back({pw->base(), -n->value()});
                        continue;
                    }
                }
            }
            num.push_back(f);
        }
        std::ostringstream os;
        bool negated = false;
        std::string coeff;
        if (!p->scalarFactor().isOne()) {
            if (p->scalarFactor().isMinusOne())
                negated = true;
            else
                coeff = coefficient(p->scalarFactor(), negated);
        }
        if (negated) os << "-";
        bool first = true;
        if (!den.empty()) {
            os << "\\frac{" << (coeff.empty() ? "1" : coeff) << "}{";
            for (size_t i = 0; i < den.size(); ++i) {
                if (i) os << " ";
                std::string b = print(den[i].first);
                if (den[i].first->kind() == Kind::Sum || den[i].first->kind() == Kind::Product)
                    b = "(" + b + ")";
                os << b;
                if (!den[i].second.isOne()) os << "^{" << den[i].second.toString() << "}";
            }
            os << "}";
            first = false;
        } else if (!coeff.empty()) {
            os << coeff;
            first = false;
        }
        for (auto& f : num) {
            if (!first) os << " ";
            first = false;
            std::string s = print(f);
            if (needsParensInProduct(f)) s = "(" + s + ")";
            os << s;
        }
        return os.str();
    }
};

}  // namespace

std::string printExpr(const Expr* e, OutputFormat format) {
    Printer p{format};
    return p.print(ExprPtr(e, [](const Expr*) {}));
}

std::string printExpr(const ExprPtr& e, OutputFormat format) {
    Printer p{format};
    return p.print(e);
}

}  // namespace tk
