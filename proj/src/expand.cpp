#include <algorithm>

#include "tensorkit/mapping.hpp"
#include "tensorkit/transforms.hpp"

namespace tk {

namespace {

struct ExpandMode {
    bool intoFunctions = false;    // function and field arguments
    bool positivePowers = true;    // integer powers of sums
    bool denominators = false;     // bases of negative integer powers
    bool distribute = true;        // products over sums
};

ExprPtr expandNode(const ExprPtr& e, const ExpandMode& mode, const TransformationPtr& nested);

ExprPtr applyNested(const ExprPtr& e, const TransformationPtr& nested) {
    return nested ? nested->apply(e) : e;
}

std::set<uint32_t> deepNames(const ExprPtr& e) {
    std::set<uint32_t> s;
    collectAllNamesDeep(e, s);
    return s;
}

// multiply two term lists with per-copy dummy relabelling
std::vector<ExprPtr> crossMultiply(const std::vector<ExprPtr>& left,
                                   const std::vector<ExprPtr>& right,
                                   const TransformationPtr& nested) {
    std::vector<ExprPtr> out;
    out.reserve(left.size() * right.size());
    for (auto& a : left) {
        std::set<uint32_t> aNames = deepNames(a);
        for (auto& b : right) {
            ExprPtr bb = renameDummiesAvoiding(b, aNames);
            ExprPtr term = makeProduct({a, bb});
            out.push_back(applyNested(term, nested));
        }
    }
    return out;
}

// expanded term list of an integer power of a sum
std::vector<ExprPtr> expandSumPower(const ExprPtr& base, long n, const ExpandMode& mode,
                                    const TransformationPtr& nested) {
    std::vector<ExprPtr> acc = {makeInt(1)};
    std::vector<ExprPtr> baseTerms;
    for (auto& t : termsOf(expandNode(base, mode, nested))) baseTerms.push_back(t);
    for (long i = 0; i < n; ++i) acc = crossMultiply(acc, baseTerms, nested);
    return acc;
}

bool isPositiveIntPowerOfSum(const ExprPtr& f, long& n) {
    auto* p = as<PowerExpr>(f);
    if (!p || p->base()->kind() != Kind::Sum) return false;
    auto* e = as<NumberExpr>(p->exponent());
    if (!e || e->value().isFloat() || !e->value().isInteger()) return false;
    auto v = e->value().asLong();
    if (!v || *v < 2 || *v > 64) return false;
    n = *v;
    return true;
}

ExprPtr expandProduct(const ProductExpr* p, const ExpandMode& mode,
                      const TransformationPtr& nested) {
    std::vector<ExprPtr> plain;   // factors that do not distribute
    std::vector<std::vector<ExprPtr>> sumFactors;
    for (auto& f0 : p->factors()) {
        ExprPtr f = expandNode(f0, mode, nested);
        long n = 0;
        if (mode.distribute && f->kind() == Kind::Sum) {
            sumFactors.push_back(termsOf(f));
        } else if (mode.distribute && mode.positivePowers && isPositiveIntPowerOfSum(f, n)) {
            sumFactors.push_back(expandSumPower(as<PowerExpr>(f)->base(), n, mode, nested));
        } else {
            plain.push_back(f);
        }
    }
    if (sumFactors.empty()) {
        ExprPtr r = makeProduct(std::move(plain), p->scalarFactor());
        return applyNested(r, nested);
    }
    std::vector<ExprPtr> acc = {
        applyNested(makeProduct(plain, p->scalarFactor()), nested)};
    for (auto& terms : sumFactors) acc = crossMultiply(acc, terms, nested);
    return makeSum(std::move(acc));
}

ExprPtr expandNode(const ExprPtr& e, const ExpandMode& mode, const TransformationPtr& nested) {
    switch (e->kind()) {
        case Kind::Sum: {
            std::vector<ExprPtr> terms;
            for (auto& t : as<SumExpr>(e)->terms()) terms.push_back(expandNode(t, mode, nested));
            return makeSum(std::move(terms));
        }
        case Kind::Product:
            return expandProduct(as<ProductExpr>(e), mode, nested);
        case Kind::Power: {
            auto* p = as<PowerExpr>(e);
            long n = 0;
            if (mode.distribute && mode.positivePowers && isPositiveIntPowerOfSum(e, n))
                return makeSum(expandSumPower(p->base(), n, mode, nested));
            if (auto* x = as<NumberExpr>(p->exponent())) {
                if (!x->value().isFloat() && x->value().isInteger() && x->value().re() < 0 &&
                    mode.denominators) {
                    // (X)**(-n) -> (X**n expanded)**(-1)
                    long m = -*x->value().asLong();
                    ExprPtr opened;
                    if (m == 1) {
                        opened = expandNode(p->base(), mode, nested);
                    } else if (p->base()->kind() == Kind::Sum && m <= 64) {
                        opened = makeSum(expandSumPower(p->base(), m, mode, nested));
                    } else {
                        opened = makePower(expandNode(p->base(), mode, nested), makeInt(m));
                    }
                    return makePower(opened, makeInt(-1));
                }
            }
            if (mode.intoFunctions)
                return makePower(expandNode(p->base(), mode, nested),
                                 expandNode(p->exponent(), mode, nested));
            return e;
        }
        case Kind::ScalarFunction:
            if (mode.intoFunctions)
                return makeScalarFunction(as<ScalarFunctionExpr>(e)->fn(),
                                          expandNode(as<ScalarFunctionExpr>(e)->arg(), mode,
                                                     nested));
            return e;
        case Kind::TensorField:
            if (mode.intoFunctions) {
                auto* f = as<TensorFieldExpr>(e);
                std::vector<ExprPtr> args;
                for (auto& a : f->args()) args.push_back(expandNode(a, mode, nested));
                return makeTensorField(f->name(), f->indices(), std::move(args),
                                       f->argBindings());
            }
            return e;
        case Kind::Rule: {
            auto* r = as<RuleExpr>(e);
            return makeRule(r->lhs(), expandNode(r->rhs(), mode, nested));
        }
        default:
            return e;
    }
}

}  // namespace

ExprPtr expand(const ExprPtr& target, const TransformationPtr& nested) {
    ExpandMode m;
    return expandNode(target, m, nested);
}

ExprPtr expandAll(const ExprPtr& target, const TransformationPtr& nested) {
    ExpandMode m;
    m.intoFunctions = true;
    m.denominators = true;
    return expandNode(target, m, nested);
}

ExprPtr expandNumerator(const ExprPtr& target, const TransformationPtr& nested) {
    ExpandMode m;
    return expandNode(target, m, nested);
}

ExprPtr expandDenominator(const ExprPtr& target, const TransformationPtr& nested) {
    ExpandMode m;
    m.distribute = false;
    m.positivePowers = false;
    m.denominators = true;
    m.intoFunctions = false;
    return expandNode(target, m, nested);
}

}  // namespace tk
