#include <algorithm>

#include "tensorkit/mapping.hpp"
#include "tensorkit/transforms.hpp"

namespace tk {

namespace {

struct DiffVar {
    const SimpleTensorExpr* tensor;
    ExprPtr holder;
};

// delta/metric pair connecting an occurrence slot with an (inverted) variable slot
ExprPtr slotKernel(IndexCode occurrence, IndexCode var) {
    return makeMetric(occurrence, var.inverted());
}

// per-type slot positions
std::map<IndexType, std::vector<size_t>> slotsByType(const Indices& idx) {
    std::map<IndexType, std::vector<size_t>> m;
    for (size_t i = 0; i < idx.size(); ++i) m[idx[i].type()].push_back(i);
    return m;
}

// d occurrence / d var for simple tensors of the same name: the symmetrized
// delta product (1/N) sum_sigma sign(sigma) prod_i K(J_i, V_sigma(i))
ExprPtr symmetrizedDelta(const SimpleTensorExpr* occ, const DiffVar& var) {
    auto occSlots = slotsByType(occ->indices());
    auto varSlots = slotsByType(var.tensor->indices());

    std::vector<IndexType> types;
    for (auto& [t, v] : occSlots) {
        (void)v;
        types.push_back(t);
    }
    // enumerate the product of the per-type symmetry groups
    std::vector<const SymmetryGroup*> groups;
    for (auto t : types) groups.push_back(&Context::get().symmetries(occ->name(), t));

    std::vector<ExprPtr> terms;
    long count = 0;
    std::vector<size_t> pick(types.size(), 0);
    while (true) {
        std::vector<ExprPtr> kernels;
        bool negative = false;
        for (size_t ti = 0; ti < types.size(); ++ti) {
            const auto& sigma = groups[ti]->elements()[pick[ti]];
            if (sigma.negative) negative = !negative;
            auto& os = occSlots[types[ti]];
            auto& vs = varSlots[types[ti]];
            for (size_t i = 0; i < os.size(); ++i) {
                IndexCode j = occ->indices()[os[i]];
                IndexCode v = var.tensor->indices()[vs[sigma.images[i]]];
                kernels.push_back(slotKernel(j, v));
            }
        }
        ExprPtr term = makeProduct(std::move(kernels), Complex(negative ? -1 : 1));
        terms.push_back(term);
        ++count;
        // advance the per-type selector
        size_t ti = 0;
        while (ti < types.size()) {
            if (++pick[ti] < groups[ti]->elements().size()) break;
            pick[ti] = 0;
            ++ti;
        }
        if (ti == types.size()) break;
        if (types.empty()) break;
    }
    if (terms.empty()) return makeInt(1);  // scalar variable: dx/dx = 1
    ExprPtr sum = makeSum(std::move(terms));
    return scale(sum, Complex(Rational(1, count)));
}

ExprPtr diffNode(const ExprPtr& e, const DiffVar& var, const TransformationPtr& nested);

ExprPtr applyNested(const ExprPtr& e, const TransformationPtr& nested) {
    return nested ? nested->apply(e) : e;
}

bool dependsOn(const ExprPtr& e, NameId name) {
    bool found = false;
    switch (e->kind()) {
        case Kind::SimpleTensor:
            return as<SimpleTensorExpr>(e)->name() == name;
        case Kind::TensorField: {
            auto* f = as<TensorFieldExpr>(e);
            if (f->name() == name) return true;
            for (auto& a : f->args())
                if (dependsOn(a, name)) return true;
            return false;
        }
        default:
            for (size_t i = 0; i < e->size(); ++i)
                if (dependsOn(e->child(i), name)) found = true;
            return found;
    }
}

ExprPtr diffFunction(const ScalarFunctionExpr* f, const DiffVar& var,
                     const TransformationPtr& nested) {
    ExprPtr u = f->arg();
    ExprPtr du = diffNode(u, var, nested);
    if (du->isZero()) return makeInt(0);
    ExprPtr outer;
    switch (f->fn()) {
        case FunctionKind::Sin: outer = makeScalarFunction(FunctionKind::Cos, u); break;
        case FunctionKind::Cos:
            outer = negate(makeScalarFunction(FunctionKind::Sin, u));
            break;
        case FunctionKind::Tan:
            outer = makeSum({makeInt(1), makePower(makeScalarFunction(FunctionKind::Tan, u),
                                                   makeInt(2))});
            break;
        case FunctionKind::Cot:
            outer = negate(makeSum(
                {makeInt(1), makePower(makeScalarFunction(FunctionKind::Cot, u), makeInt(2))}));
            break;
        case FunctionKind::Exp: outer = makeScalarFunction(FunctionKind::Exp, u); break;
        case FunctionKind::Log: outer = makePower(u, makeInt(-1)); break;
        case FunctionKind::ArcSin:
            outer = makePower(makeSum({makeInt(1), negate(makePower(u, makeInt(2)))}),
                              makeNumber(Complex(Rational(-1, 2))));
            break;
        case FunctionKind::ArcCos:
            outer = negate(makePower(makeSum({makeInt(1), negate(makePower(u, makeInt(2)))}),
                                     makeNumber(Complex(Rational(-1, 2)))));
            break;
        case FunctionKind::ArcTan:
            outer = makePower(makeSum({makeInt(1), makePower(u, makeInt(2))}), makeInt(-1));
            break;
        case FunctionKind::ArcCot:
            outer = negate(
                makePower(makeSum({makeInt(1), makePower(u, makeInt(2))}), makeInt(-1)));
            break;
    }
    return makeProduct({outer, du});
}

ExprPtr diffNode(const ExprPtr& e, const DiffVar& var, const TransformationPtr& nested) {
    switch (e->kind()) {
        case Kind::Number:
            return makeInt(0);
        case Kind::SimpleTensor: {
            auto* t = as<SimpleTensorExpr>(e);
            if (t->name() != var.tensor->name()) return makeInt(0);
            return symmetrizedDelta(t, var);
        }
        case Kind::TensorField: {
            if (dependsOn(e, var.tensor->name()))
                throw Error(ErrorKind::Unsupported,
                            "cannot differentiate a tensor field with respect to its argument");
            return makeInt(0);
        }
        case Kind::Sum: {
            std::vector<ExprPtr> terms;
            for (auto& t : as<SumExpr>(e)->terms()) {
                ExprPtr d = diffNode(t, var, nested);
                if (!d->isZero()) terms.push_back(d);
            }
            return applyNested(makeSum(std::move(terms)), nested);
        }
        case Kind::Product: {
            auto* p = as<ProductExpr>(e);
            std::vector<ExprPtr> terms;
            for (size_t i = 0; i < p->factors().size(); ++i) {
                if (!dependsOn(p->factors()[i], var.tensor->name())) continue;
                ExprPtr d = diffNode(p->factors()[i], var, nested);
                if (d->isZero()) continue;
                std::vector<ExprPtr> fs;
                for (size_t j = 0; j < p->factors().size(); ++j)
                    if (j != i) fs.push_back(p->factors()[j]);
                fs.push_back(d);
                terms.push_back(applyNested(makeProduct(std::move(fs), p->scalarFactor()),
                                            nested));
            }
            return makeSum(std::move(terms));
        }
        case Kind::Power: {
            auto* p = as<PowerExpr>(e);
            std::vector<ExprPtr> terms;
            if (dependsOn(p->base(), var.tensor->name())) {
                ExprPtr db = diffNode(p->base(), var, nested);
                if (!db->isZero()) {
                    ExprPtr em1 = makeSum({p->exponent(), makeInt(-1)});
                    terms.push_back(makeProduct(
                        {p->exponent(), makePower(p->base(), em1), db}));
                }
            }
            if (dependsOn(p->exponent(), var.tensor->name())) {
                ExprPtr de = diffNode(p->exponent(), var, nested);
                if (!de->isZero())
                    terms.push_back(makeProduct(
                        {e, makeScalarFunction(FunctionKind::Log, p->base()), de}));
            }
            return applyNested(makeSum(std::move(terms)), nested);
        }
        case Kind::ScalarFunction:
            return applyNested(diffFunction(as<ScalarFunctionExpr>(e), var, nested), nested);
        case Kind::Rule: {
            auto* r = as<RuleExpr>(e);
            return makeRule(r->lhs(), diffNode(r->rhs(), var, nested));
        }
    }
    return makeInt(0);
}

}  // namespace

ExprPtr differentiate(const ExprPtr& target, const std::vector<ExprPtr>& vars,
                      const TransformationPtr& nested) {
    ExprPtr current = target;
    for (auto& v : vars) {
        const SimpleTensorExpr* st = as<SimpleTensorExpr>(v);
        if (!st)
            throw Error(ErrorKind::Unsupported,
                        "differentiation variable must be a simple tensor");
        // the variable's index names must not collide with the target's dummies
        std::set<uint32_t> varNames;
        for (auto c : st->indices()) varNames.insert(c.nameWithType());
        ExprPtr prepared = renameDummiesAvoiding(current, varNames);
        DiffVar dv{st, v};
        current = applyNested(diffNode(prepared, dv, nested), nested);
    }
    return current;
}

}  // namespace tk
