#include <algorithm>

#include "tensorkit/mapping.hpp"
#include "tensorkit/transforms.hpp"

namespace tk {

namespace {

constexpr int kSaturationCap = 256;

std::set<uint32_t> namesOf(const ExprPtr& e) {
    std::set<uint32_t> s;
    collectAllNamesDeep(e, s);
    return s;
}

// ---- formal tensor-field matching ----

struct FieldRule {
    const TensorFieldExpr* lhs;
    ExprPtr rhs;
};

struct FormalBinding {
    ExprPtr actual;
    Indices actualBinding;  // positional correspondence to the formal's slots
};

// formal parameters of a field l.h.s.: every argument must be a simple tensor
bool extractFormals(const TensorFieldExpr* lhs, std::vector<const SimpleTensorExpr*>& formals) {
    for (auto& a : lhs->args()) {
        auto* st = as<SimpleTensorExpr>(a);
        if (!st) return false;
        formals.push_back(st);
    }
    return true;
}

bool sameTypeSignature(const Indices& formal, const Indices& actual) {
    std::map<IndexType, int> cf, ca;
    std::map<IndexType, int> sf, sa;  // per-state for matrix types
    for (auto c : formal) {
        ++cf[c.type()];
        if (isMatrixType(c.type())) ++sf[c.type()] += c.upper() ? 1 : 0;
    }
    for (auto c : actual) {
        ++ca[c.type()];
        if (isMatrixType(c.type())) ++sa[c.type()] += c.upper() ? 1 : 0;
    }
    return cf == ca && sf == sa;
}

// match a field factor against a field l.h.s.; on success returns the mapping
// of the l.h.s.' own indices and the formal bindings
bool matchFieldAgainst(const TensorFieldExpr* lhs, const TensorFieldExpr* target,
                       Mapping& mappingOut,
                       std::map<NameId, FormalBinding>& bindingsOut) {
    if (lhs->name() != target->name()) return false;
    std::vector<const SimpleTensorExpr*> formals;
    if (!extractFormals(lhs, formals)) return false;
    if (lhs->indices().size() != target->indices().size()) return false;

    // the field's own indices map slotwise (fields rarely carry declared
    // symmetries; the identity slot assignment is used)
    Mapping m;
    for (size_t i = 0; i < lhs->indices().size(); ++i) {
        IndexCode from = lhs->indices()[i], to = target->indices()[i];
        if (from.type() != to.type()) return false;
        if (from.upper() != to.upper() && !isMetricType(from.type())) return false;
        auto it = m.entries.find(from);
        if (it != m.entries.end() && !(it->second == to)) return false;
        m.entries[from] = to;
    }

    std::map<NameId, FormalBinding> bindings;
    for (size_t i = 0; i < formals.size(); ++i) {
        const SimpleTensorExpr* f = formals[i];
        const ExprPtr& actual = target->args()[i];
        Indices actualBinding = target->effectiveBinding(i);
        if (!sameTypeSignature(f->indices(), actualBinding)) return false;
        auto it = bindings.find(f->name());
        if (it != bindings.end()) {
            // a repeated formal must bind to the identical argument
            if (!structuralEqual(it->second.actual, actual)) return false;
            if (!(it->second.actualBinding == actualBinding)) return false;
        } else {
            bindings[f->name()] = {actual, actualBinding};
        }
    }
    mappingOut = m;
    bindingsOut = bindings;
    return true;
}

// instantiate the r.h.s.: formal occurrences are replaced by the bound
// arguments with their binding indices renamed onto the occurrence's slots
ExprPtr instantiateFieldRhs(const ExprPtr& rhs, const Mapping& ownMapping,
                            const std::map<NameId, FormalBinding>& bindings,
                            std::set<uint32_t>& forbidden) {
    for (auto& [id, b] : bindings) {
        (void)id;
        auto n = namesOf(b.actual);
        forbidden.insert(n.begin(), n.end());
    }
    ExprPtr mapped = applyMapping(ownMapping, rhs, forbidden);
    {
        auto n = namesOf(mapped);
        forbidden.insert(n.begin(), n.end());
    }
    return transformParentAfterChild(
        mapped, enterEverywhere(), [&](const ExprPtr& node) -> ExprPtr {
            auto* st = as<SimpleTensorExpr>(node);
            if (!st) return node;
            auto it = bindings.find(st->name());
            if (it == bindings.end()) return node;
            const FormalBinding& b = it->second;
            // rename the actual's binding indices onto this occurrence's slots
            Mapping ren;
            for (size_t k = 0; k < b.actualBinding.size(); ++k)
                ren.entries[b.actualBinding[k]] = st->indices()[k];
            ExprPtr inst = applyMapping(ren, b.actual, forbidden);
            auto n = namesOf(inst);
            forbidden.insert(n.begin(), n.end());
            return inst;
        });
}

// ---- one substitution pass over one node ----

struct RuleView {
    ExprPtr rule;
    ExprPtr lhs, rhs;
    Kind lhsKind;
    Complex lhsCoeff;
    std::vector<ExprPtr> lhsFactors;
};

RuleView makeView(const ExprPtr& rule) {
    auto* r = as<RuleExpr>(rule);
    if (!r) throw Error(ErrorKind::MalformedRule, "substitution expects an expression lhs = rhs");
    RuleView v;
    v.rule = rule;
    v.lhs = r->lhs();
    v.rhs = r->rhs();
    v.lhsKind = v.lhs->kind();
    decomposeFactors(v.lhs, v.lhsCoeff, v.lhsFactors);
    return v;
}

// protection bookkeeping for simultaneous rule sets: outputs of one rule must
// not be re-matched by sibling rules in the same pass
struct Protection {
    std::set<const Expr*> nodes;
    bool covers(const ExprPtr& e) const { return nodes.count(e.get()) != 0; }
    void add(const ExprPtr& e) {
        nodes.insert(e.get());
        Complex c;
        std::vector<ExprPtr> fs;
        decomposeFactors(e, c, fs);
        for (auto& f : fs) nodes.insert(f.get());
        for (auto& t : termsOf(e)) nodes.insert(t.get());
    }
};

// substitution where the l.h.s. is a tensor field with formal arguments
ExprPtr applyFieldRuleAt(const RuleView& v, const ExprPtr& node, bool& changed,
                         Protection* prot) {
    auto* lf = as<TensorFieldExpr>(v.lhs);
    auto tryOne = [&](const ExprPtr& f, const ExprPtr& context) -> ExprPtr {
        if (prot && prot->covers(f)) return nullptr;
        auto* tf = as<TensorFieldExpr>(f);
        if (!tf) return nullptr;
        Mapping m;
        std::map<NameId, FormalBinding> bindings;
        if (!matchFieldAgainst(lf, tf, m, bindings)) return nullptr;
        std::set<uint32_t> forbidden = namesOf(context);
        return instantiateFieldRhs(v.rhs, m, bindings, forbidden);
    };
    if (node->kind() == Kind::TensorField) {
        if (ExprPtr r = tryOne(node, node)) {
            changed = true;
            if (prot) prot->add(r);
            return r;
        }
        return node;
    }
    if (node->kind() != Kind::Product) return node;
    auto* p = as<ProductExpr>(node);
    std::vector<ExprPtr> factors = p->factors();
    bool any = false;
    for (auto& f : factors) {
        if (ExprPtr r = tryOne(f, node)) {
            if (prot) prot->add(r);
            f = r;
            any = true;
        }
    }
    if (!any) return node;
    changed = true;
    return makeProduct(std::move(factors), p->scalarFactor());
}

// l.h.s. is a product (or a single tensor treated as a one-factor product)
ExprPtr applyProductRuleAt(const RuleView& v, const ExprPtr& node, bool& changed,
                           Protection* prot) {
    if (node->kind() != Kind::Product && node->kind() != Kind::SimpleTensor &&
        node->kind() != Kind::TensorField)
        return node;
    Complex tc;
    std::vector<ExprPtr> tf;
    decomposeFactors(node, tc, tf);
    if (v.lhsFactors.size() > tf.size()) return node;

    std::optional<SubProductMatch> found;
    enumerateSubProductMatches(v.lhsFactors, v.lhsCoeff, node, [&](const SubProductMatch& m) {
        if (prot)
            for (auto j : m.factorSubset)
                if (prot->nodes.count(tf[j].get())) return true;  // keep searching
        found = m;
        return false;
    });
    if (!found) return node;
    changed = true;

    std::set<uint32_t> forbidden = namesOf(node);
    ExprPtr rhsApplied = applyMapping(found->mapping, v.rhs, forbidden);
    if (prot) prot->add(rhsApplied);
    std::vector<ExprPtr> rest;
    std::set<size_t> used(found->factorSubset.begin(), found->factorSubset.end());
    for (size_t i = 0; i < tf.size(); ++i)
        if (!used.count(i)) rest.push_back(tf[i]);
    rest.push_back(rhsApplied);
    return makeProduct(std::move(rest), found->coefficientRatio);
}

// l.h.s. is a sum: a subset of the target sum's terms is replaced
ExprPtr applySumRuleAt(const RuleView& v, const ExprPtr& node, bool& changed, Protection* prot) {
    if (node->kind() != Kind::Sum) return node;
    auto* s = as<SumExpr>(node);
    std::optional<SubSumMatch> found;
    enumerateSubSumMatches(v.lhs, node, [&](const SubSumMatch& m) {
        if (prot)
            for (auto j : m.termSubset)
                if (prot->nodes.count(s->terms()[j].get())) return true;
        found = m;
        return false;
    });
    if (!found) return node;
    changed = true;
    std::set<uint32_t> forbidden = namesOf(node);
    ExprPtr rhsApplied = applyMapping(found->mapping, v.rhs, forbidden);
    ExprPtr scaled = scale(rhsApplied, found->ratio);
    if (prot) prot->add(scaled);
    std::set<size_t> used(found->termSubset.begin(), found->termSubset.end());
    std::vector<ExprPtr> terms;
    for (size_t i = 0; i < s->terms().size(); ++i)
        if (!used.count(i)) terms.push_back(s->terms()[i]);
    terms.push_back(scaled);
    return makeSum(std::move(terms));
}

// scalar l.h.s. (function, power, number): whole-node mapping match
ExprPtr applyScalarRuleAt(const RuleView& v, const ExprPtr& node, bool& changed,
                          Protection* prot) {
    if (node->kind() != v.lhsKind) return node;
    if (prot && prot->covers(node)) return node;
    auto m = firstMapping(v.lhs, node);
    if (!m) return node;
    changed = true;
    std::set<uint32_t> forbidden = namesOf(node);
    ExprPtr r = applyMapping(*m, v.rhs, forbidden);
    if (prot) prot->add(r);
    return r;
}

ExprPtr applyRuleAtNode(const RuleView& v, const ExprPtr& node, bool& changed,
                        Protection* prot) {
    switch (v.lhsKind) {
        case Kind::TensorField:
            return applyFieldRuleAt(v, node, changed, prot);
        case Kind::SimpleTensor:
        case Kind::Product:
            return applyProductRuleAt(v, node, changed, prot);
        case Kind::Sum:
            return applySumRuleAt(v, node, changed, prot);
        case Kind::ScalarFunction:
        case Kind::Power:
            return applyScalarRuleAt(v, node, changed, prot);
        default:
            throw Error(ErrorKind::MalformedRule,
                        "unsupported substitution l.h.s.; expected a tensor, field, "
                        "product, sum, function or power");
    }
}

ExprPtr saturateNode(const std::vector<RuleView>& rules, const ExprPtr& node) {
    ExprPtr current = node;
    for (int round = 0; round < kSaturationCap; ++round) {
        bool changed = false;
        for (auto& v : rules) {
            current = applyRuleAtNode(v, current, changed, nullptr);
            if (changed) break;  // rescan from the first rule on the rebuilt node
        }
        if (!changed) return current;
    }
    return current;
}

}  // namespace

ExprPtr substitute(const ExprPtr& rule, const ExprPtr& target) {
    std::vector<RuleView> views = {makeView(rule)};
    return transformParentAfterChild(target, enterEverywhere(), [&](const ExprPtr& n) {
        return saturateNode(views, n);
    });
}

ExprPtr substituteSimultaneous(const std::vector<ExprPtr>& rules, const ExprPtr& target) {
    std::vector<RuleView> views;
    for (auto& r : rules) views.push_back(makeView(r));
    // one pass; replacements are protected so sibling rules (and parent-level
    // re-matching) never act on rule outputs
    Protection prot;
    return transformParentAfterChild(target, enterEverywhere(), [&](const ExprPtr& n) {
        ExprPtr current = n;
        for (int round = 0; round < kSaturationCap; ++round) {
            bool changed = false;
            for (auto& v : views) {
                current = applyRuleAtNode(v, current, changed, &prot);
                if (changed) break;
            }
            if (!changed) break;
        }
        return current;
    });
}

}  // namespace tk
