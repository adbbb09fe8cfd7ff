#include "tensorkit/expr.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <sstream>

#include "tensorkit/mapping.hpp"
#include "tensorkit/printer.hpp"

namespace tk {

uint32_t hashMix(uint32_t h, uint32_t v) {
    h ^= v + 0x9e3779b9u + (h << 6) + (h >> 2);
    return h;
}

const char* functionName(FunctionKind k) {
    switch (k) {
        case FunctionKind::Sin: return "Sin";
        case FunctionKind::Cos: return "Cos";
        case FunctionKind::Tan: return "Tan";
        case FunctionKind::Cot: return "Cot";
        case FunctionKind::ArcSin: return "ArcSin";
        case FunctionKind::ArcCos: return "ArcCos";
        case FunctionKind::ArcTan: return "ArcTan";
        case FunctionKind::ArcCot: return "ArcCot";
        case FunctionKind::Log: return "Log";
        case FunctionKind::Exp: return "Exp";
    }
    return "?";
}

std::optional<FunctionKind> lookupFunction(const std::string& name) {
    static const std::map<std::string, FunctionKind> table = {
        {"Sin", FunctionKind::Sin},       {"Cos", FunctionKind::Cos},
        {"Tan", FunctionKind::Tan},       {"Cot", FunctionKind::Cot},
        {"ArcSin", FunctionKind::ArcSin}, {"ArcCos", FunctionKind::ArcCos},
        {"ArcTan", FunctionKind::ArcTan}, {"ArcCot", FunctionKind::ArcCot},
        {"Log", FunctionKind::Log},       {"Exp", FunctionKind::Exp}};
    auto it = table.find(name);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

int functionParity(FunctionKind k) {
    switch (k) {
        case FunctionKind::Sin:
        case FunctionKind::Tan:
        case FunctionKind::Cot:
        case FunctionKind::ArcSin:
        case FunctionKind::ArcTan:
        case FunctionKind::ArcCot:
            return -1;
        case FunctionKind::Cos:
            return 1;
        default:
            return 0;
    }
}

std::string Expr::toString() const { return printExpr(this, OutputFormat::Redberry); }

bool Expr::isZero() const {
    auto* n = as<NumberExpr>(this);
    return n && n->value().isZero();
}

bool Expr::isOne() const {
    auto* n = as<NumberExpr>(this);
    return n && n->value().isOne();
}

// ---------------- node constructors ----------------

NumberExpr::NumberExpr(Complex v) : Expr(Kind::Number), value_(std::move(v)) {
    // sign of the value must not influence the hash: a term and its negation
    // have to land in the same merge bucket
    Complex abs = value_;
    if (!value_.isFloat() && (value_.re() < 0 || (value_.re() == 0 && value_.im() < 0)))
        abs = -value_;
    hash_ = hashMix(0x6e624eb7u, abs.hash());
}

SimpleTensorExpr::SimpleTensorExpr(NameId name, Indices indices)
    : Expr(Kind::SimpleTensor), name_(name) {
    indices_ = std::move(indices);
    free_ = indices_.free();
    uint32_t h = hashMix(0x51ed270bu, Context::get().nameHash(name));
    // self-contraction structure, orbit-coarsened so that symmetric slots do
    // not distinguish the pattern
    std::map<uint32_t, std::vector<uint32_t>> pairSlots;
    for (uint32_t i = 0; i < indices_.size(); ++i)
        pairSlots[indices_[i].nameWithType()].push_back(i);
    std::vector<uint32_t> pairHashes;
    for (auto& [nt, slots] : pairSlots) {
        if (slots.size() != 2) continue;
        IndexType t = IndexCode(nt).type();
        auto orbits = Context::get().symmetries(name, t).slotOrbits();
        auto withinType = [&](uint32_t global) {
            int k = 0;
            for (uint32_t i = 0; i < global; ++i)
                if (indices_[i].type() == t) ++k;
            return k;
        };
        uint32_t a = orbits.empty() ? 0u : static_cast<uint32_t>(orbits[withinType(slots[0])]);
        uint32_t b = orbits.empty() ? 0u : static_cast<uint32_t>(orbits[withinType(slots[1])]);
        if (a > b) std::swap(a, b);
        pairHashes.push_back(hashMix(hashMix(static_cast<uint32_t>(t), a), b));
    }
    std::sort(pairHashes.begin(), pairHashes.end());
    for (auto p : pairHashes) h = hashMix(h, p);
    hash_ = h;
}

TensorFieldExpr::TensorFieldExpr(NameId name, Indices indices, std::vector<ExprPtr> args,
                                 std::vector<Indices> bindings)
    : Expr(Kind::TensorField), name_(name), args_(std::move(args)), bindings_(std::move(bindings)) {
    indices_ = std::move(indices);
    free_ = indices_.free();
    uint32_t h = hashMix(0x7a3f9d21u, Context::get().nameHash(name));
    for (auto& a : args_) h = hashMix(h, a->hash());
    hash_ = h;
}

Indices TensorFieldExpr::effectiveBinding(size_t i) const {
    if (i < bindings_.size() && !bindings_[i].empty()) return bindings_[i];
    return args_.at(i)->freeIndices();
}

ProductExpr::ProductExpr(Complex factor, std::vector<ExprPtr> factors)
    : Expr(Kind::Product), factor_(std::move(factor)), factors_(std::move(factors)) {
    std::vector<IndexCode> all;
    for (auto& f : factors_)
        for (auto c : f->indices()) all.push_back(c);
    indices_ = Indices::sorted(std::move(all));
    free_ = indices_.free();
    hash_ = productContentHash(factors_);
}

size_t ProductExpr::size() const { return factors_.size() + (factor_.isOne() ? 0 : 1); }

ExprPtr ProductExpr::child(size_t i) const {
    if (i >= size()) throw Error(ErrorKind::IndexOutOfRange, "product child out of range");
    if (!factor_.isOne()) {
        if (i == 0) return makeNumber(factor_);
        return factors_[i - 1];
    }
    return factors_[i];
}

namespace {
uint32_t sumTermOrderHash(const ExprPtr& t) {
    Complex c;
    std::vector<ExprPtr> scalars, indexed;
    decomposeTerm(t, c, scalars, indexed);
    std::vector<ExprPtr> kernel = std::move(scalars);
    for (auto& e : indexed) kernel.push_back(e);
    return kernel.empty() ? 0x11u : productContentHash(kernel);
}
}  // namespace

SumExpr::SumExpr(std::vector<ExprPtr> terms) : Expr(Kind::Sum), terms_(std::move(terms)) {
    std::vector<IndexCode> f;
    for (auto c : terms_.front()->freeIndices()) f.push_back(c);
    indices_ = Indices::sorted(std::move(f));
    free_ = indices_;
    uint32_t h = 0x2b1e8c4du;
    std::vector<uint32_t> th;
    for (auto& t : terms_) th.push_back(sumTermOrderHash(t));
    std::sort(th.begin(), th.end());
    for (auto v : th) h = hashMix(h, v);
    hash_ = h;
}

PowerExpr::PowerExpr(ExprPtr base, ExprPtr exp)
    : Expr(Kind::Power), base_(std::move(base)), exp_(std::move(exp)) {
    indices_ = Indices::sorted({});
    free_ = indices_;
    hash_ = hashMix(hashMix(0x3c6ef372u, base_->hash()), exp_->hash());
}

ExprPtr PowerExpr::child(size_t i) const {
    if (i == 0) return base_;
    if (i == 1) return exp_;
    throw Error(ErrorKind::IndexOutOfRange, "power has two children");
}

ScalarFunctionExpr::ScalarFunctionExpr(FunctionKind fn, ExprPtr arg)
    : Expr(Kind::ScalarFunction), fn_(fn), arg_(std::move(arg)) {
    indices_ = Indices::sorted({});
    free_ = indices_;
    hash_ = hashMix(hashMix(0x9e3779b9u, static_cast<uint32_t>(fn_) * 2654435761u), arg_->hash());
}

ExprPtr ScalarFunctionExpr::child(size_t i) const {
    if (i == 0) return arg_;
    throw Error(ErrorKind::IndexOutOfRange, "function has one child");
}

RuleExpr::RuleExpr(ExprPtr lhs, ExprPtr rhs)
    : Expr(Kind::Rule), lhs_(std::move(lhs)), rhs_(std::move(rhs)) {
    indices_ = lhs_->freeIndices();
    free_ = indices_;
    hash_ = hashMix(hashMix(0x85ebca6bu, lhs_->hash()), rhs_->hash());
}

ExprPtr RuleExpr::child(size_t i) const {
    if (i == 0) return lhs_;
    if (i == 1) return rhs_;
    throw Error(ErrorKind::IndexOutOfRange, "rule has two children");
}

// raw constructor access for the builders in this translation unit
struct Builders {
    static ExprPtr number(Complex v) { return ExprPtr(new NumberExpr(std::move(v))); }
    static ExprPtr simple(NameId n, Indices i) { return ExprPtr(new SimpleTensorExpr(n, std::move(i))); }
    static ExprPtr field(NameId n, Indices i, std::vector<ExprPtr> a, std::vector<Indices> b) {
        return ExprPtr(new TensorFieldExpr(n, std::move(i), std::move(a), std::move(b)));
    }
    static ExprPtr product(Complex c, std::vector<ExprPtr> f) {
        return ExprPtr(new ProductExpr(std::move(c), std::move(f)));
    }
    static ExprPtr sum(std::vector<ExprPtr> t) { return ExprPtr(new SumExpr(std::move(t))); }
    static ExprPtr power(ExprPtr b, ExprPtr e) {
        return ExprPtr(new PowerExpr(std::move(b), std::move(e)));
    }
    static ExprPtr fn(FunctionKind k, ExprPtr a) {
        return ExprPtr(new ScalarFunctionExpr(k, std::move(a)));
    }
    static ExprPtr rule(ExprPtr l, ExprPtr r) {
        return ExprPtr(new RuleExpr(std::move(l), std::move(r)));
    }
};

ExprPtr rawProductView(std::vector<ExprPtr> factors, Complex coeff) {
    if (factors.size() == 1 && coeff.isOne()) return factors[0];
    if (factors.empty()) return Builders::number(coeff);
    return Builders::product(std::move(coeff), std::move(factors));
}

// ---------------- content hash (graph refinement) ----------------

namespace {

// slot class of the index at position `slot` of a factor: orbit of its
// per-type symmetry group, so symmetric slots are merged
uint32_t slotClass(const ExprPtr& f, size_t slot) {
    NameId name;
    if (auto* st = as<SimpleTensorExpr>(f))
        name = st->name();
    else if (auto* tf = as<TensorFieldExpr>(f))
        name = tf->name();
    else
        return hashMix(0xabcdu, static_cast<uint32_t>(f->indices()[slot].type()));
    IndexType t = f->indices()[slot].type();
    int within = 0;
    for (size_t i = 0; i < slot; ++i)
        if (f->indices()[i].type() == t) ++within;
    auto orbits = Context::get().symmetries(name, t).slotOrbits();
    uint32_t orbit = within < static_cast<int>(orbits.size())
                         ? static_cast<uint32_t>(orbits[within])
                         : 0u;
    return hashMix(hashMix(0x517cc1b7u, static_cast<uint32_t>(t)), orbit);
}

}  // namespace

uint32_t productContentHash(const std::vector<ExprPtr>& factors) {
    if (factors.empty()) return 0x11u;
    if (factors.size() == 1 && factors[0]->indices().dummyNames().empty())
        return factors[0]->hash();

    size_t n = factors.size();
    std::vector<uint32_t> h(n);
    for (size_t i = 0; i < n; ++i) h[i] = factors[i]->hash();

    std::map<uint32_t, std::vector<std::pair<size_t, size_t>>> occ;
    for (size_t i = 0; i < n; ++i)
        for (size_t s = 0; s < factors[i]->indices().size(); ++s)
            occ[factors[i]->indices()[s].nameWithType()].push_back({i, s});

    struct Edge {
        size_t a, b;  // b == SIZE_MAX: free-index edge to the '-' vertex
        uint32_t label;
    };
    std::vector<Edge> edges;
    for (auto& [nt, v] : occ) {
        uint32_t typeH = static_cast<uint32_t>(IndexCode(nt).type()) * 0x45d9f3bu;
        if (v.size() == 2) {
            uint32_t ca = slotClass(factors[v[0].first], v[0].second);
            uint32_t cb = slotClass(factors[v[1].first], v[1].second);
            if (ca > cb) std::swap(ca, cb);
            edges.push_back({v[0].first, v[1].first, hashMix(hashMix(typeH, ca), cb)});
        } else {
            uint32_t ca = slotClass(factors[v[0].first], v[0].second);
            edges.push_back({v[0].first, SIZE_MAX, hashMix(hashMix(0xfeedu, typeH), ca)});
        }
    }

    size_t rounds = std::min<size_t>(n, 6);
    for (size_t r = 0; r < rounds; ++r) {
        std::vector<std::vector<uint32_t>> inc(n);
        for (auto& e : edges) {
            if (e.b == SIZE_MAX) {
                inc[e.a].push_back(hashMix(e.label, 0x2d5u));
            } else {
                inc[e.a].push_back(hashMix(e.label, h[e.b]));
                if (e.b != e.a) inc[e.b].push_back(hashMix(e.label, h[e.a]));
            }
        }
        std::vector<uint32_t> next(n);
        for (size_t i = 0; i < n; ++i) {
            std::sort(inc[i].begin(), inc[i].end());
            uint32_t v = h[i];
            for (auto x : inc[i]) v = hashMix(v, x);
            next[i] = v;
        }
        h = std::move(next);
    }
    std::sort(h.begin(), h.end());
    uint32_t result = 0x811c9dc5u;
    for (auto v : h) result = hashMix(result, v);
    return result;
}

// ---------------- structural comparison ----------------

int structuralCompare(const ExprPtr& a, const ExprPtr& b) {
    if (a.get() == b.get()) return 0;
    if (a->kind() != b->kind())
        return static_cast<int>(a->kind()) < static_cast<int>(b->kind()) ? -1 : 1;
    auto cmpIndices = [](const Indices& x, const Indices& y) -> int {
        if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
        // type/state pattern first, concrete names only as the last resort
        for (size_t i = 0; i < x.size(); ++i) {
            uint32_t px = x[i].raw() >> 24, py = y[i].raw() >> 24;
            if (px != py) return px < py ? -1 : 1;
        }
        for (size_t i = 0; i < x.size(); ++i)
            if (x[i].raw() != y[i].raw()) return x[i].raw() < y[i].raw() ? -1 : 1;
        return 0;
    };
    switch (a->kind()) {
        case Kind::Number: {
            auto &x = as<NumberExpr>(a)->value(), &y = as<NumberExpr>(b)->value();
            if (x == y) return 0;
            auto dx = x.toDouble(), dy = y.toDouble();
            if (dx.real() != dy.real()) return dx.real() < dy.real() ? -1 : 1;
            if (dx.imag() != dy.imag()) return dx.imag() < dy.imag() ? -1 : 1;
            return x.isFloat() ? 1 : -1;
        }
        case Kind::SimpleTensor: {
            auto *x = as<SimpleTensorExpr>(a), *y = as<SimpleTensorExpr>(b);
            if (x->name() != y->name()) return x->name() < y->name() ? -1 : 1;
            return cmpIndices(x->indices(), y->indices());
        }
        case Kind::TensorField: {
            auto *x = as<TensorFieldExpr>(a), *y = as<TensorFieldExpr>(b);
            if (x->name() != y->name()) return x->name() < y->name() ? -1 : 1;
            if (x->args().size() != y->args().size())
                return x->args().size() < y->args().size() ? -1 : 1;
            if (int c = cmpIndices(x->indices(), y->indices())) return c;
            for (size_t i = 0; i < x->args().size(); ++i)
                if (int c = structuralCompare(x->args()[i], y->args()[i])) return c;
            return 0;
        }
        case Kind::Product: {
            auto *x = as<ProductExpr>(a), *y = as<ProductExpr>(b);
            if (x->factors().size() != y->factors().size())
                return x->factors().size() < y->factors().size() ? -1 : 1;
            for (size_t i = 0; i < x->factors().size(); ++i)
                if (int c = structuralCompare(x->factors()[i], y->factors()[i])) return c;
            return structuralCompare(makeNumber(x->scalarFactor()),
                                     makeNumber(y->scalarFactor()));
        }
        case Kind::Sum: {
            auto *x = as<SumExpr>(a), *y = as<SumExpr>(b);
            if (x->terms().size() != y->terms().size())
                return x->terms().size() < y->terms().size() ? -1 : 1;
            for (size_t i = 0; i < x->terms().size(); ++i)
                if (int c = structuralCompare(x->terms()[i], y->terms()[i])) return c;
            return 0;
        }
        case Kind::Power: {
            auto *x = as<PowerExpr>(a), *y = as<PowerExpr>(b);
            if (int c = structuralCompare(x->base(), y->base())) return c;
            return structuralCompare(x->exponent(), y->exponent());
        }
        case Kind::ScalarFunction: {
            auto *x = as<ScalarFunctionExpr>(a), *y = as<ScalarFunctionExpr>(b);
            if (x->fn() != y->fn())
                return static_cast<int>(x->fn()) < static_cast<int>(y->fn()) ? -1 : 1;
            return structuralCompare(x->arg(), y->arg());
        }
        case Kind::Rule: {
            auto *x = as<RuleExpr>(a), *y = as<RuleExpr>(b);
            if (int c = structuralCompare(x->lhs(), y->lhs())) return c;
            return structuralCompare(x->rhs(), y->rhs());
        }
    }
    return 0;
}

bool structuralEqual(const ExprPtr& a, const ExprPtr& b) { return structuralCompare(a, b) == 0; }

// ---------------- utilities ----------------

void decomposeFactors(const ExprPtr& e, Complex& coeff, std::vector<ExprPtr>& factors) {
    factors.clear();
    if (auto* p = as<ProductExpr>(e)) {
        coeff = p->scalarFactor();
        factors = p->factors();
    } else if (auto* nu = as<NumberExpr>(e)) {
        coeff = nu->value();
    } else {
        coeff = Complex(1);
        factors = {e};
    }
}

void decomposeTerm(const ExprPtr& e, Complex& coeff, std::vector<ExprPtr>& scalars,
                   std::vector<ExprPtr>& indexed) {
    std::vector<ExprPtr> factors;
    decomposeFactors(e, coeff, factors);
    scalars.clear();
    indexed.clear();
    for (auto& f : factors) {
        if (f->indices().empty())
            scalars.push_back(f);
        else
            indexed.push_back(f);
    }
}

std::vector<ExprPtr> termsOf(const ExprPtr& e) {
    if (auto* s = as<SumExpr>(e)) return s->terms();
    return {e};
}

ExprPtr negate(const ExprPtr& e) { return scale(e, Complex(-1)); }

ExprPtr scale(const ExprPtr& e, const Complex& c) {
    if (c.isOne()) return e;
    if (c.isZero()) return makeInt(0);
    if (auto* s = as<SumExpr>(e)) {
        std::vector<ExprPtr> terms;
        for (auto& t : s->terms()) terms.push_back(scale(t, c));
        return makeSum(std::move(terms));
    }
    Complex coeff;
    std::vector<ExprPtr> factors;
    decomposeFactors(e, coeff, factors);
    return makeProduct(std::move(factors), coeff * c);
}

ExprPtr makeMetric(IndexCode a, IndexCode b) {
    NameId id = isMatrixType(a.type()) ? Context::get().matrixDeltaName(a.type())
                                       : Context::get().metricName(a.type());
    return makeSimpleTensor(id, Indices::ordered({a, b}));
}

void collectAllNamesDeep(const ExprPtr& e, std::set<uint32_t>& names) {
    for (auto c : e->indices()) names.insert(c.nameWithType());
    switch (e->kind()) {
        case Kind::Sum:
        case Kind::Product:
        case Kind::Power:
        case Kind::ScalarFunction:
        case Kind::Rule:
            for (size_t i = 0; i < e->size(); ++i) collectAllNamesDeep(e->child(i), names);
            break;
        case Kind::TensorField:
            // argument scopes are sealed; their names never clash with the
            // enclosing scope
            break;
        default:
            break;
    }
}

namespace {

Indices renameIndicesByName(const Indices& idx,
                            const std::map<uint32_t, std::pair<uint32_t, bool>>& nameMap) {
    std::vector<IndexCode> codes;
    codes.reserve(idx.size());
    for (auto c : idx.codes()) {
        auto it = nameMap.find(c.nameWithType());
        if (it != nameMap.end()) {
            bool up = it->second.second ? !c.upper() : c.upper();
            codes.push_back(IndexCode(it->second.first | (up ? 0x80000000u : 0u)));
        } else {
            codes.push_back(c);
        }
    }
    return idx.kind() == IndicesKind::Ordered ? Indices::ordered(std::move(codes))
                                              : Indices::sorted(std::move(codes));
}

}  // namespace

ExprPtr renameIndexNames(const ExprPtr& e,
                         const std::map<uint32_t, std::pair<uint32_t, bool>>& nameMap) {
    if (nameMap.empty()) return e;
    switch (e->kind()) {
        case Kind::Number:
            return e;
        case Kind::SimpleTensor: {
            auto* t = as<SimpleTensorExpr>(e);
            return makeSimpleTensor(t->name(), renameIndicesByName(t->indices(), nameMap));
        }
        case Kind::TensorField: {
            auto* t = as<TensorFieldExpr>(e);
            return makeTensorField(t->name(), renameIndicesByName(t->indices(), nameMap),
                                   t->args(), t->argBindings());
        }
        case Kind::Product: {
            auto* p = as<ProductExpr>(e);
            std::vector<ExprPtr> fs;
            for (auto& f : p->factors()) fs.push_back(renameIndexNames(f, nameMap));
            return makeProduct(std::move(fs), p->scalarFactor());
        }
        case Kind::Sum: {
            auto* s = as<SumExpr>(e);
            std::vector<ExprPtr> ts;
            for (auto& t : s->terms()) ts.push_back(renameIndexNames(t, nameMap));
            return makeSum(std::move(ts));
        }
        case Kind::Power: {
            auto* p = as<PowerExpr>(e);
            return makePower(renameIndexNames(p->base(), nameMap),
                             renameIndexNames(p->exponent(), nameMap));
        }
        case Kind::ScalarFunction: {
            auto* f = as<ScalarFunctionExpr>(e);
            return makeScalarFunction(f->fn(), renameIndexNames(f->arg(), nameMap));
        }
        case Kind::Rule: {
            auto* r = as<RuleExpr>(e);
            return makeRule(renameIndexNames(r->lhs(), nameMap),
                            renameIndexNames(r->rhs(), nameMap));
        }
    }
    return e;
}

ExprPtr renameDummiesAvoiding(const ExprPtr& e, const std::set<uint32_t>& forbidden) {
    std::set<uint32_t> all;
    collectAllNamesDeep(e, all);
    std::set<uint32_t> freeNames;
    for (auto c : e->freeIndices()) freeNames.insert(c.nameWithType());
    std::map<uint32_t, std::pair<uint32_t, bool>> nameMap;
    std::set<uint32_t> taken = all;
    taken.insert(forbidden.begin(), forbidden.end());
    for (auto nt : all) {
        if (freeNames.count(nt) || !forbidden.count(nt)) continue;
        IndexType t = IndexCode(nt).type();
        std::set<uint32_t> ordinals;
        for (auto x : taken)
            if (IndexCode(x).type() == t) ordinals.insert(IndexCode(x).name());
        uint32_t fresh = Context::get().nextName(t, ordinals);
        uint32_t freshNt = IndexCode(false, t, fresh).nameWithType();
        nameMap[nt] = {freshNt, false};
        taken.insert(freshNt);
    }
    return renameIndexNames(e, nameMap);
}

// ---------------- builders ----------------

ExprPtr makeNumber(Complex v) { return Builders::number(std::move(v)); }
ExprPtr makeInt(long v) { return makeNumber(Complex(v)); }

namespace {

void checkNoDuplicateCodes(const Indices& idx, const std::string& what) {
    std::set<uint32_t> seen;
    for (auto c : idx.codes())
        if (!seen.insert(c.raw()).second)
            throw Error(ErrorKind::InconsistentIndices,
                        "index " + c.toString() + " appears twice in " + what);
}

void markUsedShallow(const ExprPtr& e) {
    if (auto* t = as<SimpleTensorExpr>(e))
        Context::get().markUsed(t->name());
    else if (auto* f = as<TensorFieldExpr>(e))
        Context::get().markUsed(f->name());
}

bool mayHaveNegativeSelfMapping(const ExprPtr& e) {
    switch (e->kind()) {
        case Kind::SimpleTensor: {
            auto* t = as<SimpleTensorExpr>(e);
            for (auto& [ty, cnt] : Context::get().descriptor(t->name()).signature.slots) {
                (void)cnt;
                if (Context::get().symmetries(t->name(), ty).hasNegative()) return true;
            }
            return false;
        }
        case Kind::Product: {
            for (auto& f : as<ProductExpr>(e)->factors())
                if (mayHaveNegativeSelfMapping(f)) return true;
            return false;
        }
        case Kind::Sum: {
            for (auto& t : as<SumExpr>(e)->terms())
                if (mayHaveNegativeSelfMapping(t)) return true;
            return false;
        }
        case Kind::Power:
            return mayHaveNegativeSelfMapping(as<PowerExpr>(e)->base());
        case Kind::ScalarFunction:
            return mayHaveNegativeSelfMapping(as<ScalarFunctionExpr>(e)->arg());
        default:
            return false;
    }
}

}  // namespace

ExprPtr makeSimpleTensor(NameId name, Indices indices) {
    checkNoDuplicateCodes(indices, "'" + Context::get().descriptor(name).base + "'");
    ExprPtr node = Builders::simple(name, std::move(indices));
    // a self-contracted pair sitting on antisymmetric slots vanishes
    if (!node->indices().dummyNames().empty() && mayHaveNegativeSelfMapping(node) &&
        vanishesBySymmetry({node}))
        return makeInt(0);
    return node;
}

ExprPtr makeTensorField(NameId name, Indices indices, std::vector<ExprPtr> args,
                        std::vector<Indices> bindings) {
    checkNoDuplicateCodes(indices, "'" + Context::get().descriptor(name).base + "'");
    for (size_t i = 0; i < bindings.size(); ++i) {
        if (bindings[i].empty()) continue;
        if (i >= args.size() || bindings[i].size() != args[i]->freeIndices().size())
            throw Error(ErrorKind::MalformedRule,
                        "argument binding does not cover the argument's free indices");
    }
    for (auto& a : args) markUsedShallow(a);
    return Builders::field(name, std::move(indices), std::move(args), std::move(bindings));
}

ExprPtr makeScalarFunction(FunctionKind fn, ExprPtr arg) {
    if (!arg->freeIndices().empty())
        throw Error(ErrorKind::ScalarFunctionIndexedArg,
                    std::string(functionName(fn)) + " argument must be scalar");
    if (auto* n = as<NumberExpr>(arg)) {
        const Complex& v = n->value();
        if (v.isFloat()) {
            auto z = v.toDouble();
            std::complex<double> r;
            switch (fn) {
                case FunctionKind::Sin: r = std::sin(z); break;
                case FunctionKind::Cos: r = std::cos(z); break;
                case FunctionKind::Tan: r = std::tan(z); break;
                case FunctionKind::Cot: r = 1.0 / std::tan(z); break;
                case FunctionKind::ArcSin: r = std::asin(z); break;
                case FunctionKind::ArcCos: r = std::acos(z); break;
                case FunctionKind::ArcTan: r = std::atan(z); break;
                case FunctionKind::ArcCot: r = std::atan(1.0 / z); break;
                case FunctionKind::Log: r = std::log(z); break;
                case FunctionKind::Exp: r = std::exp(z); break;
            }
            return makeNumber(Complex::fromDouble(r.real(), r.imag()));
        }
        if (v.isZero()) {
            switch (fn) {
                case FunctionKind::Sin:
                case FunctionKind::Tan:
                case FunctionKind::ArcSin:
                case FunctionKind::ArcTan:
                    return makeInt(0);
                case FunctionKind::Cos:
                case FunctionKind::Exp:
                    return makeInt(1);
                default:
                    break;
            }
        }
        if (v.isOne() && fn == FunctionKind::Log) return makeInt(0);
    }
    markUsedShallow(arg);
    return Builders::fn(fn, std::move(arg));
}

ExprPtr makeRule(ExprPtr lhs, ExprPtr rhs) {
    std::set<uint32_t> lhsFree;
    for (auto c : lhs->freeIndices()) lhsFree.insert(c.raw());
    for (auto c : rhs->freeIndices())
        if (!lhsFree.count(c.raw()))
            throw Error(ErrorKind::MalformedRule,
                        "free index " + c.toString() + " of the r.h.s. is not an l.h.s. index");
    return Builders::rule(std::move(lhs), std::move(rhs));
}

ExprPtr makePower(ExprPtr base, ExprPtr exponent) {
    if (!base->freeIndices().empty())
        throw Error(ErrorKind::IndexedBase, "power base carries free indices");
    if (!exponent->freeIndices().empty())
        throw Error(ErrorKind::IndexedBase, "power exponent carries free indices");

    auto* bn = as<NumberExpr>(base.get());
    auto* en = as<NumberExpr>(exponent.get());
    if (en) {
        const Complex& e = en->value();
        if (!e.isFloat()) {
            if (e.isZero()) return makeInt(1);
            if (e.isOne()) return base;
        }
        if (bn) {
            const Complex& b = bn->value();
            if (b.isFloat() || e.isFloat()) {
                auto z = std::pow(b.toDouble(), e.toDouble());
                return makeNumber(Complex::fromDouble(z.real(), z.imag()));
            }
            if (e.isRational()) {
                if (auto r = Complex::rationalPower(b, e.re())) return makeNumber(*r);
            }
            if (b.isZero()) return makeInt(0);
            if (b.isOne()) return makeInt(1);
        }
        if (e.isInteger()) {
            if (auto* bp = as<PowerExpr>(base.get())) {
                ExprPtr mergedExp = makeProduct({bp->exponent(), exponent});
                return makePower(bp->base(), mergedExp);
            }
            if (auto* pr = as<ProductExpr>(base.get())) {
                if (pr->indices().empty()) {
                    std::vector<ExprPtr> parts;
                    for (auto& f : pr->factors()) parts.push_back(makePower(f, exponent));
                    Complex c = pr->scalarFactor().pow(*e.asLong());
                    return makeProduct(std::move(parts), c);
                }
            }
        }
    }
    if (bn && bn->value().isOne()) return makeInt(1);
    markUsedShallow(base);
    markUsedShallow(exponent);
    return Builders::power(std::move(base), std::move(exponent));
}

ExprPtr makeProduct(std::vector<ExprPtr> inputs, Complex scalar) {
    Complex coeff = std::move(scalar);
    std::vector<ExprPtr> factors;
    for (auto& e : inputs) {
        if (auto* n = as<NumberExpr>(e)) {
            coeff = coeff * n->value();
        } else if (auto* p = as<ProductExpr>(e)) {
            coeff = coeff * p->scalarFactor();
            for (auto& f : p->factors()) factors.push_back(f);
        } else {
            factors.push_back(e);
        }
    }
    if (coeff.isZero()) return makeInt(0);

    // collect equal indexless factors into powers (up to sign)
    std::vector<ExprPtr> collected;
    struct PowEntry {
        ExprPtr base;
        std::vector<ExprPtr> exps;
        uint32_t hash;
    };
    std::vector<PowEntry> powers;
    for (auto& f : factors) {
        if (!f->indices().empty() || f->kind() == Kind::Rule) {
            collected.push_back(f);
            continue;
        }
        ExprPtr b = f;
        ExprPtr ex = makeInt(1);
        if (auto* p = as<PowerExpr>(f.get())) {
            b = p->base();
            ex = p->exponent();
        }
        uint32_t bh = b->hash();
        bool merged = false;
        for (auto& pe : powers) {
            if (pe.hash != bh) continue;
            auto delta = identityMappingSign(b, pe.base);
            if (!delta) continue;
            if (*delta == -1) {
                auto* exn = as<NumberExpr>(ex.get());
                if (!exn || !exn->value().isInteger()) continue;
                if (*exn->value().asLong() % 2 != 0) coeff = coeff * Complex(-1);
            }
            pe.exps.push_back(ex);
            merged = true;
            break;
        }
        if (!merged) powers.push_back({b, {ex}, bh});
    }
    for (auto& pe : powers) {
        ExprPtr totalExp = pe.exps.size() == 1 ? pe.exps[0] : makeSum(pe.exps);
        ExprPtr p = makePower(pe.base, totalExp);
        if (auto* n = as<NumberExpr>(p.get()))
            coeff = coeff * n->value();
        else
            collected.push_back(p);
    }
    factors = std::move(collected);
    if (coeff.isZero()) return makeInt(0);

    // Einstein validity across the whole factor list
    {
        std::set<uint32_t> seen;
        for (auto& f : factors)
            for (auto c : f->indices())
                if (!seen.insert(c.raw()).second)
                    throw Error(ErrorKind::InconsistentIndices,
                                "index " + c.toString() + " appears twice in product");
    }

    // relabel hidden-scope dummies of sum/power/function factors away from the
    // product pool and from each other
    {
        std::set<uint32_t> pool;
        for (auto& f : factors)
            for (auto c : f->indices()) pool.insert(c.nameWithType());
        for (auto& f : factors) {
            if (f->kind() != Kind::Sum && f->kind() != Kind::Power &&
                f->kind() != Kind::ScalarFunction)
                continue;
            std::set<uint32_t> inner;
            collectAllNamesDeep(f, inner);
            std::set<uint32_t> exposed;
            for (auto c : f->indices()) exposed.insert(c.nameWithType());
            bool clash = false;
            for (auto nt : inner)
                if (!exposed.count(nt) && pool.count(nt)) clash = true;
            if (clash) f = renameDummiesAvoiding(f, pool);
            std::set<uint32_t> inner2;
            collectAllNamesDeep(f, inner2);
            pool.insert(inner2.begin(), inner2.end());
        }
    }

    if (factors.empty()) return makeNumber(coeff);
    if (factors.size() == 1 && coeff.isOne()) return factors[0];

    std::sort(factors.begin(), factors.end(), [](const ExprPtr& a, const ExprPtr& b) {
        if (a->hash() != b->hash()) return a->hash() < b->hash();
        return structuralCompare(a, b) < 0;
    });

    for (auto& f : factors) markUsedShallow(f);
    bool negatable = false;
    for (auto& f : factors)
        if (mayHaveNegativeSelfMapping(f)) negatable = true;
    ExprPtr node = Builders::product(coeff, factors);
    if (negatable && !node->indices().dummyNames().empty() && vanishesBySymmetry(factors))
        return makeInt(0);
    return node;
}

ExprPtr makeSum(std::vector<ExprPtr> inputs) {
    std::vector<ExprPtr> terms;
    Complex numeric(0);
    bool sawNumeric = false;
    auto take = [&](const ExprPtr& t) {
        if (auto* n = as<NumberExpr>(t)) {
            numeric = numeric + n->value();
            sawNumeric = true;
        } else
            terms.push_back(t);
    };
    for (auto& e : inputs) {
        if (auto* s = as<SumExpr>(e))
            for (auto& t : s->terms()) take(t);
        else
            take(e);
    }

    if (!terms.empty()) {
        std::set<uint32_t> expect;
        for (auto c : terms.front()->freeIndices()) expect.insert(c.raw());
        if (sawNumeric && !numeric.isZero() && !expect.empty())
            throw Error(ErrorKind::FreeIndicesMismatch,
                        "scalar term in a sum of expressions with free indices");
        for (auto& t : terms) {
            std::set<uint32_t> got;
            for (auto c : t->freeIndices()) got.insert(c.raw());
            if (got != expect)
                throw Error(ErrorKind::FreeIndicesMismatch,
                            "sum terms have different free indices");
        }
    }

    struct Bucket {
        Complex coeff{0};
        std::vector<ExprPtr> scalarParts;
        std::vector<ExprPtr> kernel;
        ExprPtr kernelNode;
        ExprPtr representative;
        bool scalarGroup = false;
        uint32_t key = 0;
    };
    std::vector<Bucket> buckets;
    for (auto& t : terms) {
        Complex c;
        std::vector<ExprPtr> scalars, indexed;
        decomposeTerm(t, c, scalars, indexed);
        bool scalarGroup = indexed.empty();
        std::vector<ExprPtr>& kern = scalarGroup ? scalars : indexed;
        uint32_t key = hashMix(scalarGroup ? 0x5ca1a5u : 0x1d8e2du, productContentHash(kern));
        ExprPtr kernelNode;
        bool merged = false;
        for (auto& b : buckets) {
            if (b.key != key || b.scalarGroup != scalarGroup || b.kernel.size() != kern.size())
                continue;
            if (!kernelNode) kernelNode = rawProductView(kern);
            auto delta = identityMappingSign(kernelNode, b.kernelNode);
            if (!delta) continue;
            if (scalarGroup) {
                b.coeff = b.coeff + c * Complex(*delta);
            } else {
                ExprPtr part = makeProduct(scalars, *delta == -1 ? -c : c);
                b.scalarParts.push_back(part);
            }
            b.representative = nullptr;
            merged = true;
            break;
        }
        if (merged) continue;
        Bucket b;
        b.scalarGroup = scalarGroup;
        b.key = key;
        b.kernel = kern;
        b.kernelNode = kernelNode ? kernelNode : rawProductView(kern);
        b.representative = t;
        if (scalarGroup)
            b.coeff = c;
        else
            b.scalarParts.push_back(makeProduct(scalars, c));
        buckets.push_back(std::move(b));
    }

    std::vector<ExprPtr> result;
    for (auto& b : buckets) {
        if (b.representative) {
            result.push_back(b.representative);
            continue;
        }
        if (b.scalarGroup) {
            if (b.coeff.isZero()) continue;
            std::vector<ExprPtr> fs = b.kernel;
            result.push_back(makeProduct(std::move(fs), b.coeff));
        } else {
            ExprPtr scalar = makeSum(b.scalarParts);
            if (scalar->isZero()) continue;
            std::vector<ExprPtr> fs = b.kernel;
            fs.push_back(scalar);
            result.push_back(makeProduct(std::move(fs)));
        }
    }
    if (sawNumeric && !numeric.isZero()) result.push_back(makeNumber(numeric));

    if (result.empty()) return makeInt(0);
    if (result.size() == 1) return result[0];
    std::sort(result.begin(), result.end(), [](const ExprPtr& a, const ExprPtr& b) {
        uint32_t ha = sumTermOrderHash(a), hb = sumTermOrderHash(b);
        if (ha != hb) return ha < hb;
        return structuralCompare(a, b) < 0;
    });
    for (auto& t : result) markUsedShallow(t);
    return Builders::sum(std::move(result));
}

ExprPtr rebuildFromChildren(const Expr* node, std::vector<ExprPtr> children) {
    switch (node->kind()) {
        case Kind::Sum:
            return makeSum(std::move(children));
        case Kind::Product:
            return makeProduct(std::move(children));
        case Kind::Power:
            if (children.size() != 2)
                throw Error(ErrorKind::IndexOutOfRange, "power needs base and exponent");
            return makePower(children[0], children[1]);
        case Kind::ScalarFunction:
            if (children.size() != 1)
                throw Error(ErrorKind::IndexOutOfRange, "function needs one argument");
            return makeScalarFunction(as<ScalarFunctionExpr>(node)->fn(), children[0]);
        case Kind::Rule:
            if (children.size() != 2)
                throw Error(ErrorKind::IndexOutOfRange, "rule needs two sides");
            return makeRule(children[0], children[1]);
        case Kind::TensorField: {
            auto* f = as<TensorFieldExpr>(node);
            return makeTensorField(f->name(), f->indices(), std::move(children),
                                   f->argBindings());
        }
        default:
            throw Error(ErrorKind::IndexOutOfRange, "node has no children to replace");
    }
}

ExprPtr Expr::set(size_t i, const ExprPtr& value) const {
    if (i >= size()) throw Error(ErrorKind::IndexOutOfRange, "set: child index out of range");
    std::vector<ExprPtr> children;
    for (size_t k = 0; k < size(); ++k) children.push_back(k == i ? value : child(k));
    return rebuildFromChildren(this, std::move(children));
}

ExprPtr Expr::remove(size_t i) const {
    if (i >= size()) throw Error(ErrorKind::IndexOutOfRange, "remove: child index out of range");
    std::vector<ExprPtr> children;
    for (size_t k = 0; k < size(); ++k)
        if (k != i) children.push_back(child(k));
    return rebuildFromChildren(this, std::move(children));
}

}  // namespace tk
