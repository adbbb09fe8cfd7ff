#include "tensorkit/mapping.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <mutex>
#include <sstream>
#include <thread>

namespace tk {

bool Mapping::identityOnFree() const {
    for (auto& [from, to] : entries)
        if (from != to) return false;
    return true;
}

std::string Mapping::toString() const {
    std::ostringstream os;
    os << (negative ? "-" : "+") << "{";
    bool first = true;
    std::vector<std::pair<IndexCode, IndexCode>> sorted(entries.begin(), entries.end());
    std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) {
        if (a.first.type() != b.first.type()) return a.first.type() < b.first.type();
        if (a.first.name() != b.first.name()) return a.first.name() < b.first.name();
        return a.first.upper() < b.first.upper();
    });
    for (auto& [from, to] : sorted) {
        if (!first) os << ", ";
        first = false;
        os << (from.upper() ? "^" : "_") << indexName(from.type(), from.name()) << " -> "
           << (to.upper() ? "^" : "_") << indexName(to.type(), to.name());
    }
    os << "}";
    return os.str();
}

namespace {

using Cont = std::function<bool()>;

struct Scope {
    std::set<uint32_t> local;  // from-side names owned by this scope
    std::map<uint32_t, std::pair<uint32_t, bool>> bind;  // fromName -> (toName, flip)
};

struct MatchState {
    std::vector<Scope> scopes;
    int sign = 1;
    uint64_t steps = 0;
    uint64_t maxSteps = 0;

    struct TrailEntry {
        size_t scope;
        uint32_t key;
    };
    std::vector<TrailEntry> trail;

    struct Mark {
        size_t trailSize;
        int sign;
    };
    Mark mark() const { return {trail.size(), sign}; }
    void rollback(const Mark& m) {
        while (trail.size() > m.trailSize) {
            auto e = trail.back();
            trail.pop_back();
            scopes[e.scope].bind.erase(e.key);
        }
        sign = m.sign;
    }

    size_t scopeFor(uint32_t fromName) const {
        for (size_t i = scopes.size(); i-- > 1;)
            if (scopes[i].local.count(fromName)) return i;
        return 0;
    }

    bool bindName(uint32_t fromNt, uint32_t toNt, bool flip) {
        if (++steps > maxSteps)
            throw Error(ErrorKind::ResourceLimit, "mapping search exceeded the node limit");
        if (IndexCode(fromNt).type() != IndexCode(toNt).type()) return false;
        if (flip && !isMetricType(IndexCode(fromNt).type())) return false;
        size_t s = scopeFor(fromNt);
        auto it = scopes[s].bind.find(fromNt);
        if (it != scopes[s].bind.end())
            return it->second.first == toNt && it->second.second == flip;
        scopes[s].bind.emplace(fromNt, std::make_pair(toNt, flip));
        trail.push_back({s, fromNt});
        return true;
    }

    const std::pair<uint32_t, bool>* lookup(uint32_t fromNt) const {
        for (size_t i = scopes.size(); i-- > 0;) {
            auto it = scopes[i].bind.find(fromNt);
            if (it != scopes[i].bind.end()) return &it->second;
        }
        return nullptr;
    }
};

bool matchPair(const ExprPtr& a, const ExprPtr& b, MatchState& st, const Cont& k);

// bind one index occurrence pair
bool bindCodes(IndexCode from, IndexCode to, MatchState& st) {
    bool flip = from.upper() != to.upper();
    return st.bindName(from.nameWithType(), to.nameWithType(), flip);
}

// slot codes of one index type in written order
std::vector<IndexCode> slotsOfType(const Indices& idx, IndexType t) { return idx.ofType(t); }

// match simple tensors / fields on one index type: enumerate the symmetry
// group, bind a[sigma(i)] -> b[i] with sign(sigma)
bool matchTypeSlots(NameId name, const std::vector<IndexType>& types, size_t ti,
                    const Indices& ia, const Indices& ib, MatchState& st, const Cont& k) {
    if (ti == types.size()) return k();
    IndexType t = types[ti];
    auto sa = slotsOfType(ia, t), sb = slotsOfType(ib, t);
    const SymmetryGroup& g = Context::get().symmetries(name, t);
    for (const auto& sigma : g.elements()) {
        auto m = st.mark();
        bool ok = true;
        for (size_t i = 0; i < sa.size() && ok; ++i)
            ok = bindCodes(sa[sigma.images[i]], sb[i], st);
        if (ok) {
            if (sigma.negative) st.sign = -st.sign;
            if (!matchTypeSlots(name, types, ti + 1, ia, ib, st, k)) return false;
        }
        st.rollback(m);
    }
    return true;
}

std::vector<IndexType> typesPresent(const Indices& idx) {
    std::vector<IndexType> r;
    for (auto c : idx)
        if (r.empty() || r.back() != c.type()) {
            if (std::find(r.begin(), r.end(), c.type()) == r.end()) r.push_back(c.type());
        }
    return r;
}

// achievable signs of mappings between two closed scalar subexpressions
// (power bases, function arguments); 0 = none, else bitmask 1:+ 2:-
int achievableSigns(const ExprPtr& a, const ExprPtr& b, uint64_t budget);

bool matchSums(const SumExpr* a, const SumExpr* b, MatchState& st, const Cont& k);

bool matchFieldArgs(const TensorFieldExpr* a, const TensorFieldExpr* b, size_t i, MatchState& st,
                    const Cont& k) {
    if (i == a->args().size()) return k();
    Indices ba = a->effectiveBinding(i), bb = b->effectiveBinding(i);
    if (ba.size() != bb.size()) return true;
    // sealed scope: fresh state seeded with the binding correspondence
    MatchState fresh;
    fresh.maxSteps = std::min<uint64_t>(st.maxSteps, 1000000);
    fresh.scopes.emplace_back();
    bool okSeed = true;
    for (size_t j = 0; j < ba.size() && okSeed; ++j) okSeed = bindCodes(ba[j], bb[j], fresh);
    if (!okSeed) return true;
    bool found = false;
    try {
        matchPair(a->args()[i], b->args()[i], fresh, [&]() -> bool {
            if (fresh.sign == 1) {
                found = true;
                return false;
            }
            return true;
        });
    } catch (const Error&) {
        return true;
    }
    if (!found) return true;
    return matchFieldArgs(a, b, i + 1, st, k);
}

// assignment DFS between two factor lists of equal size
struct FactorAssign {
    const std::vector<ExprPtr>* fa;
    const std::vector<ExprPtr>* fb;
    std::vector<char> used;
    MatchState* st;
    const Cont* k;

    bool run(size_t i) {
        if (i == fa->size()) return (*k)();
        const ExprPtr& a = (*fa)[i];
        for (size_t j = 0; j < fb->size(); ++j) {
            if (used[j]) continue;
            const ExprPtr& b = (*fb)[j];
            if (!compatible(a, b)) continue;
            auto m = st->mark();
            used[j] = 1;
            bool cont = matchFactor(a, b, *st, [&]() -> bool { return run(i + 1); });
            used[j] = 0;
            st->rollback(m);
            if (!cont) return false;
        }
        return true;
    }

    static bool compatible(const ExprPtr& a, const ExprPtr& b) {
        if (a->kind() != b->kind()) return false;
        switch (a->kind()) {
            case Kind::SimpleTensor:
                return as<SimpleTensorExpr>(a)->name() == as<SimpleTensorExpr>(b)->name();
            case Kind::TensorField:
                return as<TensorFieldExpr>(a)->name() == as<TensorFieldExpr>(b)->name();
            default:
                return a->hash() == b->hash();
        }
    }

    static bool matchFactor(const ExprPtr& a, const ExprPtr& b, MatchState& st, const Cont& k);
};

bool FactorAssign::matchFactor(const ExprPtr& a, const ExprPtr& b, MatchState& st, const Cont& k) {
    switch (a->kind()) {
        case Kind::SimpleTensor: {
            auto* ta = as<SimpleTensorExpr>(a);
            auto* tb = as<SimpleTensorExpr>(b);
            auto types = typesPresent(ta->indices());
            return matchTypeSlots(ta->name(), types, 0, ta->indices(), tb->indices(), st, k);
        }
        case Kind::TensorField: {
            auto* ta = as<TensorFieldExpr>(a);
            auto* tb = as<TensorFieldExpr>(b);
            auto types = typesPresent(ta->indices());
            return matchTypeSlots(ta->name(), types, 0, ta->indices(), tb->indices(), st,
                                  [&]() -> bool { return matchFieldArgs(ta, tb, 0, st, k); });
        }
        case Kind::Sum: {
            // shared state: free indices of the sum live in the enclosing scope
            return matchSums(as<SumExpr>(a), as<SumExpr>(b), st, k);
        }
        case Kind::Power: {
            auto* pa = as<PowerExpr>(a);
            auto* pb = as<PowerExpr>(b);
            int es = achievableSigns(pa->exponent(), pb->exponent(), st.maxSteps);
            if (!(es & 1)) return true;
            int bs = achievableSigns(pa->base(), pb->base(), st.maxSteps);
            if (bs == 0) return true;
            std::optional<long> intExp;
            if (auto* en = as<NumberExpr>(pa->exponent().get()))
                if (en->value().isInteger()) intExp = en->value().asLong();
            bool cont = true;
            if (bs & 1) {
                if (!k()) return false;
            }
            if ((bs & 2) && cont) {
                // base maps with a minus sign
                if (intExp) {
                    auto m = st.mark();
                    if (*intExp % 2 != 0) st.sign = -st.sign;
                    cont = k();
                    st.rollback(m);
                    if (!cont) return false;
                }
                // non-integer exponents cannot absorb the sign
            }
            return true;
        }
        case Kind::ScalarFunction: {
            auto* fa2 = as<ScalarFunctionExpr>(a);
            auto* fb2 = as<ScalarFunctionExpr>(b);
            if (fa2->fn() != fb2->fn()) return true;
            int signs = achievableSigns(fa2->arg(), fb2->arg(), st.maxSteps);
            if (signs == 0) return true;
            int parity = functionParity(fa2->fn());
            if (signs & 1) {
                if (!k()) return false;
            }
            if (signs & 2) {
                if (parity == 1) {
                    // even function: -arg gives the same value; only emit if
                    // the + route did not already
                    if (!(signs & 1)) {
                        if (!k()) return false;
                    }
                } else if (parity == -1) {
                    auto m = st.mark();
                    st.sign = -st.sign;
                    bool cont = k();
                    st.rollback(m);
                    if (!cont) return false;
                }
            }
            return true;
        }
        default:
            return true;  // numbers/rules never appear as factors
    }
}

bool matchFactorLists(const std::vector<ExprPtr>& fa, const std::vector<ExprPtr>& fb,
                      MatchState& st, const Cont& k) {
    if (fa.size() != fb.size()) return true;
    // multiset compatibility fail-fast
    auto classCount = [](const std::vector<ExprPtr>& fs) {
        std::map<std::pair<int, uint32_t>, int> m;
        for (auto& f : fs) {
            uint32_t key;
            switch (f->kind()) {
                case Kind::SimpleTensor: key = as<SimpleTensorExpr>(f)->name(); break;
                case Kind::TensorField: key = as<TensorFieldExpr>(f)->name(); break;
                default: key = f->hash(); break;
            }
            ++m[{static_cast<int>(f->kind()), key}];
        }
        return m;
    };
    if (classCount(fa) != classCount(fb)) return true;
    FactorAssign fa2{&fa, &fb, std::vector<char>(fb.size(), 0), &st, &k};
    return fa2.run(0);
}

bool matchSumTermPair(const ExprPtr& ta, const ExprPtr& tb, MatchState& st, const Cont& k) {
    Complex ca, cb;
    std::vector<ExprPtr> fa, fb;
    decomposeFactors(ta, ca, fa);
    decomposeFactors(tb, cb, fb);
    if (ca.isZero() || cb.isZero()) return true;
    Complex ratio = cb / ca;
    int rs;
    if (ratio.isOne())
        rs = 1;
    else if (ratio.isMinusOne())
        rs = -1;
    else
        return true;

    // per-term scope for the term's own dummies
    Scope sc;
    sc.local = ta->indices().dummyNames();
    st.scopes.push_back(std::move(sc));
    auto m = st.mark();
    if (rs == -1) st.sign = -st.sign;
    bool cont = matchFactorLists(fa, fb, st, k);
    st.rollback(m);
    st.scopes.pop_back();
    return cont;
}

struct SumAssign {
    const std::vector<ExprPtr>* ta;
    const std::vector<ExprPtr>* tb;
    std::vector<uint32_t> hb;  // order hashes of b terms
    std::vector<char> used;
    MatchState* st;
    const Cont* k;

    uint32_t orderHash(const ExprPtr& t) const {
        Complex c;
        std::vector<ExprPtr> sc, ix;
        decomposeTerm(t, c, sc, ix);
        std::vector<ExprPtr> kernel = std::move(sc);
        for (auto& e : ix) kernel.push_back(e);
        return kernel.empty() ? 0x11u : productContentHash(kernel);
    }

    bool run(size_t i, int expected) {
        size_t n = ta->size();
        if (i == n) {
            // accumulated sign contains expected^n; the sum contributes
            // expected exactly once
            auto m = st->mark();
            if (expected == -1 && (n - 1) % 2 == 1) st->sign = -st->sign;
            bool cont = (*k)();
            st->rollback(m);
            return cont;
        }
        uint32_t ha = orderHash((*ta)[i]);
        for (size_t j = 0; j < tb->size(); ++j) {
            if (used[j] || hb[j] != ha) continue;
            int signBefore = st->sign;
            used[j] = 1;
            bool cont = matchSumTermPair((*ta)[i], (*tb)[j], *st, [&]() -> bool {
                int delta = st->sign * signBefore;  // +-1 ratio
                if (expected != 0 && delta != expected) return true;
                return run(i + 1, expected != 0 ? expected : delta);
            });
            used[j] = 0;
            if (!cont) return false;
        }
        return true;
    }
};

bool matchSums(const SumExpr* a, const SumExpr* b, MatchState& st, const Cont& k) {
    if (a->terms().size() != b->terms().size()) return true;
    SumAssign sa;
    sa.ta = &a->terms();
    sa.tb = &b->terms();
    sa.st = &st;
    sa.k = &k;
    sa.used.assign(b->terms().size(), 0);
    for (auto& t : b->terms()) sa.hb.push_back(sa.orderHash(t));
    return sa.run(0, 0);
}

bool matchPair(const ExprPtr& a, const ExprPtr& b, MatchState& st, const Cont& k) {
    // rules: both sides with one uniform sign
    if (a->kind() == Kind::Rule || b->kind() == Kind::Rule) {
        if (a->kind() != b->kind()) return true;
        auto* ra = as<RuleExpr>(a);
        auto* rb = as<RuleExpr>(b);
        return matchPair(ra->lhs(), rb->lhs(), st, [&]() -> bool {
            int s0 = st.sign;
            return matchPair(ra->rhs(), rb->rhs(), st, [&]() -> bool {
                if (st.sign != s0) return true;  // sides disagree in sign
                auto m = st.mark();
                st.sign = s0;  // count the sign once
                bool cont = k();
                st.rollback(m);
                return cont;
            });
        });
    }
    if (a->kind() == Kind::Sum && b->kind() == Kind::Sum)
        return matchSums(as<SumExpr>(a), as<SumExpr>(b), st, k);

    Complex ca, cb;
    std::vector<ExprPtr> fa, fb;
    decomposeFactors(a, ca, fa);
    decomposeFactors(b, cb, fb);
    if (fa.empty() != fb.empty()) return true;
    if (fa.empty()) {
        // pure numbers
        if (ca.isZero() && cb.isZero()) return k();
        if (ca.isZero() || cb.isZero()) return true;
        Complex ratio = cb / ca;
        if (ratio.isOne()) return k();
        if (ratio.isMinusOne()) {
            auto m = st.mark();
            st.sign = -st.sign;
            bool cont = k();
            st.rollback(m);
            return cont;
        }
        return true;
    }
    if (ca.isZero() || cb.isZero()) return true;
    Complex ratio = cb / ca;
    int rs;
    if (ratio.isOne())
        rs = 1;
    else if (ratio.isMinusOne())
        rs = -1;
    else
        return true;
    auto m = st.mark();
    if (rs == -1) st.sign = -st.sign;
    bool cont = matchFactorLists(fa, fb, st, k);
    st.rollback(m);
    return cont;
}

int achievableSigns(const ExprPtr& a, const ExprPtr& b, uint64_t budget) {
    MatchState fresh;
    fresh.maxSteps = budget;
    fresh.scopes.emplace_back();
    int signs = 0;
    try {
        matchPair(a, b, fresh, [&]() -> bool {
            signs |= fresh.sign == 1 ? 1 : 2;
            return signs != 3;
        });
    } catch (const Error&) {
        return signs;
    }
    return signs;
}

struct Seed {
    IndexCode from, to;
};

bool runEnumeration(const ExprPtr& from, const ExprPtr& to, const std::vector<Seed>& seeds,
                    uint64_t budget, const std::function<bool(const Mapping&)>& fn) {
    MatchState st;
    st.maxSteps = budget;
    st.scopes.emplace_back();  // global scope: free indices of `from`
    for (auto& s : seeds)
        if (!bindCodes(s.from, s.to, st)) return true;
    // from's top-level dummies live in their own scope
    Scope top;
    top.local = from->indices().dummyNames();
    st.scopes.push_back(std::move(top));

    std::set<std::pair<std::map<IndexCode, IndexCode>, bool>> seen;
    bool keep = true;
    matchPair(from, to, st, [&]() -> bool {
        Mapping mp;
        mp.negative = st.sign < 0;
        for (auto c : from->freeIndices()) {
            const auto* entry = st.lookup(c.nameWithType());
            if (!entry) return true;  // incomplete (should not happen)
            bool up = entry->second ? !c.upper() : c.upper();
            mp.entries[c] = IndexCode(entry->first | (up ? 0x80000000u : 0u));
        }
        if (!seen.insert({mp.entries, mp.negative}).second) return true;
        keep = fn(mp);
        return keep;
    });
    return keep;
}

}  // namespace

void enumerateMappings(const ExprPtr& from, const ExprPtr& to,
                       const std::function<bool(const Mapping&)>& fn) {
    runEnumeration(from, to, {}, Context::get().maxDfsNodes, fn);
}

std::optional<Mapping> firstMapping(const ExprPtr& from, const ExprPtr& to) {
    std::optional<Mapping> r;
    enumerateMappings(from, to, [&](const Mapping& m) {
        r = m;
        return false;
    });
    return r;
}

bool mappingExists(const ExprPtr& from, const ExprPtr& to) {
    return firstMapping(from, to).has_value();
}

std::optional<int> identityMappingSign(const ExprPtr& from, const ExprPtr& to) {
    std::vector<Seed> seeds;
    for (auto c : from->freeIndices()) seeds.push_back({c, c});
    std::optional<int> result;
    runEnumeration(from, to, seeds, Context::get().maxDfsNodes, [&](const Mapping& m) {
        if (!m.identityOnFree()) return true;
        result = m.negative ? -1 : 1;
        return false;
    });
    return result;
}

bool vanishesBySymmetry(const std::vector<ExprPtr>& factors) {
    ExprPtr node = rawProductView(factors);
    std::vector<Seed> seeds;
    for (auto c : node->freeIndices()) seeds.push_back({c, c});
    bool zero = false;
    try {
        runEnumeration(node, node, seeds, 200000, [&](const Mapping& m) {
            if (m.negative && m.identityOnFree()) {
                zero = true;
                return false;
            }
            return true;
        });
    } catch (const Error&) {
        return false;  // budget exceeded: treat as nonzero
    }
    return zero;
}

ExprPtr applyMapping(const Mapping& m, const ExprPtr& node,
                     const std::set<uint32_t>& extraForbidden) {
    std::map<uint32_t, std::pair<uint32_t, bool>> nameMap;
    std::set<uint32_t> forbidden = extraForbidden;
    for (auto& [from, to] : m.entries) {
        if (from.type() != to.type())
            throw Error(ErrorKind::InconsistentIndices, "mapping changes the index type");
        bool flip = from.upper() != to.upper();
        if (flip && !isMetricType(from.type()))
            throw Error(ErrorKind::InconsistentIndices,
                        "raising/lowering requested for a nonmetric index type");
        nameMap[from.nameWithType()] = {to.nameWithType(), flip};
        forbidden.insert(to.nameWithType());
    }
    ExprPtr relabeled = renameDummiesAvoiding(node, forbidden);
    ExprPtr renamed = renameIndexNames(relabeled, nameMap);
    return m.negative ? negate(renamed) : renamed;
}

// ---------------- lazy iterator ----------------

struct MappingIterator::Impl {
    ExprPtr from, to;
    std::thread worker;
    std::mutex mu;
    std::condition_variable cv;
    std::optional<Mapping> slot;
    bool wanted = false;
    bool done = false;
    bool cancelled = false;

    void produce() {
        auto deliver = [&](const Mapping& m) -> bool {
            std::unique_lock lock(mu);
            cv.wait(lock, [&] { return wanted || cancelled; });
            if (cancelled) return false;
            slot = m;
            wanted = false;
            cv.notify_all();
            return true;
        };
        try {
            enumerateMappings(from, to, deliver);
        } catch (const Error&) {
        }
        std::unique_lock lock(mu);
        done = true;
        cv.notify_all();
    }
};

MappingIterator::MappingIterator(ExprPtr from, ExprPtr to) : impl_(new Impl) {
    impl_->from = std::move(from);
    impl_->to = std::move(to);
    impl_->worker = std::thread([p = impl_.get()] { p->produce(); });
}

MappingIterator::~MappingIterator() {
    {
        std::unique_lock lock(impl_->mu);
        impl_->cancelled = true;
        impl_->cv.notify_all();
    }
    impl_->worker.join();
}

std::optional<Mapping> MappingIterator::take() {
    std::unique_lock lock(impl_->mu);
    if (impl_->done && !impl_->slot) return std::nullopt;
    impl_->wanted = true;
    impl_->cv.notify_all();
    impl_->cv.wait(lock, [&] { return impl_->slot.has_value() || impl_->done; });
    if (impl_->slot) {
        auto m = std::move(*impl_->slot);
        impl_->slot.reset();
        return m;
    }
    return std::nullopt;
}

// ---------------- subproduct and subsum matching ----------------

void enumerateSubProductMatches(const std::vector<ExprPtr>& patternFactors,
                                const Complex& patternCoeff, const ExprPtr& targetProduct,
                                const std::function<bool(const SubProductMatch&)>& fn) {
    Complex ct;
    std::vector<ExprPtr> tf;
    decomposeFactors(targetProduct, ct, tf);
    if (patternFactors.size() > tf.size() || patternFactors.empty()) return;

    ExprPtr patternView = rawProductView(patternFactors);

    MatchState st;
    st.maxSteps = Context::get().maxDfsNodes;
    st.scopes.emplace_back();
    Scope top;
    top.local = patternView->indices().dummyNames();
    st.scopes.push_back(std::move(top));

    std::vector<size_t> chosen(patternFactors.size());
    std::vector<char> used(tf.size(), 0);
    std::set<std::tuple<std::vector<size_t>, std::map<IndexCode, IndexCode>, bool>> seen;

    std::function<bool(size_t)> assign = [&](size_t i) -> bool {
        if (i == patternFactors.size()) {
            SubProductMatch res;
            res.factorSubset = chosen;
            std::sort(res.factorSubset.begin(), res.factorSubset.end());
            res.mapping.negative = st.sign < 0;
            for (auto c : patternView->freeIndices()) {
                const auto* entry = st.lookup(c.nameWithType());
                if (!entry) return true;
                bool up = entry->second ? !c.upper() : c.upper();
                res.mapping.entries[c] = IndexCode(entry->first | (up ? 0x80000000u : 0u));
            }
            if (!seen.insert({res.factorSubset, res.mapping.entries, res.mapping.negative})
                     .second)
                return true;
            res.coefficientRatio = ct / patternCoeff;
            return fn(res);
        }
        const ExprPtr& a = patternFactors[i];
        for (size_t j = 0; j < tf.size(); ++j) {
            if (used[j] || !FactorAssign::compatible(a, tf[j])) continue;
            auto m = st.mark();
            used[j] = 1;
            chosen[i] = j;
            bool cont =
                FactorAssign::matchFactor(a, tf[j], st, [&]() -> bool { return assign(i + 1); });
            used[j] = 0;
            st.rollback(m);
            if (!cont) return false;
        }
        return true;
    };
    assign(0);
}

void enumerateSubSumMatches(const ExprPtr& patternSum, const ExprPtr& targetSum,
                            const std::function<bool(const SubSumMatch&)>& fn) {
    auto* ps = as<SumExpr>(patternSum);
    auto* ts = as<SumExpr>(targetSum);
    if (!ps || !ts) return;
    const auto& pt = ps->terms();
    const auto& tt = ts->terms();
    if (pt.size() > tt.size()) return;

    MatchState st;
    st.maxSteps = Context::get().maxDfsNodes;
    st.scopes.emplace_back();

    auto orderHash = [](const ExprPtr& t) {
        Complex c;
        std::vector<ExprPtr> sc, ix;
        decomposeTerm(t, c, sc, ix);
        std::vector<ExprPtr> kernel = std::move(sc);
        for (auto& e : ix) kernel.push_back(e);
        return kernel.empty() ? 0x11u : productContentHash(kernel);
    };
    std::vector<uint32_t> th;
    for (auto& t : tt) th.push_back(orderHash(t));

    std::vector<size_t> chosen(pt.size());
    std::vector<char> used(tt.size(), 0);

    std::function<bool(size_t, std::optional<Complex>)> assign =
        [&](size_t i, std::optional<Complex> ratio) -> bool {
        if (i == pt.size()) {
            SubSumMatch res;
            res.termSubset = chosen;
            std::sort(res.termSubset.begin(), res.termSubset.end());
            res.mapping.negative = false;
            for (auto c : patternSum->freeIndices()) {
                const auto* entry = st.lookup(c.nameWithType());
                if (!entry) return true;
                bool up = entry->second ? !c.upper() : c.upper();
                res.mapping.entries[c] = IndexCode(entry->first | (up ? 0x80000000u : 0u));
            }
            res.ratio = *ratio;
            return fn(res);
        }
        Complex cp;
        std::vector<ExprPtr> pf;
        decomposeFactors(pt[i], cp, pf);
        uint32_t ha = orderHash(pt[i]);
        for (size_t j = 0; j < tt.size(); ++j) {
            if (used[j] || th[j] != ha) continue;
            Complex ctj;
            std::vector<ExprPtr> tfj;
            decomposeFactors(tt[j], ctj, tfj);
            // kernel match with sign capture
            Scope sc;
            sc.local = pt[i]->indices().dummyNames();
            st.scopes.push_back(std::move(sc));
            auto m = st.mark();
            int signBefore = st.sign;
            used[j] = 1;
            chosen[i] = j;
            bool cont = matchFactorLists(pf, tfj, st, [&]() -> bool {
                int delta = st.sign * signBefore;
                Complex r = ctj / cp * Complex(delta);
                if (ratio && !(r == *ratio)) return true;
                return assign(i + 1, r);
            });
            used[j] = 0;
            st.rollback(m);
            st.scopes.pop_back();
            if (!cont) return false;
        }
        return true;
    };
    assign(0, std::nullopt);
}

std::vector<SignedPermutation> findIndicesSymmetries(const Indices& orderedFree,
                                                     const ExprPtr& node) {
    std::set<uint32_t> want, have;
    for (auto c : orderedFree) want.insert(c.nameWithType());
    for (auto c : node->freeIndices()) have.insert(c.nameWithType());
    if (want != have || orderedFree.size() != node->freeIndices().size())
        throw Error(ErrorKind::FreeIndicesMismatch,
                    "given indices are not an ordering of the expression's free indices");

    std::vector<SignedPermutation> out;
    std::set<std::pair<std::vector<int>, bool>> seen;
    enumerateMappings(node, node, [&](const Mapping& m) {
        SignedPermutation p;
        p.images.resize(orderedFree.size());
        p.negative = m.negative;
        for (size_t i = 0; i < orderedFree.size(); ++i) {
            auto it = m.entries.find(orderedFree[i]);
            IndexCode img;
            if (it != m.entries.end())
                img = it->second;
            else
                return true;
            int j = -1;
            for (size_t t = 0; t < orderedFree.size(); ++t)
                if (orderedFree[t].nameWithType() == img.nameWithType()) j = static_cast<int>(t);
            if (j < 0) return true;
            p.images[i] = j;
        }
        if (seen.insert({p.images, p.negative}).second) out.push_back(p);
        return true;
    });
    std::sort(out.begin(), out.end(), [](const SignedPermutation& a, const SignedPermutation& b) {
        if (a.isIdentity() != b.isIdentity()) return a.isIdentity();
        if (a.images != b.images) return a.images < b.images;
        return a.negative < b.negative;
    });
    return out;
}

}  // namespace tk
