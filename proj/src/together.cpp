#include <algorithm>

#include "tensorkit/mapping.hpp"
#include "tensorkit/transforms.hpp"

namespace tk {

namespace {

struct DenEntry {
    ExprPtr base;
    long exp;  // positive
};

// split a term into (numerator part, denominator entries)
void splitTerm(const ExprPtr& term, Complex& coeff, std::vector<ExprPtr>& num,
               std::vector<DenEntry>& den) {
    std::vector<ExprPtr> factors;
    decomposeFactors(term, coeff, factors);
    for (auto& f : factors) {
        if (auto* p = as<PowerExpr>(f)) {
            if (auto* e = as<NumberExpr>(p->exponent())) {
                if (!e->value().isFloat() && e->value().isInteger() && e->value().re() < 0) {
                    den.push_back({p->base(), -*e->value().asLong()});
                    continue;
                }
            }
        }
        num.push_back(f);
    }
}

// find a matching base in the common-denominator list; sign-aware
int findBase(std::vector<std::pair<ExprPtr, long>>& bases, const ExprPtr& b,
             int& signOut) {
    for (size_t i = 0; i < bases.size(); ++i) {
        if (bases[i].first->hash() != b->hash()) continue;
        auto s = identityMappingSign(b, bases[i].first);
        if (s) {
            signOut = *s;
            return static_cast<int>(i);
        }
    }
    return -1;
}

ExprPtr togetherSum(const SumExpr* sum) {
    // common denominator: per distinct base, the maximal exponent
    std::vector<std::pair<ExprPtr, long>> common;
    bool anyDen = false;
    for (auto& t : sum->terms()) {
        Complex c;
        std::vector<ExprPtr> num;
        std::vector<DenEntry> den;
        splitTerm(t, c, num, den);
        for (auto& d : den) {
            anyDen = true;
            int sgn = 1;
            int i = findBase(common, d.base, sgn);
            if (i < 0)
                common.push_back({d.base, d.exp});
            else
                common[i].second = std::max(common[i].second, d.exp);
        }
    }
    if (!anyDen) return nullptr;

    std::vector<ExprPtr> nums;
    for (auto& t : sum->terms()) {
        Complex c;
        std::vector<ExprPtr> num;
        std::vector<DenEntry> den;
        splitTerm(t, c, num, den);
        // exponent deficit of each common base for this term
        std::vector<long> deficit(common.size());
        for (size_t i = 0; i < common.size(); ++i) deficit[i] = common[i].second;
        for (auto& d : den) {
            int sgn = 1;
            int i = findBase(common, d.base, sgn);
            deficit[i] -= d.exp;
            if (sgn == -1 && d.exp % 2 != 0) c = -c;
        }
        std::vector<ExprPtr> fs = num;
        std::set<uint32_t> pool;
        for (auto& f : fs) {
            std::set<uint32_t> n;
            collectAllNamesDeep(f, n);
            pool.insert(n.begin(), n.end());
        }
        for (size_t i = 0; i < common.size(); ++i) {
            if (deficit[i] == 0) continue;
            ExprPtr factor = makePower(common[i].first, makeInt(deficit[i]));
            factor = renameDummiesAvoiding(factor, pool);
            std::set<uint32_t> n;
            collectAllNamesDeep(factor, n);
            pool.insert(n.begin(), n.end());
            fs.push_back(factor);
        }
        nums.push_back(makeProduct(std::move(fs), c));
    }

    std::vector<ExprPtr> result;
    for (auto& [base, exp] : common) result.push_back(makePower(base, makeInt(-exp)));
    result.push_back(makeSum(std::move(nums)));
    return makeProduct(std::move(result));
}

}  // namespace

ExprPtr together(const ExprPtr& target) {
    return transformParentAfterChild(target, enterEverywhere(), [](const ExprPtr& n) {
        if (n->kind() != Kind::Sum) return n;
        ExprPtr r = togetherSum(as<SumExpr>(n));
        return r ? r : n;
    });
}

ExprPtr togetherFactor(const ExprPtr& target) {
    ExprPtr t = together(target);
    // factor the denominator bases, then cancel factors shared with the
    // numerator (up to sign)
    return transformParentAfterChild(t, enterEverywhere(), [](const ExprPtr& n) -> ExprPtr {
        if (n->kind() != Kind::Product) return n;
        Complex coeff;
        std::vector<ExprPtr> factors;
        decomposeFactors(n, coeff, factors);
        bool changed = false;
        std::vector<ExprPtr> out;
        for (auto& f : factors) {
            auto* p = as<PowerExpr>(f);
            const NumberExpr* e = p ? as<NumberExpr>(p->exponent()) : nullptr;
            if (p && e && !e->value().isFloat() && e->value().isInteger() &&
                e->value().re() < 0 && p->base()->indices().empty() &&
                p->base()->kind() == Kind::Sum) {
                ExprPtr factored = factorReduced(p->base());
                if (!structuralEqual(factored, p->base())) {
                    changed = true;
                    out.push_back(makePower(factored, p->exponent()));
                    continue;
                }
            }
            out.push_back(f);
        }
        if (!changed) return n;
        ExprPtr rebuilt = makeProduct(std::move(out), coeff);

        // cancel identical scalar bases between numerator and denominator
        Complex c2;
        std::vector<ExprPtr> fs;
        decomposeFactors(rebuilt, c2, fs);
        auto expOf = [](const ExprPtr& f, ExprPtr& base) -> long {
            if (auto* pw = as<PowerExpr>(f)) {
                if (auto* x = as<NumberExpr>(pw->exponent())) {
                    if (!x->value().isFloat() && x->value().isInteger()) {
                        base = pw->base();
                        return *x->value().asLong();
                    }
                }
            }
            base = f;
            return 1;
        };
        bool cancelled = false;
        for (size_t i = 0; i < fs.size(); ++i) {
            if (!fs[i] || !fs[i]->indices().empty()) continue;
            ExprPtr bi;
            long ei = expOf(fs[i], bi);
            if (ei >= 0) continue;
            for (size_t j = 0; j < fs.size(); ++j) {
                if (i == j || !fs[j] || !fs[j]->indices().empty()) continue;
                ExprPtr bj;
                long ej = expOf(fs[j], bj);
                if (ej <= 0) continue;
                if (bi->hash() != bj->hash()) continue;
                auto sg = identityMappingSign(bj, bi);
                if (!sg) continue;
                long k = std::min(ej, -ei);
                if (*sg == -1 && k % 2 != 0) c2 = -c2;
                fs[i] = k + ei == 0 ? nullptr : makePower(bi, makeInt(ei + k));
                fs[j] = ej - k == 0 ? nullptr : makePower(bj, makeInt(ej - k));
                cancelled = true;
                break;
            }
        }
        if (!cancelled) return rebuilt;
        std::vector<ExprPtr> fin;
        for (auto& f : fs)
            if (f) fin.push_back(f);
        return makeProduct(std::move(fin), c2);
    });
}

}  // namespace tk
