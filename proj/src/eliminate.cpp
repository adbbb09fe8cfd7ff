#include "tensorkit/mapping.hpp"
#include "tensorkit/transforms.hpp"

namespace tk {

namespace {

bool isEliminableMetric(const ExprPtr& f) {
    auto* t = as<SimpleTensorExpr>(f);
    if (!t) return false;
    if (!Context::get().isAnyDeltaName(t->name())) return false;
    return t->indices().size() == 2;
}

// rename one index occurrence inside a factor
ExprPtr renameIn(const ExprPtr& f, IndexCode from, IndexCode to,
                 const std::set<uint32_t>& forbidden) {
    Mapping m;
    m.entries[from] = to;
    return applyMapping(m, f, forbidden);
}

ExprPtr eliminateInProduct(const ExprPtr& node) {
    Complex coeff;
    std::vector<ExprPtr> factors;
    decomposeFactors(node, coeff, factors);
    if (factors.size() < 2) return node;

    bool changedAny = false;
    bool progress = true;
    while (progress) {
        progress = false;
        for (size_t gi = 0; gi < factors.size() && !progress; ++gi) {
            if (!isEliminableMetric(factors[gi])) continue;
            IndexCode x = factors[gi]->indices()[0];
            IndexCode y = factors[gi]->indices()[1];
            if (x.nameWithType() == y.nameWithType()) continue;  // d_a^a stays symbolic
            for (size_t hi = 0; hi < factors.size() && !progress; ++hi) {
                if (hi == gi) continue;
                IndexCode hit, repl;
                if (factors[hi]->indices().contains(x.inverted())) {
                    hit = x.inverted();
                    repl = y;
                } else if (factors[hi]->indices().contains(y.inverted())) {
                    hit = y.inverted();
                    repl = x;
                } else {
                    continue;
                }
                std::set<uint32_t> forbidden;
                for (auto& f : factors)
                    for (auto c : f->indices()) forbidden.insert(c.nameWithType());
                factors[hi] = renameIn(factors[hi], hit, repl, forbidden);
                factors.erase(factors.begin() + gi);
                progress = true;
                changedAny = true;
            }
        }
    }
    if (!changedAny) return node;
    return makeProduct(std::move(factors), coeff);
}

}  // namespace

ExprPtr eliminateMetrics(const ExprPtr& target) {
    return transformParentAfterChild(target, enterEverywhere(), [](const ExprPtr& n) {
        if (n->kind() != Kind::Product) return n;
        return eliminateInProduct(n);
    });
}

}  // namespace tk
