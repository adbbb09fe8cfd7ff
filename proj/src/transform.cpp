#include "tensorkit/transforms.hpp"

#include <algorithm>

#include "tensorkit/mapping.hpp"

namespace tk {

ExprPtr applyTransform(const TransformationPtr& t, const ExprPtr& node) {
    return t->apply(node);
}

namespace {

class SequenceTransformation : public Transformation {
public:
    explicit SequenceTransformation(std::vector<TransformationPtr> steps)
        : steps_(std::move(steps)) {}
    ExprPtr apply(const ExprPtr& node) const override {
        ExprPtr r = node;
        for (auto& s : steps_) r = s->apply(r);
        return r;
    }
    std::string name() const override {
        std::string n;
        for (auto& s : steps_) {
            if (!n.empty()) n += " & ";
            n += s->name();
        }
        return n;
    }

private:
    std::vector<TransformationPtr> steps_;
};

class FunctionTransformation : public Transformation {
public:
    FunctionTransformation(std::string name, std::function<ExprPtr(const ExprPtr&)> f)
        : name_(std::move(name)), f_(std::move(f)) {}
    ExprPtr apply(const ExprPtr& node) const override { return f_(node); }
    std::string name() const override { return name_; }

private:
    std::string name_;
    std::function<ExprPtr(const ExprPtr&)> f_;
};

}  // namespace

TransformationPtr sequenceTransform(std::vector<TransformationPtr> steps) {
    return std::make_shared<SequenceTransformation>(std::move(steps));
}

TransformationPtr functionTransform(std::string name, std::function<ExprPtr(const ExprPtr&)> f) {
    return std::make_shared<FunctionTransformation>(std::move(name), std::move(f));
}

TransformationPtr identityTransform() {
    return functionTransform("Identity", [](const ExprPtr& e) { return e; });
}

TransformationPtr substitutionTransform(ExprPtr rule) {
    return functionTransform(rule->toString(),
                             [rule](const ExprPtr& e) { return substitute(rule, e); });
}

TransformationPtr simultaneousRules(std::vector<ExprPtr> rules) {
    std::string n;
    for (auto& r : rules) {
        if (!n.empty()) n += " | ";
        n += r->toString();
    }
    return functionTransform(n, [rules](const ExprPtr& e) {
        return substituteSimultaneous(rules, e);
    });
}

TransformationPtr expandTransform(const TransformationPtr& nested) {
    return functionTransform("Expand", [nested](const ExprPtr& e) { return expand(e, nested); });
}
TransformationPtr expandAllTransform(const TransformationPtr& nested) {
    return functionTransform("ExpandAll",
                             [nested](const ExprPtr& e) { return expandAll(e, nested); });
}
TransformationPtr expandNumeratorTransform(const TransformationPtr& nested) {
    return functionTransform("ExpandNumerator",
                             [nested](const ExprPtr& e) { return expandNumerator(e, nested); });
}
TransformationPtr expandDenominatorTransform(const TransformationPtr& nested) {
    return functionTransform("ExpandDenominator",
                             [nested](const ExprPtr& e) { return expandDenominator(e, nested); });
}
TransformationPtr eliminateMetricsTransform() {
    return functionTransform("EliminateMetrics",
                             [](const ExprPtr& e) { return eliminateMetrics(e); });
}
TransformationPtr togetherTransform() {
    return functionTransform("Together", [](const ExprPtr& e) { return together(e); });
}
TransformationPtr togetherFactorTransform() {
    return functionTransform("TogetherFactor",
                             [](const ExprPtr& e) { return togetherFactor(e); });
}
TransformationPtr differentiateTransform(std::vector<ExprPtr> vars,
                                         const TransformationPtr& nested) {
    return functionTransform("Differentiate", [vars, nested](const ExprPtr& e) {
        return differentiate(e, vars, nested);
    });
}
TransformationPtr factorTransform() {
    return functionTransform("Factor", [](const ExprPtr& e) { return factorReduced(e); });
}

TransformationPtr expandAndEliminateTransform(const TransformationPtr& extra) {
    TransformationPtr inner = eliminateMetricsTransform();
    if (extra) inner = sequenceTransform({inner, extra});
    return functionTransform("ExpandAndEliminate", [inner](const ExprPtr& e) {
        return eliminateMetrics(expand(e, inner));
    });
}

// ---- traversal ----

TraverseGuide enterEverywhere() {
    return [](const ExprPtr&, const ExprPtr&, int) { return TraversePermission::Enter; };
}

namespace {

void traverseImpl(const ExprPtr& node, const ExprPtr& parent, int pos, bool parentFirst,
                  const TraverseGuide& guide, const std::function<void(const ExprPtr&)>& visit) {
    TraversePermission p = guide(node, parent, pos);
    if (p == TraversePermission::DontShow) return;
    if (parentFirst) visit(node);
    if (p == TraversePermission::Enter)
        for (size_t i = 0; i < node->size(); ++i)
            traverseImpl(node->child(i), node, static_cast<int>(i), parentFirst, guide, visit);
    if (!parentFirst) visit(node);
}

}  // namespace

void traverseParentAfterChild(const ExprPtr& node, const TraverseGuide& guide,
                              const std::function<void(const ExprPtr&)>& visit) {
    traverseImpl(node, nullptr, -1, false, guide, visit);
}

void traverseParentBeforeChild(const ExprPtr& node, const TraverseGuide& guide,
                               const std::function<void(const ExprPtr&)>& visit) {
    traverseImpl(node, nullptr, -1, true, guide, visit);
}

namespace {

ExprPtr transformImpl(const ExprPtr& node, const ExprPtr& parent, int pos,
                      const TraverseGuide& guide,
                      const std::function<ExprPtr(const ExprPtr&)>& rewrite) {
    TraversePermission p = guide(node, parent, pos);
    if (p == TraversePermission::DontShow) return node;
    ExprPtr current = node;
    if (p == TraversePermission::Enter && node->size() > 0) {
        std::vector<ExprPtr> children;
        bool changed = false;
        for (size_t i = 0; i < node->size(); ++i) {
            ExprPtr c = node->child(i);
            ExprPtr nc = transformImpl(c, node, static_cast<int>(i), guide, rewrite);
            if (nc.get() != c.get()) changed = true;
            children.push_back(nc);
        }
        if (changed) current = rebuildFromChildren(node.get(), std::move(children));
    }
    return rewrite(current);
}

}  // namespace

ExprPtr transformParentAfterChild(const ExprPtr& node, const TraverseGuide& guide,
                                  const std::function<ExprPtr(const ExprPtr&)>& rewrite) {
    return transformImpl(node, nullptr, -1, guide, rewrite);
}

}  // namespace tk
