#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "tensorkit/expr.hpp"

namespace tk {

// A transformation is a total node -> node rewriting contract; outputs are in
// standard form. Composable with & (sequence) and | (simultaneous rule set),
// applied with >> / <<.
class Transformation {
public:
    virtual ~Transformation() = default;
    virtual ExprPtr apply(const ExprPtr& node) const = 0;
    virtual std::string name() const = 0;
};

using TransformationPtr = std::shared_ptr<const Transformation>;

ExprPtr applyTransform(const TransformationPtr& t, const ExprPtr& node);

TransformationPtr sequenceTransform(std::vector<TransformationPtr> steps);        // &
TransformationPtr simultaneousRules(std::vector<ExprPtr> rules);                  // |
TransformationPtr substitutionTransform(ExprPtr rule);
TransformationPtr identityTransform();
TransformationPtr functionTransform(std::string name, std::function<ExprPtr(const ExprPtr&)> f);

// substitutions
ExprPtr substitute(const ExprPtr& rule, const ExprPtr& target);
ExprPtr substituteSimultaneous(const std::vector<ExprPtr>& rules, const ExprPtr& target);

// expand family; `nested` is applied to every intermediate produced while
// expanding
ExprPtr expand(const ExprPtr& target, const TransformationPtr& nested = nullptr);
ExprPtr expandAll(const ExprPtr& target, const TransformationPtr& nested = nullptr);
ExprPtr expandNumerator(const ExprPtr& target, const TransformationPtr& nested = nullptr);
ExprPtr expandDenominator(const ExprPtr& target, const TransformationPtr& nested = nullptr);

ExprPtr eliminateMetrics(const ExprPtr& target);

ExprPtr together(const ExprPtr& target);
ExprPtr togetherFactor(const ExprPtr& target);

ExprPtr differentiate(const ExprPtr& target, const std::vector<ExprPtr>& vars,
                      const TransformationPtr& nested = nullptr);

// reduced Factor: univariate polynomials factored over the integers;
// multivariate parts are left in expanded-with-content-extracted form
ExprPtr factorReduced(const ExprPtr& target);

TransformationPtr expandTransform(const TransformationPtr& nested = nullptr);
TransformationPtr expandAllTransform(const TransformationPtr& nested = nullptr);
TransformationPtr expandNumeratorTransform(const TransformationPtr& nested = nullptr);
TransformationPtr expandDenominatorTransform(const TransformationPtr& nested = nullptr);
TransformationPtr eliminateMetricsTransform();
TransformationPtr togetherTransform();
TransformationPtr togetherFactorTransform();
TransformationPtr differentiateTransform(std::vector<ExprPtr> vars,
                                         const TransformationPtr& nested = nullptr);
TransformationPtr factorTransform();
// Expand with EliminateMetrics applied on every level
TransformationPtr expandAndEliminateTransform(const TransformationPtr& extra = nullptr);

// ---- tree traversal ----

enum class TraversePermission { Enter, ShowButNotEnter, DontShow };

// (node, parent, positionInParent); parent is null at the root
using TraverseGuide =
    std::function<TraversePermission(const ExprPtr&, const ExprPtr&, int)>;

TraverseGuide enterEverywhere();

void traverseParentAfterChild(const ExprPtr& node, const TraverseGuide& guide,
                              const std::function<void(const ExprPtr&)>& visit);
void traverseParentBeforeChild(const ExprPtr& node, const TraverseGuide& guide,
                               const std::function<void(const ExprPtr&)>& visit);

// bottom-up rebuild: children are rewritten first, the parent is reduced to
// standard form before it is shown to the rewriter
ExprPtr transformParentAfterChild(const ExprPtr& node, const TraverseGuide& guide,
                                  const std::function<ExprPtr(const ExprPtr&)>& rewrite);

}  // namespace tk
