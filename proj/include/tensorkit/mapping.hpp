#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tensorkit/expr.hpp"

namespace tk {

// Signed mapping of the free indices of one expression onto indices of
// another: rename `from` by the entries (and negate when `negative`) to obtain
// `to`, up to dummy relabelling.
struct Mapping {
    std::map<IndexCode, IndexCode> entries;  // fromFree -> to
    bool negative = false;

    bool identityOnFree() const;
    std::string toString() const;  // "+{_a -> _i, _b -> _j}"

    friend bool operator==(const Mapping& a, const Mapping& b) {
        return a.negative == b.negative && a.entries == b.entries;
    }
    friend bool operator<(const Mapping& a, const Mapping& b) {
        if (a.negative != b.negative) return b.negative;
        return a.entries < b.entries;
    }
};

// Enumerate all distinct signed mappings from -> to. The callback returns
// false to stop the enumeration early. Mappings are produced on demand; no
// global materialization happens behind the callback.
void enumerateMappings(const ExprPtr& from, const ExprPtr& to,
                       const std::function<bool(const Mapping&)>& fn);

std::optional<Mapping> firstMapping(const ExprPtr& from, const ExprPtr& to);
bool mappingExists(const ExprPtr& from, const ExprPtr& to);

// Mapping that is the identity on every free index, if one exists; used for
// similar-term detection. Returns the sign: to == sign * from.
std::optional<int> identityMappingSign(const ExprPtr& from, const ExprPtr& to);

// Like identityMappingSign(from, from) == -1: the node equals its own
// negation and is therefore zero.
bool vanishesBySymmetry(const std::vector<ExprPtr>& factors);

// Rename free indices of `node` by `m` (raising/lowering as needed, metric
// types only), resolve dummy clashes against `extraForbidden`, and negate if
// the mapping is negative.
ExprPtr applyMapping(const Mapping& m, const ExprPtr& node,
                     const std::set<uint32_t>& extraForbidden = {});

// Lazy pull-iterator over mappings (script-level `from % to`). Runs the
// enumeration on a worker that is advanced strictly one mapping at a time.
class MappingIterator {
public:
    MappingIterator(ExprPtr from, ExprPtr to);
    ~MappingIterator();
    MappingIterator(const MappingIterator&) = delete;
    MappingIterator& operator=(const MappingIterator&) = delete;

    // next mapping, or nullopt when exhausted
    std::optional<Mapping> take();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// One match of a product pattern inside a target product: the matched subset
// of target factors, the index mapping, and the scalar ratio
// targetCoefficient / patternCoefficient consumed by the match.
struct SubProductMatch {
    std::vector<size_t> factorSubset;
    Mapping mapping;
    Complex coefficientRatio;
};

// Enumerate matches of the pattern factor list inside the target product
// (callback returns false to stop). `patternCoeff` is the numeric coefficient
// of the pattern product.
void enumerateSubProductMatches(const std::vector<ExprPtr>& patternFactors,
                                const Complex& patternCoeff, const ExprPtr& targetProduct,
                                const std::function<bool(const SubProductMatch&)>& fn);

// One match of a sum pattern against a subset of the target sum's terms with
// one global mapping and one uniform scalar ratio r: for every matched pair,
// targetTerm == r * (mapping >> patternTerm).
struct SubSumMatch {
    std::vector<size_t> termSubset;
    Mapping mapping;
    Complex ratio;
};

void enumerateSubSumMatches(const ExprPtr& patternSum, const ExprPtr& targetSum,
                            const std::function<bool(const SubSumMatch&)>& fn);

// All signed permutations sigma over `orderedFree` such that a self-mapping of
// `node` realizes free[i] -> free[sigma[i]].
std::vector<SignedPermutation> findIndicesSymmetries(const Indices& orderedFree,
                                                     const ExprPtr& node);

}  // namespace tk
