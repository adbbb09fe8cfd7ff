#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tensorkit/context.hpp"
#include "tensorkit/error.hpp"
#include "tensorkit/indices.hpp"
#include "tensorkit/number.hpp"

namespace tk {

enum class Kind : uint8_t {
    Number,
    SimpleTensor,
    TensorField,
    Product,
    Sum,
    Power,
    ScalarFunction,
    Rule,
};

enum class FunctionKind : uint8_t {
    Sin, Cos, Tan, Cot, ArcSin, ArcCos, ArcTan, ArcCot, Log, Exp,
};

const char* functionName(FunctionKind k);
std::optional<FunctionKind> lookupFunction(const std::string& name);
// -1: odd, +1: even, 0: no parity
int functionParity(FunctionKind k);

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Immutable expression node. Every node is in standard form; nodes are built
// exclusively through the make* builders below, which enforce it.
class Expr {
public:
    virtual ~Expr() = default;

    Kind kind() const { return kind_; }
    const Indices& indices() const { return indices_; }
    const Indices& freeIndices() const { return free_; }
    uint32_t hash() const { return hash_; }

    // container access
    virtual size_t size() const { return 0; }
    virtual ExprPtr child(size_t) const { throw Error(ErrorKind::IndexOutOfRange, "no children"); }
    ExprPtr set(size_t i, const ExprPtr& value) const;
    ExprPtr remove(size_t i) const;

    bool isZero() const;
    bool isOne() const;

    std::string toString() const;  // Redberry format

protected:
    Expr(Kind k) : kind_(k) {}
    Kind kind_;
    Indices indices_;
    Indices free_;
    uint32_t hash_ = 0;

    friend struct Builders;
};

class NumberExpr : public Expr {
public:
    const Complex& value() const { return value_; }

private:
    friend struct Builders;
    explicit NumberExpr(Complex v);
    Complex value_;
};

class SimpleTensorExpr : public Expr {
public:
    NameId name() const { return name_; }

private:
    friend struct Builders;
    SimpleTensorExpr(NameId name, Indices indices);
    NameId name_;
};

class TensorFieldExpr : public Expr {
public:
    NameId name() const { return name_; }
    const std::vector<ExprPtr>& args() const { return args_; }
    // per-argument binding of the argument's free indices to formal slots;
    // empty = default (the argument's own canonical index order)
    const std::vector<Indices>& argBindings() const { return bindings_; }
    Indices effectiveBinding(size_t argIndex) const;

    size_t size() const override { return args_.size(); }
    ExprPtr child(size_t i) const override {
        if (i >= args_.size()) throw Error(ErrorKind::IndexOutOfRange, "field child out of range");
        return args_[i];
    }

private:
    friend struct Builders;
    TensorFieldExpr(NameId name, Indices indices, std::vector<ExprPtr> args,
                    std::vector<Indices> bindings);
    NameId name_;
    std::vector<ExprPtr> args_;
    std::vector<Indices> bindings_;
};

class ProductExpr : public Expr {
public:
    const Complex& scalarFactor() const { return factor_; }
    const std::vector<ExprPtr>& factors() const { return factors_; }

    // children: the numeric factor (when != 1) followed by the factors
    size_t size() const override;
    ExprPtr child(size_t i) const override;

private:
    friend struct Builders;
    ProductExpr(Complex factor, std::vector<ExprPtr> factors);
    Complex factor_;
    std::vector<ExprPtr> factors_;
};

class SumExpr : public Expr {
public:
    const std::vector<ExprPtr>& terms() const { return terms_; }
    size_t size() const override { return terms_.size(); }
    ExprPtr child(size_t i) const override {
        if (i >= terms_.size()) throw Error(ErrorKind::IndexOutOfRange, "sum child out of range");
        return terms_[i];
    }

private:
    friend struct Builders;
    explicit SumExpr(std::vector<ExprPtr> terms);
    std::vector<ExprPtr> terms_;
};

class PowerExpr : public Expr {
public:
    const ExprPtr& base() const { return base_; }
    const ExprPtr& exponent() const { return exp_; }
    size_t size() const override { return 2; }
    ExprPtr child(size_t i) const override;

private:
    friend struct Builders;
    PowerExpr(ExprPtr base, ExprPtr exp);
    ExprPtr base_, exp_;
};

class ScalarFunctionExpr : public Expr {
public:
    FunctionKind fn() const { return fn_; }
    const ExprPtr& arg() const { return arg_; }
    size_t size() const override { return 1; }
    ExprPtr child(size_t i) const override;

private:
    friend struct Builders;
    ScalarFunctionExpr(FunctionKind fn, ExprPtr arg);
    FunctionKind fn_;
    ExprPtr arg_;
};

class RuleExpr : public Expr {
public:
    const ExprPtr& lhs() const { return lhs_; }
    const ExprPtr& rhs() const { return rhs_; }
    size_t size() const override { return 2; }
    ExprPtr child(size_t i) const override;

private:
    friend struct Builders;
    RuleExpr(ExprPtr lhs, ExprPtr rhs);
    ExprPtr lhs_, rhs_;
};

template <typename T>
const T* as(const ExprPtr& e) {
    return dynamic_cast<const T*>(e.get());
}
template <typename T>
const T* as(const Expr* e) {
    return dynamic_cast<const T*>(e);
}

// ---- standard-form builders ----

ExprPtr makeNumber(Complex v);
ExprPtr makeInt(long v);
ExprPtr makeSimpleTensor(NameId name, Indices indices);
ExprPtr makeTensorField(NameId name, Indices indices, std::vector<ExprPtr> args,
                        std::vector<Indices> bindings = {});
ExprPtr makeSum(std::vector<ExprPtr> terms);
ExprPtr makeProduct(std::vector<ExprPtr> factors, Complex scalar = Complex(1));
ExprPtr makePower(ExprPtr base, ExprPtr exponent);
ExprPtr makeScalarFunction(FunctionKind fn, ExprPtr arg);
ExprPtr makeRule(ExprPtr lhs, ExprPtr rhs);

// negation / scaling / subtraction conveniences
ExprPtr negate(const ExprPtr& e);
ExprPtr scale(const ExprPtr& e, const Complex& c);

// metric/Kronecker of a metric type, identity matrix of a matrix type
ExprPtr makeMetric(IndexCode a, IndexCode b);

// content hash of a factor multiset (rename-invariant, contraction-sensitive);
// the hash of a Product node equals the content hash of its factors
uint32_t productContentHash(const std::vector<ExprPtr>& factors);

// split a node into numeric coefficient and non-numeric factors
void decomposeFactors(const ExprPtr& e, Complex& coeff, std::vector<ExprPtr>& factors);
// additionally split the factors into indexless and indexed ones (a factor is
// indexed iff it contributes at least one index to the product's indices)
void decomposeTerm(const ExprPtr& e, Complex& coeff, std::vector<ExprPtr>& scalars,
                   std::vector<ExprPtr>& indexed);

// rebuild a node of the same kind from replacement children (re-running the
// standard-form builder)
ExprPtr rebuildFromChildren(const Expr* node, std::vector<ExprPtr> children);

// bare container node for matching purposes: a Product shell around the given
// factors without any standard-form processing
ExprPtr rawProductView(std::vector<ExprPtr> factors, Complex coeff = Complex(1));

// deterministic structural total order used to break hash ties
int structuralCompare(const ExprPtr& a, const ExprPtr& b);
bool structuralEqual(const ExprPtr& a, const ExprPtr& b);

// split sum terms / product factors of a node; singletons yield themselves
std::vector<ExprPtr> termsOf(const ExprPtr& e);

// rename dummy (and hidden-scope) index names of `e` so that none of them is
// in `forbidden`; returns the rewritten node. Free indices are untouched.
ExprPtr renameDummiesAvoiding(const ExprPtr& e, const std::set<uint32_t>& forbidden);

// consistent deep rename: nameWithType -> (new nameWithType, flip state);
// sealed field-argument scopes are not entered
ExprPtr renameIndexNames(const ExprPtr& e,
                         const std::map<uint32_t, std::pair<uint32_t, bool>>& nameMap);

// every index name (with type, without state) occurring anywhere in the node,
// including hidden scopes (sum/power/function internals)
void collectAllNamesDeep(const ExprPtr& e, std::set<uint32_t>& names);

uint32_t hashMix(uint32_t h, uint32_t v);

}  // namespace tk
