#include "tensorkit/tensors.hpp"

#include "tensorkit/parser.hpp"

namespace tk {

namespace {

struct Resolved {
    NameId id;
    Indices indices;
};

Resolved resolve(const std::string& tensor) {
    ExprPtr e = parse(tensor);
    if (auto* t = as<SimpleTensorExpr>(e)) return {t->name(), t->indices()};
    if (auto* f = as<TensorFieldExpr>(e)) return {f->name(), f->indices()};
    throw Error(ErrorKind::SyntaxError, "expected a simple tensor or tensor field: " + tensor);
}

IndexType typeForPermutation(const Resolved& r, size_t permSize) {
    std::map<IndexType, int> counts;
    for (auto c : r.indices) ++counts[c.type()];
    IndexType found = IndexType::LatinLower;
    int matches = 0;
    for (auto& [t, n] : counts)
        if (static_cast<size_t>(n) == permSize) {
            found = t;
            ++matches;
        }
    if (matches != 1)
        throw Error(ErrorKind::InconsistentGenerators,
                    "permutation length does not single out one index type");
    return found;
}

void addSigned(const std::string& tensor, const std::vector<int>& permutation, bool negative) {
    Resolved r = resolve(tensor);
    SignedPermutation p = parsePermutation(permutation);
    p.negative = negative;
    IndexType t = typeForPermutation(r, p.images.size());
    Context::get().addSymmetry(r.id, t, p);
}

}  // namespace

void addSymmetry(const std::string& tensor, const std::vector<int>& permutation) {
    addSigned(tensor, permutation, false);
}

void addAntiSymmetry(const std::string& tensor, const std::vector<int>& permutation) {
    addSigned(tensor, permutation, true);
}

namespace {

void setAllTranspositions(const std::string& tensor, bool negative) {
    Resolved r = resolve(tensor);
    std::map<IndexType, int> counts;
    for (auto c : r.indices) ++counts[c.type()];
    for (auto& [t, n] : counts) {
        if (n < 2) continue;
        for (int i = 0; i + 1 < n; ++i) {
            SignedPermutation p = SignedPermutation::identity(n);
            std::swap(p.images[i], p.images[i + 1]);
            p.negative = negative;
            Context::get().addSymmetry(r.id, t, p);
        }
    }
}

}  // namespace

void setSymmetric(const std::string& tensor) { setAllTranspositions(tensor, false); }
void setAntiSymmetric(const std::string& tensor) { setAllTranspositions(tensor, true); }

std::vector<SignedPermutation> enumerateSymmetries(const std::string& tensor) {
    Resolved r = resolve(tensor);
    if (r.indices.empty()) return {SignedPermutation::identity(0)};
    IndexType t = r.indices[0].type();
    return Context::get().symmetries(r.id, t).elements();
}

std::vector<SignedPermutation> symmetryBasis(const std::string& tensor) {
    Resolved r = resolve(tensor);
    if (r.indices.empty()) return {SignedPermutation::identity(0)};
    IndexType t = r.indices[0].type();
    return Context::get().symmetries(r.id, t).basis();
}

NameId nameOf(const std::string& tensor) { return resolve(tensor).id; }

}  // namespace tk
