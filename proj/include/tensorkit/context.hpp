#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tensorkit/indices.hpp"
#include "tensorkit/symmetry.hpp"

namespace tk {

// Signature of a simple tensor name: what makes A_{mn}, A_a^b and A_a^a the
// same name, while B_{mn} and A_{abc} differ. For metric types only the index
// count matters (raising/lowering preserves identity); for matrix types the
// split into upper/lower is part of the signature. Field arity participates.
struct NameSignature {
    // per type: metric -> (count, 0); matrix -> (upper, lower)
    std::map<IndexType, std::pair<int, int>> slots;
    int fieldArity = -1;  // -1: simple tensor

    static NameSignature of(const Indices& indices, int fieldArity = -1);
    std::string key() const;
    int slotsOfType(IndexType t) const {
        auto it = slots.find(t);
        return it == slots.end() ? 0 : it->second.first + it->second.second;
    }
};

struct MatrixSignature {
    IndexType type;  // one of Matrix1..Matrix4
    int upper = 0;
    int lower = 0;
};

struct NameDescriptor {
    std::string base;
    NameSignature signature;
    uint32_t hashValue = 0;
    bool metric = false;     // the g/d tensor of some type
    bool usedInComposite = false;
    std::map<IndexType, SymmetryGroup> symmetries;
};

using NameId = uint32_t;

// Session-wide registry of tensor names, their symmetries, matrix descriptors
// and the seeded hash stream. Nodes are immutable and freely shareable; this
// is the single mutable session object (writes are serialized).
class Context {
public:
    static Context& get();
    // Drops all names and reseeds the hash stream.
    static void reset(std::optional<uint64_t> seed = std::nullopt);

    NameId intern(const std::string& base, const NameSignature& sig);
    const NameDescriptor& descriptor(NameId id) const;
    uint32_t nameHash(NameId id) const;
    uint64_t seed() const { return seed_; }

    // symmetry management (addSymmetry checks the used-flag and group
    // consistency; markUsed is called when the name first participates in a
    // sum or product)
    void addSymmetry(NameId id, IndexType type, const SignedPermutation& perm);
    const SymmetryGroup& symmetries(NameId id, IndexType type);
    void markUsed(NameId id);

    // the metric/Kronecker tensor of a metric index type
    NameId metricName(IndexType type);
    bool isMetricName(NameId id) const;
    // the identity matrix (Kronecker delta) of a matrix type
    NameId matrixDeltaName(IndexType type);
    bool isAnyDeltaName(NameId id) const;

    // generalized matrix descriptors (Appendix-style declarations)
    void defineMatrix(const std::string& base, const std::vector<MatrixSignature>& kinds);
    const std::vector<MatrixSignature>* matrixDescriptor(const std::string& base) const;

    // lowest-ordinal name of the given type not contained in `forbidden`
    uint32_t nextName(IndexType type, const std::set<uint32_t>& forbiddenOrdinals) const;

    uint64_t maxDfsNodes = 50'000'000;

private:
    Context();
    uint64_t seed_ = 0;
    std::mt19937_64 rng_;
    mutable std::recursive_mutex mu_;
    std::map<std::string, NameId> byKey_;
    std::vector<NameDescriptor> names_;
    std::map<std::string, std::vector<MatrixSignature>> matrixDefs_;
    std::map<IndexType, NameId> metricNames_;
    std::map<IndexType, NameId> matrixDeltaNames_;
    static std::unique_ptr<Context> instance_;
};

}  // namespace tk
