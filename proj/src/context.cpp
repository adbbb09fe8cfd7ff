#include "tensorkit/context.hpp"

#include <cstdlib>
#include <sstream>

#include "tensorkit/error.hpp"

namespace tk {

std::unique_ptr<Context> Context::instance_;

NameSignature NameSignature::of(const Indices& indices, int fieldArity) {
    NameSignature sig;
    sig.fieldArity = fieldArity;
    for (auto c : indices) {
        auto& slot = sig.slots[c.type()];
        if (isMatrixType(c.type())) {
            if (c.upper())
                ++slot.first;
            else
                ++slot.second;
        } else {
            ++slot.first;  // metric types: only the count matters
        }
    }
    return sig;
}

std::string NameSignature::key() const {
    std::ostringstream os;
    os << fieldArity;
    for (auto& [t, s] : slots)
        os << ";" << static_cast<int>(t) << ":" << s.first << "," << s.second;
    return os.str();
}

Context::Context() {
    const char* env = std::getenv("TENSORKIT_SEED");
    if (env)
        seed_ = std::strtoull(env, nullptr, 10);
    else
        seed_ = std::random_device{}();
    rng_.seed(seed_);
}

Context& Context::get() {
    if (!instance_) instance_.reset(new Context());
    return *instance_;
}

void Context::reset(std::optional<uint64_t> seed) {
    instance_.reset(new Context());
    if (seed) {
        instance_->seed_ = *seed;
        instance_->rng_.seed(*seed);
    }
}

NameId Context::intern(const std::string& base, const NameSignature& sig) {
    std::lock_guard lock(mu_);
    std::string key = base + "|" + sig.key();
    auto it = byKey_.find(key);
    if (it != byKey_.end()) return it->second;
    NameDescriptor d;
    d.base = base;
    d.signature = sig;
    d.hashValue = static_cast<uint32_t>(rng_());
    NameId id = static_cast<NameId>(names_.size());
    names_.push_back(std::move(d));
    byKey_[key] = id;
    return id;
}

const NameDescriptor& Context::descriptor(NameId id) const {
    std::lock_guard lock(mu_);
    return names_.at(id);
}

uint32_t Context::nameHash(NameId id) const {
    std::lock_guard lock(mu_);
    return names_.at(id).hashValue;
}

void Context::addSymmetry(NameId id, IndexType type, const SignedPermutation& perm) {
    std::lock_guard lock(mu_);
    NameDescriptor& d = names_.at(id);
    if (d.usedInComposite)
        throw Error(ErrorKind::LateSymmetryDefinition,
                    "symmetries of '" + d.base +
                        "' must be set before it is used inside a sum or product");
    int n = d.signature.slotsOfType(type);
    if (static_cast<int>(perm.images.size()) != n)
        throw Error(ErrorKind::InconsistentGenerators,
                    "permutation length does not match indices of '" + d.base + "'");
    auto it = d.symmetries.find(type);
    if (it == d.symmetries.end())
        it = d.symmetries.emplace(type, SymmetryGroup(n)).first;
    it->second.addGenerator(perm);
}

const SymmetryGroup& Context::symmetries(NameId id, IndexType type) {
    std::lock_guard lock(mu_);
    NameDescriptor& d = names_.at(id);
    auto it = d.symmetries.find(type);
    if (it == d.symmetries.end()) {
        int n = d.signature.slotsOfType(type);
        it = d.symmetries.emplace(type, SymmetryGroup(n)).first;
    }
    return it->second;
}

void Context::markUsed(NameId id) {
    std::lock_guard lock(mu_);
    names_.at(id).usedInComposite = true;
}

NameId Context::metricName(IndexType type) {
    std::lock_guard lock(mu_);
    auto it = metricNames_.find(type);
    if (it != metricNames_.end()) return it->second;
    NameSignature sig;
    sig.slots[type] = {2, 0};
    NameId id = intern("g", sig);
    names_[id].metric = true;
    SignedPermutation swap{{1, 0}, false};
    names_[id].symmetries.emplace(type, SymmetryGroup(2)).first->second.addGenerator(swap);
    metricNames_[type] = id;
    return id;
}

bool Context::isMetricName(NameId id) const {
    std::lock_guard lock(mu_);
    return names_.at(id).metric && names_.at(id).signature.slots.begin()->first < IndexType::Matrix1;
}

NameId Context::matrixDeltaName(IndexType type) {
    std::lock_guard lock(mu_);
    auto it = matrixDeltaNames_.find(type);
    if (it != matrixDeltaNames_.end()) return it->second;
    NameSignature sig;
    sig.slots[type] = {1, 1};
    NameId id = intern("d", sig);
    names_[id].metric = true;
    matrixDeltaNames_[type] = id;
    return id;
}

bool Context::isAnyDeltaName(NameId id) const {
    std::lock_guard lock(mu_);
    return names_.at(id).metric;
}

void Context::defineMatrix(const std::string& base, const std::vector<MatrixSignature>& kinds) {
    std::lock_guard lock(mu_);
    auto it = matrixDefs_.find(base);
    if (it != matrixDefs_.end())
        throw Error(ErrorKind::RedefinitionConflict,
                    "matrix signature of '" + base + "' is already defined");
    for (auto& k : kinds) {
        if (!isMatrixType(k.type) || k.upper < 0 || k.lower < 0 || k.upper + k.lower < 1)
            throw Error(ErrorKind::RedefinitionConflict,
                        "invalid matrix signature for '" + base + "'");
    }
    matrixDefs_[base] = kinds;
}

const std::vector<MatrixSignature>* Context::matrixDescriptor(const std::string& base) const {
    std::lock_guard lock(mu_);
    auto it = matrixDefs_.find(base);
    return it == matrixDefs_.end() ? nullptr : &it->second;
}

uint32_t Context::nextName(IndexType, const std::set<uint32_t>& forbidden) const {
    uint32_t n = 0;
    while (forbidden.count(n)) ++n;
    return n;
}

}  // namespace tk
