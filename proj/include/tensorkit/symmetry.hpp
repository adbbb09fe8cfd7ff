#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tk {

// Signed permutation in one-line notation over the slots of one index type:
// T_{i_0 ... i_{n-1}} = sign * T_{i_{images[0]} ... i_{images[n-1]}}.
struct SignedPermutation {
    std::vector<int> images;
    bool negative = false;

    static SignedPermutation identity(int n);
    bool isIdentity() const;
    SignedPermutation inverse() const;
    // (a then b): apply a to the slots of b's image
    friend SignedPermutation compose(const SignedPermutation& a, const SignedPermutation& b);
    friend bool operator==(const SignedPermutation& a, const SignedPermutation& b) {
        return a.images == b.images && a.negative == b.negative;
    }
    bool sameImages(const SignedPermutation& o) const { return images == o.images; }
    std::string toString() const;  // "[2, 3, 0, 1](+)"
};

// Permutation parity (sign of the permutation itself, not the attached sign).
bool permutationIsOdd(const std::vector<int>& images);

// Group of signed permutations over n slots, kept closed at all times.
// Adding a generator that implies some permutation with both signs throws
// (ErrorKind::InconsistentGenerators).
class SymmetryGroup {
public:
    explicit SymmetryGroup(int slots = 0);

    int slots() const { return slots_; }
    void addGenerator(const SignedPermutation& p);

    // full closure, identity first, then BFS order of discovery
    const std::vector<SignedPermutation>& elements() const { return elements_; }
    // stored generators with identity prepended
    std::vector<SignedPermutation> basis() const;
    bool trivial() const { return elements_.size() == 1; }
    bool hasNegative() const { return anyNegative_; }

    // partition of slots into orbits; orbit id per slot
    std::vector<int> slotOrbits() const;

private:
    int slots_;
    std::vector<SignedPermutation> generators_;
    std::vector<SignedPermutation> elements_;
    bool anyNegative_ = false;

    void close();
};

}  // namespace tk
