#include "tensorkit/symmetry.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "tensorkit/error.hpp"

namespace tk {

SignedPermutation SignedPermutation::identity(int n) {
    SignedPermutation p;
    p.images.resize(n);
    std::iota(p.images.begin(), p.images.end(), 0);
    return p;
}

bool SignedPermutation::isIdentity() const {
    if (negative) return false;
    for (size_t i = 0; i < images.size(); ++i)
        if (images[i] != static_cast<int>(i)) return false;
    return true;
}

SignedPermutation SignedPermutation::inverse() const {
    SignedPermutation r;
    r.images.resize(images.size());
    for (size_t i = 0; i < images.size(); ++i) r.images[images[i]] = static_cast<int>(i);
    r.negative = negative;
    return r;
}

SignedPermutation compose(const SignedPermutation& a, const SignedPermutation& b) {
    SignedPermutation r;
    r.images.resize(a.images.size());
    for (size_t i = 0; i < a.images.size(); ++i) r.images[i] = a.images[b.images[i]];
    r.negative = a.negative != b.negative;
    return r;
}

std::string SignedPermutation::toString() const {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < images.size(); ++i) {
        if (i) os << ", ";
        os << images[i];
    }
    os << "](" << (negative ? "-" : "+") << ")";
    return os.str();
}

bool permutationIsOdd(const std::vector<int>& images) {
    std::vector<bool> seen(images.size(), false);
    bool odd = false;
    for (size_t i = 0; i < images.size(); ++i) {
        if (seen[i]) continue;
        size_t len = 0, j = i;
        while (!seen[j]) {
            seen[j] = true;
            j = images[j];
            ++len;
        }
        if (len % 2 == 0) odd = !odd;
    }
    return odd;
}

SymmetryGroup::SymmetryGroup(int slots) : slots_(slots) {
    elements_.push_back(SignedPermutation::identity(slots));
}

void SymmetryGroup::addGenerator(const SignedPermutation& p) {
    if (static_cast<int>(p.images.size()) != slots_)
        throw Error(ErrorKind::InconsistentGenerators,
                    "permutation size does not match the number of indices");
    if (p.isIdentity()) return;
    generators_.push_back(p);
    close();
}

void SymmetryGroup::close() {
    std::map<std::vector<int>, bool> known;  // images -> negative
    std::vector<SignedPermutation> closure;
    auto push = [&](const SignedPermutation& s) -> bool {
        auto it = known.find(s.images);
        if (it != known.end()) {
            if (it->second != s.negative)
                throw Error(ErrorKind::InconsistentGenerators,
                            "combination of symmetries implies permutation " +
                                SignedPermutation{s.images, false}.toString() +
                                " with both signs");
            return false;
        }
        known[s.images] = s.negative;
        closure.push_back(s);
        return true;
    };
    push(SignedPermutation::identity(slots_));
    size_t head = 0;
    std::vector<SignedPermutation> queue = {SignedPermutation::identity(slots_)};
    while (head < queue.size()) {
        SignedPermutation cur = queue[head++];
        for (const auto& g : generators_) {
            SignedPermutation next = compose(cur, g);
            if (push(next)) queue.push_back(next);
            if (queue.size() > 100000)
                throw Error(ErrorKind::ResourceLimit, "symmetry closure too large");
        }
    }
    elements_ = std::move(closure);
    anyNegative_ = false;
    for (const auto& e : elements_)
        if (e.negative) anyNegative_ = true;
}

std::vector<SignedPermutation> SymmetryGroup::basis() const {
    std::vector<SignedPermutation> r;
    r.push_back(SignedPermutation::identity(slots_));
    for (const auto& g : generators_) r.push_back(g);
    return r;
}

std::vector<int> SymmetryGroup::slotOrbits() const {
    std::vector<int> orbit(slots_, -1);
    int next = 0;
    for (int s = 0; s < slots_; ++s) {
        if (orbit[s] >= 0) continue;
        // BFS over images of slot s
        std::vector<int> stack = {s};
        orbit[s] = next;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (const auto& e : elements_) {
                int w = e.images[v];
                if (orbit[w] < 0) {
                    orbit[w] = next;
                    stack.push_back(w);
                }
            }
        }
        ++next;
    }
    return orbit;
}

}  // namespace tk
