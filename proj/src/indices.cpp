#include "tensorkit/indices.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <sstream>
#include <stdexcept>

namespace tk {

namespace {

const std::array<const char*, 23> kGreekLower = {
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta",
    "iota",  "kappa", "lambda", "mu",  "nu",      "xi",   "pi",  "rho",
    "sigma", "tau",  "upsilon", "phi", "chi",     "psi",  "omega"};

const std::array<const char*, 11> kGreekUpper = {
    "Gamma", "Delta", "Theta", "Lambda", "Xi", "Pi",
    "Sigma", "Upsilon", "Phi", "Psi", "Omega"};

const std::array<const char*, 23> kGreekLowerGlyph = {
    "α", "β", "γ", "δ", "ε", "ζ", "η", "θ",
    "ι", "κ", "λ", "μ", "ν", "ξ", "π", "ρ",
    "σ", "τ", "υ", "φ", "χ", "ψ", "ω"};

const std::array<const char*, 11> kGreekUpperGlyph = {
    "Γ", "Δ", "Θ", "Λ", "Ξ", "Π",
    "Σ", "Υ", "Φ", "Ψ", "Ω"};

bool isLatinType(IndexType t) {
    switch (t) {
        case IndexType::LatinLower:
        case IndexType::LatinUpper:
        case IndexType::LatinLowerStroked:
        case IndexType::LatinUpperStroked:
        case IndexType::Matrix1:
        case IndexType::Matrix2:
            return true;
        default:
            return false;
    }
}

bool isUpperCaseType(IndexType t) {
    switch (t) {
        case IndexType::LatinUpper:
        case IndexType::GreekUpper:
        case IndexType::LatinUpperStroked:
        case IndexType::GreekUpperStroked:
        case IndexType::Matrix2:
        case IndexType::Matrix4:
            return true;
        default:
            return false;
    }
}

bool isStrokedRender(IndexType t) {
    return (static_cast<uint8_t>(t) >= 4);  // stroked metric types and matrix types
}

}  // namespace

int alphabetSize(IndexType t) {
    if (isLatinType(t)) return 26;
    return isUpperCaseType(t) ? static_cast<int>(kGreekUpper.size())
                              : static_cast<int>(kGreekLower.size());
}

std::string indexName(IndexType t, uint32_t name, bool utf8) {
    int alpha = alphabetSize(t);
    uint32_t letter = name % alpha;
    uint32_t sub = name / alpha;
    std::string base;
    if (isLatinType(t)) {
        char c = static_cast<char>((isUpperCaseType(t) ? 'A' : 'a') + letter);
        base = std::string(1, c);
    } else if (utf8) {
        base = isUpperCaseType(t) ? kGreekUpperGlyph[letter] : kGreekLowerGlyph[letter];
    } else {
        base = std::string("\\") +
               (isUpperCaseType(t) ? kGreekUpper[letter] : kGreekLower[letter]);
    }
    if (sub > 0) base += "_{" + std::to_string(sub) + "}";
    if (isStrokedRender(t)) base += "'";
    return base;
}

std::optional<std::pair<IndexType, uint32_t>> lookupIndexName(const std::string& token) {
    if (token.empty()) return std::nullopt;
    std::string body = token;
    bool stroked = false;
    if (body.size() >= 1 && body.back() == '\'') {
        stroked = true;
        body.pop_back();
    }
    uint32_t sub = 0;
    auto us = body.find("_{");
    if (us != std::string::npos && body.back() == '}') {
        std::string digits = body.substr(us + 2, body.size() - us - 3);
        if (digits.empty()) return std::nullopt;
        for (char c : digits)
            if (!isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        sub = static_cast<uint32_t>(std::stoul(digits));
        body = body.substr(0, us);
    }
    if (body.empty()) return std::nullopt;
    IndexType t;
    uint32_t letter;
    if (body.size() == 1 && isalpha(static_cast<unsigned char>(body[0]))) {
        bool upperCase = isupper(static_cast<unsigned char>(body[0]));
        letter = static_cast<uint32_t>(tolower(static_cast<unsigned char>(body[0])) - 'a');
        t = stroked ? (upperCase ? IndexType::Matrix2 : IndexType::Matrix1)
                    : (upperCase ? IndexType::LatinUpper : IndexType::LatinLower);
    } else if (body[0] == '\\') {
        std::string word = body.substr(1);
        bool found = false;
        bool upperCase = false;
        for (size_t i = 0; i < kGreekLower.size(); ++i)
            if (word == kGreekLower[i]) {
                letter = static_cast<uint32_t>(i);
                found = true;
            }
        if (!found)
            for (size_t i = 0; i < kGreekUpper.size(); ++i)
                if (word == kGreekUpper[i]) {
                    letter = static_cast<uint32_t>(i);
                    upperCase = true;
                    found = true;
                }
        if (!found) return std::nullopt;
        t = stroked ? (upperCase ? IndexType::Matrix4 : IndexType::Matrix3)
                    : (upperCase ? IndexType::GreekUpper : IndexType::GreekLower);
    } else {
        return std::nullopt;
    }
    return std::make_pair(t, sub * alphabetSize(t) + letter);
}

std::string IndexCode::toString() const {
    std::string n = indexName(type(), name());
    return std::string(upper() ? "^" : "_") + "{" + n + "}";
}

bool sortedIndexLess(IndexCode a, IndexCode b) {
    if (a.upper() != b.upper()) return a.upper();
    if (a.type() != b.type()) return a.type() < b.type();
    return a.name() < b.name();
}

Indices Indices::ordered(std::vector<IndexCode> codes) {
    // group by type (stable), keep written order within a type
    std::stable_sort(codes.begin(), codes.end(),
                     [](IndexCode a, IndexCode b) { return a.type() < b.type(); });
    Indices r;
    r.kind_ = IndicesKind::Ordered;
    r.codes_ = std::move(codes);
    return r;
}

Indices Indices::sorted(std::vector<IndexCode> codes) {
    std::sort(codes.begin(), codes.end(), sortedIndexLess);
    Indices r;
    r.kind_ = IndicesKind::Sorted;
    r.codes_ = std::move(codes);
    return r;
}

size_t Indices::sizeOfType(IndexType t) const {
    size_t n = 0;
    for (auto c : codes_)
        if (c.type() == t) ++n;
    return n;
}

std::vector<IndexCode> Indices::ofType(IndexType t) const {
    std::vector<IndexCode> r;
    for (auto c : codes_)
        if (c.type() == t) r.push_back(c);
    return r;
}

Indices Indices::free() const {
    std::map<uint32_t, int> count;  // nameWithType -> bitmask of states seen
    for (auto c : codes_) count[c.nameWithType()] |= c.upper() ? 1 : 2;
    std::vector<IndexCode> f;
    for (auto c : codes_)
        if (count[c.nameWithType()] != 3) f.push_back(c);
    return kind_ == IndicesKind::Ordered ? ordered(std::move(f)) : sorted(std::move(f));
}

Indices Indices::inverted() const {
    std::vector<IndexCode> f;
    f.reserve(codes_.size());
    for (auto c : codes_) f.push_back(c.inverted());
    return kind_ == IndicesKind::Ordered ? ordered(std::move(f)) : sorted(std::move(f));
}

Indices Indices::upperPart() const {
    std::vector<IndexCode> f;
    for (auto c : codes_)
        if (c.upper()) f.push_back(c);
    return kind_ == IndicesKind::Ordered ? ordered(std::move(f)) : sorted(std::move(f));
}

Indices Indices::lowerPart() const {
    std::vector<IndexCode> f;
    for (auto c : codes_)
        if (!c.upper()) f.push_back(c);
    return kind_ == IndicesKind::Ordered ? ordered(std::move(f)) : sorted(std::move(f));
}

std::set<uint32_t> Indices::dummyNames() const {
    std::map<uint32_t, int> count;
    for (auto c : codes_) count[c.nameWithType()] |= c.upper() ? 1 : 2;
    std::set<uint32_t> r;
    for (auto& [nt, mask] : count)
        if (mask == 3) r.insert(nt);
    return r;
}

std::set<uint32_t> Indices::allNames() const {
    std::set<uint32_t> r;
    for (auto c : codes_) r.insert(c.nameWithType());
    return r;
}

bool Indices::contains(IndexCode c) const {
    return std::find(codes_.begin(), codes_.end(), c) != codes_.end();
}

std::string Indices::toString(bool utf8) const {
    if (codes_.empty()) return "";
    std::ostringstream os;
    size_t i = 0;
    while (i < codes_.size()) {
        size_t j = i;
        while (j < codes_.size() && codes_[j].upper() == codes_[i].upper()) ++j;
        os << (codes_[i].upper() ? "^{" : "_{");
        for (size_t k = i; k < j; ++k) os << indexName(codes_[k].type(), codes_[k].name(), utf8);
        os << "}";
        i = j;
    }
    return os.str();
}

}  // namespace tk
