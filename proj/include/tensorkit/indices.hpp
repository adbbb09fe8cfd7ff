#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tk {

// The twelve index types: eight metric (Latin/Greek x lower/upper case, each
// plain or stroked) plus the four nonmetric matrix types of generalized
// matrix products. Matrix types print like the stroked alphabets; the stroked
// surface syntax (a', A', ...) binds to the matrix types when parsed.
enum class IndexType : uint8_t {
    LatinLower = 0,
    LatinUpper = 1,
    GreekLower = 2,
    GreekUpper = 3,
    LatinLowerStroked = 4,
    LatinUpperStroked = 5,
    GreekLowerStroked = 6,
    GreekUpperStroked = 7,
    Matrix1 = 8,   // latin lower case with strokes
    Matrix2 = 9,   // latin upper case with strokes
    Matrix3 = 10,  // greek lower case with strokes
    Matrix4 = 11,  // greek upper case with strokes
};

constexpr int kIndexTypeCount = 12;

inline bool isMetricType(IndexType t) { return static_cast<uint8_t>(t) < 8; }
inline bool isMatrixType(IndexType t) { return static_cast<uint8_t>(t) >= 8; }

// Number of base letters in the type's alphabet; name ordinals beyond it
// denote subscripted letters (ordinal = subscript*alphabet + letter).
int alphabetSize(IndexType t);

// Single index packed into 32 bits: bit 31 = state (1 upper), bits 30..24 =
// type, bits 23..0 = name ordinal within the type's alphabet.
class IndexCode {
public:
    IndexCode() : raw_(0) {}
    explicit IndexCode(uint32_t raw) : raw_(raw) {}
    IndexCode(bool upper, IndexType type, uint32_t name)
        : raw_((upper ? 0x80000000u : 0u) | (static_cast<uint32_t>(type) << 24) |
               (name & 0x00ffffffu)) {}

    uint32_t raw() const { return raw_; }
    bool upper() const { return (raw_ & 0x80000000u) != 0; }
    IndexType type() const { return static_cast<IndexType>((raw_ >> 24) & 0x7fu); }
    uint32_t name() const { return raw_ & 0x00ffffffu; }
    // type+name without state
    uint32_t nameWithType() const { return raw_ & 0x7fffffffu; }

    // the contracted partner: same type and name, opposite state
    IndexCode inverted() const { return IndexCode(raw_ ^ 0x80000000u); }
    IndexCode withState(bool upper) const {
        return IndexCode((raw_ & 0x7fffffffu) | (upper ? 0x80000000u : 0u));
    }
    IndexCode withName(uint32_t name) const {
        return IndexCode((raw_ & 0xff000000u) | (name & 0x00ffffffu));
    }

    friend bool operator==(IndexCode a, IndexCode b) { return a.raw_ == b.raw_; }
    friend bool operator!=(IndexCode a, IndexCode b) { return a.raw_ != b.raw_; }
    friend bool operator<(IndexCode a, IndexCode b) { return a.raw_ < b.raw_; }

    std::string toString() const;  // e.g. "_a", "^{\\alpha}", "_{b'}"

private:
    uint32_t raw_;
};

// Render/parse of a bare index name (no state): "a", "\alpha", "B_{21}", "c'".
std::string indexName(IndexType t, uint32_t name, bool utf8 = false);
std::optional<std::pair<IndexType, uint32_t>> lookupIndexName(const std::string& token);

enum class IndicesKind { Ordered, Sorted };

// An index list. ORDERED preserves per-type written order (simple tensors and
// fields); SORTED is the canonical order of products and sums: upper before
// lower, then by type, then by name.
class Indices {
public:
    Indices() : kind_(IndicesKind::Sorted) {}
    static Indices ordered(std::vector<IndexCode> codes);
    static Indices sorted(std::vector<IndexCode> codes);

    IndicesKind kind() const { return kind_; }
    size_t size() const { return codes_.size(); }
    bool empty() const { return codes_.empty(); }
    IndexCode operator[](size_t i) const { return codes_[i]; }
    const std::vector<IndexCode>& codes() const { return codes_; }
    auto begin() const { return codes_.begin(); }
    auto end() const { return codes_.end(); }

    size_t sizeOfType(IndexType t) const;
    std::vector<IndexCode> ofType(IndexType t) const;

    // free = codes without a contracted partner in this list
    Indices free() const;
    Indices inverted() const;
    Indices upperPart() const;
    Indices lowerPart() const;

    // names (with type, without state) of contracted pairs in this list
    std::set<uint32_t> dummyNames() const;
    std::set<uint32_t> allNames() const;

    bool contains(IndexCode c) const;
    std::string toString(bool utf8 = false) const;

    friend bool operator==(const Indices& a, const Indices& b) {
        return a.codes_ == b.codes_;
    }

private:
    IndicesKind kind_;
    std::vector<IndexCode> codes_;
};

// Strict ordering used by SORTED indices: upper first, then type, then name.
bool sortedIndexLess(IndexCode a, IndexCode b);

}  // namespace tk
