#pragma once

#include <string>

#include "doctest.h"
#include "tensorkit/mapping.hpp"
#include "tensorkit/parser.hpp"
#include "tensorkit/printer.hpp"

namespace tktest {

using namespace tk;

// fresh session with a fixed seed so orderings are reproducible
struct Session {
    explicit Session(uint64_t seed = 12345) { Context::reset(seed); }
};

inline ExprPtr T(const std::string& s) { return parse(s); }

inline std::string str(const ExprPtr& e) { return printExpr(e, OutputFormat::Redberry); }

// exact node equality including index names (mapping that is the identity on
// every free index, with a plus sign)
inline bool canonEqual(const ExprPtr& a, const ExprPtr& b) {
    auto s = identityMappingSign(a, b);
    return s && *s == 1;
}

inline bool canonEqual(const std::string& a, const std::string& b) {
    return canonEqual(T(a), T(b));
}

// equality up to a relabelling of free indices
inline bool equivalent(const ExprPtr& a, const ExprPtr& b) {
    auto m = firstMapping(a, b);
    return m.has_value();
}

}  // namespace tktest
