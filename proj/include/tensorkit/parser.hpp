#pragma once

#include <string>
#include <vector>

#include "tensorkit/expr.hpp"

namespace tk {

// Parse the expression grammar (LaTeX-style indices, ** powers, [] function
// application, = rules). Matrix indices are inserted automatically for names
// declared through defineMatrices.
ExprPtr parse(const std::string& text);

// Appendix-style matrix declarations: each entry is (pattern, kinds) where
// the pattern is a tensor string like "G_a" or "D[x_m]" and each kind one of
// "Matrix1.matrix", "Matrix2.vector", "Matrix1.covector", "Matrix1.tensor(2,3)".
void defineMatrices(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& entries);

// matrix-product composition over a factor list in textual order; exposed for
// the physics layer (trace closure uses it too)
ExprPtr composeMatrixProduct(std::vector<ExprPtr> factorsInOrder);

// close the free matrix chain(s) of the given types (empty: all types present)
ExprPtr closeTrace(const ExprPtr& e, std::vector<IndexType> types);

// parse helpers used by the script layer
Indices parseIndicesSpec(const std::string& text);              // "_abd" etc.
SignedPermutation parsePermutation(const std::vector<int>& v);  // validation

}  // namespace tk
