#pragma once

#include <string>
#include <vector>

#include "tensorkit/expr.hpp"
#include "tensorkit/symmetry.hpp"

namespace tk {

// Script-level symmetry declarations; the tensor is given in string form
// ("R_abcd"). The permutation acts on the slots of one index type; for
// tensors with several index types it applies to the unique type whose slot
// count matches the permutation length.
void addSymmetry(const std::string& tensor, const std::vector<int>& permutation);
void addAntiSymmetry(const std::string& tensor, const std::vector<int>& permutation);
void setSymmetric(const std::string& tensor);
void setAntiSymmetric(const std::string& tensor);

// closure / stored generators of the (single index-type) tensor
std::vector<SignedPermutation> enumerateSymmetries(const std::string& tensor);
std::vector<SignedPermutation> symmetryBasis(const std::string& tensor);

// name id resolved from the string form
NameId nameOf(const std::string& tensor);

}  // namespace tk
