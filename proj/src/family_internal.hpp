#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "projstruct/errors.hpp"
#include "projstruct/family.hpp"

namespace projstruct::detail {

double count_subsets(int m, int max_card);
// Subsets of [0, m) by size, lexicographic within a size.
bool for_each_subset(int m, int max_card, const std::function<bool(const std::vector<int>&)>& fn);
void require_sorted_unique(const std::vector<int>& v, int lo, int hi, const char* what);
std::vector<int> sorted_union(const std::vector<int>& a, const std::vector<int>& b);
std::vector<long> size_lex_key(const std::vector<int>& v);

template <class T>
const T& as(const Structure& s, FamilyKind kind) {
    if (const auto* p = std::get_if<T>(&s)) return *p;
    throw ContractError(to_string(kind) + ": structure of type '" + structure_tag(s) +
                        "' is not valid for this family");
}

}  // namespace projstruct::detail
