#ifndef GVERIFY_DIFF_HPP
#define GVERIFY_DIFF_HPP

#include <string>
#include <vector>

#include "gverify/factorize.hpp"

#include "json.hpp"

namespace gverify {

struct DiffEntry {
  std::string path;  // branch path from the root, "/" separated
  std::string kind;  // branch-added | branch-removed | split-changed | ...
  std::string a;
  std::string b;
};

struct TreeDiff {
  std::vector<DiffEntry> entries;

  bool empty() const { return entries.empty(); }
};

// Recursive structural diff of two factored trees over the same attribute
// universe; empty iff same_structure. Throws Error(schema_mismatch) when
// the universes differ.
TreeDiff tree_diff(const KnowledgeBase& kb, const FactoredTree& a, const FactoredTree& b);

nlohmann::ordered_json diff_to_json(const TreeDiff& d);

}  // namespace gverify

#endif
