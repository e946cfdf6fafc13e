#ifndef GVERIFY_FACTORIZE_HPP
#define GVERIFY_FACTORIZE_HPP

#include <memory>
#include <span>
#include <vector>

#include "gverify/c45.hpp"
#include "gverify/dss.hpp"
#include "gverify/kb.hpp"

#include "json.hpp"

namespace gverify {

struct LineSets {
  std::vector<RecElem> first;
  std::vector<RecElem> second;

  bool empty() const { return first.empty() && second.empty(); }
  friend bool operator==(const LineSets&, const LineSets&) = default;
};

struct FactoredNode {
  LineSets hoisted;

  // Internal node: split attribute plus value-group branches. A branch is a
  // single value or the node's one <other> group with recorded members.
  int split_attr = -1;
  struct Branch {
    std::vector<int16_t> values;  // ascending; size > 1 only when other
    bool other = false;
    std::unique_ptr<FactoredNode> child;
  };
  std::vector<Branch> branches;

  // Leaf node.
  LineSets residual;
  uint64_t support = 0;

  bool leaf() const { return split_attr < 0; }
};

struct FactoredTree {
  std::shared_ptr<const Schema> schema;
  std::unique_ptr<FactoredNode> root;
  size_t node_count = 0;
  size_t source_node_count = 0;
  uint64_t training_rows = 0;
};

// 1:1 lift of a decision tree: labels decoded back into recommendation
// sets, empty hoisted sets, singleton branches.
// Throws Error(label_decode) when a leaf label was not produced by this
// KB's serializer.
FactoredTree lift_tree(const KnowledgeBase& kb, const DecisionTree& tree);

// Rule 1, bottom-up to a fixpoint: an element carried by every immediate
// child (same intention line) moves into the node and out of the children.
void hoist_common(FactoredTree& tree);

// Rule 2: at each node the largest group of branches with structurally
// identical subtrees (ties: the group holding the earliest value) becomes
// the single <other> branch with recorded membership.
void merge_values(FactoredTree& tree);

// lift + alternate both rules to a joint fixpoint, collapsing nodes whose
// branches merged into one group.
FactoredTree factorize(const KnowledgeBase& kb, const DecisionTree& tree);

// Semantic evaluation: hoisted elements accumulated along the path, leaf
// residual unioned in, result canonically sorted. Values route through
// <other> only when recorded. Throws Error(unseen_value) otherwise.
ResolvedSet evaluate_factored(const KnowledgeBase& kb, const FactoredTree& tree,
                              std::span<const int16_t> row);

size_t count_nodes(const FactoredNode& node);

// Structural identity ignoring support counts.
bool same_structure(const FactoredNode& a, const FactoredNode& b);

nlohmann::ordered_json factored_to_json(const KnowledgeBase& kb, const FactoredTree& tree);
FactoredTree factored_from_json(const KnowledgeBase& kb, const nlohmann::json& j,
                                std::shared_ptr<const Schema> schema);

}  // namespace gverify

#endif
