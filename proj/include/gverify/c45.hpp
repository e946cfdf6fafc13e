#ifndef GVERIFY_C45_HPP
#define GVERIFY_C45_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gverify/kb.hpp"

#include "json.hpp"

namespace gverify {

// Categorical attribute universe of a dataset/tree. Conditional KB variables
// get an extra trailing "NA" value; the row encoding maps kNA onto it.
struct AttrInfo {
  std::string name;
  std::vector<std::string> values;
  bool has_na = false;

  int16_t na_index() const { return static_cast<int16_t>(values.size() - 1); }

  friend bool operator==(const AttrInfo&, const AttrInfo&) = default;
};

struct Schema {
  std::vector<AttrInfo> attrs;

  friend bool operator==(const Schema&, const Schema&) = default;
};

Schema schema_from_kb(const KnowledgeBase& kb);
std::vector<int16_t> encode_row(const Schema& schema, const InputVector& v);

struct Dataset {
  std::shared_ptr<const Schema> schema;
  std::vector<int16_t> cells;  // n_rows x n_attrs, row-major
  std::vector<int32_t> labels;
  std::vector<std::string> label_texts;
  uint64_t n_rows = 0;

  size_t n_attrs() const { return schema ? schema->attrs.size() : 0; }
  int16_t cell(uint64_t row, size_t attr) const {
    return cells[row * n_attrs() + attr];
  }
  std::span<const int16_t> row(uint64_t r) const {
    return {cells.data() + r * n_attrs(), n_attrs()};
  }
};

// Enumerates and labels the realistic stream of kb into a training table.
Dataset build_dataset(const KnowledgeBase& kb, const Roles& roles);

// Shannon entropy in bits of a class-count distribution.
// Throws Error(empty_distribution) when no count is positive.
double entropy(std::span<const uint64_t> counts);

struct SplitStats {
  double info_gain = 0.0;
  double split_info = 0.0;
  double gain_ratio = 0.0;
};

// Gain statistics for splitting `rows` of ds on attr. Attributes with a
// single represented value get all-zero stats by convention.
SplitStats attribute_stats(const Dataset& ds, std::span<const uint32_t> rows, int attr);
SplitStats gain_ratio(const Dataset& ds, int attr);  // over the whole dataset

struct TreeNode {
  int split_attr = -1;  // -1 for leaves
  std::vector<std::pair<int16_t, std::unique_ptr<TreeNode>>> branches;  // value order
  int32_t label = -1;
  uint64_t support = 0;

  bool leaf() const { return split_attr < 0; }
};

struct DecisionTree {
  std::shared_ptr<const Schema> schema;
  std::vector<std::string> label_texts;
  std::unique_ptr<TreeNode> root;
  uint64_t training_rows = 0;
  size_t node_count = 0;
};

// Unpruned C4.5 induction: leaf when pure, otherwise split on the attribute
// maximizing gain ratio among attributes with positive information gain,
// ties broken by attribute order, branches only for values present in the
// node's rows. Training error is exactly zero.
// Throws Error(non_functional) with a witness pair when two identical rows
// carry different labels.
DecisionTree build_tree(const Dataset& ds);

// Walks the tree over an encoded row. Throws Error(unseen_value) naming the
// splitting attribute and the value when no branch exists for it.
int32_t classify(const DecisionTree& tree, std::span<const int16_t> row);

size_t count_nodes(const TreeNode& node);

nlohmann::ordered_json tree_to_json(const DecisionTree& tree);
DecisionTree tree_from_json(const nlohmann::json& j, std::shared_ptr<const Schema> schema);

}  // namespace gverify

#endif
