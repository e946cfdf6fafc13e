#include "gverify/factorize.hpp"

#include <algorithm>
#include <map>

namespace gverify {

namespace {

std::unique_ptr<FactoredNode> clone(const FactoredNode& n) {
  auto out = std::make_unique<FactoredNode>();
  out->hoisted = n.hoisted;
  out->split_attr = n.split_attr;
  out->residual = n.residual;
  out->support = n.support;
  for (const auto& b : n.branches) {
    FactoredNode::Branch nb;
    nb.values = b.values;
    nb.other = b.other;
    nb.child = clone(*b.child);
    out->branches.push_back(std::move(nb));
  }
  return out;
}

// Elements an ancestor hoist can steal from this node: its own hoisted set
// for internal nodes, the residual for leaves.
std::vector<RecElem>& surface(FactoredNode& n, bool first_line) {
  if (n.leaf()) return first_line ? n.residual.first : n.residual.second;
  return first_line ? n.hoisted.first : n.hoisted.second;
}

std::vector<RecElem> intersect(const std::vector<RecElem>& a, const std::vector<RecElem>& b) {
  std::vector<RecElem> out;
  for (const auto& e : a)
    if (std::find(b.begin(), b.end(), e) != b.end()) out.push_back(e);
  return out;
}

void remove_all(std::vector<RecElem>& from, const std::vector<RecElem>& what) {
  from.erase(std::remove_if(from.begin(), from.end(),
                            [&](const RecElem& e) {
                              return std::find(what.begin(), what.end(), e) != what.end();
                            }),
             from.end());
}

void append_sorted(const KnowledgeBase* kb, std::vector<RecElem>& into,
                   const std::vector<RecElem>& add) {
  for (const auto& e : add)
    if (std::find(into.begin(), into.end(), e) == into.end()) into.push_back(e);
  if (kb) kb->sort_elems(into);
}

bool hoist_node(FactoredNode& n) {
  bool changed = false;
  if (n.leaf()) return false;
  for (auto& b : n.branches) changed |= hoist_node(*b.child);
  for (bool line : {true, false}) {
    std::vector<RecElem> common = surface(*n.branches.front().child, line);
    for (size_t i = 1; i < n.branches.size() && !common.empty(); ++i)
      common = intersect(common, surface(*n.branches[i].child, line));
    if (common.empty()) continue;
    for (auto& b : n.branches) remove_all(surface(*b.child, line), common);
    auto& target = line ? n.hoisted.first : n.hoisted.second;
    for (const auto& e : common) target.push_back(e);
    changed = true;
  }
  return changed;
}

void sort_hoisted(const KnowledgeBase& kb, FactoredNode& n) {
  kb.sort_elems(n.hoisted.first);
  kb.sort_elems(n.hoisted.second);
  for (auto& b : n.branches) sort_hoisted(kb, *b.child);
}

// Branch ordering: explicit values ascending, the <other> group last.
void order_branches(FactoredNode& n) {
  std::sort(n.branches.begin(), n.branches.end(),
            [](const FactoredNode::Branch& a, const FactoredNode::Branch& b) {
              if (a.other != b.other) return b.other;
              return a.values.front() < b.values.front();
            });
}

bool merge_node(FactoredNode& n) {
  if (n.leaf()) return false;
  bool changed = false;
  for (auto& b : n.branches) changed |= merge_node(*b.child);

  // Regroup from scratch: explode any existing <other> into per-value
  // branches over copies of its subtree, then pick the largest equivalence
  // class. Re-forming an unchanged grouping reports no change.
  std::vector<FactoredNode::Branch> exploded;
  bool had_other = false;
  for (auto& b : n.branches) {
    if (b.values.size() == 1) {
      exploded.push_back(std::move(b));
      continue;
    }
    had_other = true;
    for (size_t i = 0; i < b.values.size(); ++i) {
      FactoredNode::Branch nb;
      nb.values = {b.values[i]};
      nb.child = i + 1 == b.values.size() ? std::move(b.child) : clone(*b.child);
      exploded.push_back(std::move(nb));
    }
  }
  std::sort(exploded.begin(), exploded.end(),
            [](const auto& a, const auto& b) { return a.values.front() < b.values.front(); });

  // Equivalence classes by structural identity.
  std::vector<std::vector<size_t>> classes;
  for (size_t i = 0; i < exploded.size(); ++i) {
    bool placed = false;
    for (auto& cls : classes) {
      if (same_structure(*exploded[cls.front()].child, *exploded[i].child)) {
        cls.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) classes.push_back({i});
  }

  // Largest class with >= 2 members becomes the one <other> group; ties go
  // to the class holding the earliest value.
  int winner = -1;
  for (size_t c = 0; c < classes.size(); ++c) {
    if (classes[c].size() < 2) continue;
    if (winner < 0 || classes[c].size() > classes[winner].size()) winner = static_cast<int>(c);
  }

  if (winner < 0) {
    n.branches = std::move(exploded);
    order_branches(n);
    return changed;  // regrouping produced nothing; exploding was lossless
  }

  FactoredNode::Branch merged;
  merged.other = true;
  uint64_t merged_support = 0;
  for (size_t idx : classes[winner]) {
    merged.values.push_back(exploded[idx].values.front());
    merged_support += exploded[idx].child->support;
    if (!merged.child) merged.child = std::move(exploded[idx].child);
  }
  merged.child->support = merged_support;

  std::vector<FactoredNode::Branch> next;
  for (size_t i = 0; i < exploded.size(); ++i) {
    if (std::find(classes[winner].begin(), classes[winner].end(), i) != classes[winner].end())
      continue;
    next.push_back(std::move(exploded[i]));
  }
  next.push_back(std::move(merged));
  n.branches = std::move(next);
  order_branches(n);
  (void)had_other;
  return true;
}

size_t structure_hash(const FactoredNode& n);

// Collapse nodes whose branches merged into a single group: the split
// distinguishes nothing, so the child replaces the node and inherits its
// hoisted elements.
bool collapse_degenerate(const KnowledgeBase& kb, std::unique_ptr<FactoredNode>& slot) {
  FactoredNode& n = *slot;
  bool changed = false;
  if (!n.leaf()) {
    for (auto& b : n.branches) changed |= collapse_degenerate(kb, b.child);
    if (n.branches.size() == 1) {
      std::unique_ptr<FactoredNode> child = std::move(n.branches.front().child);
      append_sorted(&kb, child->hoisted.first, n.hoisted.first);
      append_sorted(&kb, child->hoisted.second, n.hoisted.second);
      child->support = n.support;
      slot = std::move(child);
      changed = true;
    }
  }
  return changed;
}

}  // namespace

bool same_structure(const FactoredNode& a, const FactoredNode& b) {
  if (a.leaf() != b.leaf()) return false;
  if (!(a.hoisted == b.hoisted)) return false;
  if (a.leaf()) return a.residual == b.residual;
  if (a.split_attr != b.split_attr) return false;
  if (a.branches.size() != b.branches.size()) return false;
  for (size_t i = 0; i < a.branches.size(); ++i) {
    const auto& ba = a.branches[i];
    const auto& bb = b.branches[i];
    if (ba.values != bb.values || ba.other != bb.other) return false;
    if (!same_structure(*ba.child, *bb.child)) return false;
  }
  return true;
}

size_t count_nodes(const FactoredNode& node) {
  size_t n = 1;
  for (const auto& b : node.branches) n += count_nodes(*b.child);
  return n;
}

namespace {

std::unique_ptr<FactoredNode> lift_node(const KnowledgeBase& kb, const DecisionTree& tree,
                                        const TreeNode& src) {
  auto out = std::make_unique<FactoredNode>();
  out->support = src.support;
  if (src.leaf()) {
    ResolvedSet set = parse_label(kb, tree.label_texts[src.label]);
    out->residual.first = std::move(set.first);
    out->residual.second = std::move(set.second);
    return out;
  }
  out->split_attr = src.split_attr;
  for (const auto& [value, child] : src.branches) {
    FactoredNode::Branch b;
    b.values = {value};
    b.child = lift_node(kb, tree, *child);
    out->branches.push_back(std::move(b));
  }
  return out;
}

}  // namespace

FactoredTree lift_tree(const KnowledgeBase& kb, const DecisionTree& tree) {
  FactoredTree out;
  out.schema = tree.schema;
  out.training_rows = tree.training_rows;
  out.source_node_count = tree.node_count;
  out.root = lift_node(kb, tree, *tree.root);
  out.node_count = count_nodes(*out.root);
  return out;
}

void hoist_common(FactoredTree& tree) {
  hoist_node(*tree.root);
  tree.node_count = count_nodes(*tree.root);
}

void merge_values(FactoredTree& tree) {
  merge_node(*tree.root);
  tree.node_count = count_nodes(*tree.root);
}

FactoredTree factorize(const KnowledgeBase& kb, const DecisionTree& tree) {
  FactoredTree out = lift_tree(kb, tree);
  // The rules enable each other; alternate to a joint fixpoint.
  while (true) {
    size_t before = count_nodes(*out.root);
    bool hoisted = hoist_node(*out.root);
    merge_node(*out.root);
    bool collapsed = collapse_degenerate(kb, out.root);
    size_t after = count_nodes(*out.root);
    if (!hoisted && !collapsed && after == before) break;
  }
  sort_hoisted(kb, *out.root);
  out.node_count = count_nodes(*out.root);
  return out;
}

ResolvedSet evaluate_factored(const KnowledgeBase& kb, const FactoredTree& tree,
                              std::span<const int16_t> row) {
  ResolvedSet acc;
  const FactoredNode* node = tree.root.get();
  while (true) {
    append_sorted(nullptr, acc.first, node->hoisted.first);
    append_sorted(nullptr, acc.second, node->hoisted.second);
    if (node->leaf()) {
      append_sorted(nullptr, acc.first, node->residual.first);
      append_sorted(nullptr, acc.second, node->residual.second);
      break;
    }
    int16_t value = row[node->split_attr];
    const FactoredNode* next = nullptr;
    for (const auto& b : node->branches) {
      if (std::find(b.values.begin(), b.values.end(), value) != b.values.end()) {
        next = b.child.get();
        break;
      }
    }
    if (!next) {
      const auto& attr = tree.schema->attrs[node->split_attr];
      std::string name = value >= 0 && value < static_cast<int16_t>(attr.values.size())
                             ? attr.values[value]
                             : std::to_string(value);
      throw Error(Errc::unseen_value,
                  "no branch or recorded <other> member for " + attr.name + " = '" + name + "'");
    }
    node = next;
  }
  kb.sort_elems(acc.first);
  kb.sort_elems(acc.second);
  return acc;
}

namespace {

nlohmann::ordered_json elems_json(const KnowledgeBase& kb, const std::vector<RecElem>& es) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& e : es) arr.push_back(kb.rec_string(e));
  return arr;
}

std::vector<RecElem> elems_from_json(const KnowledgeBase& kb, const nlohmann::json& arr) {
  std::vector<RecElem> out;
  for (const auto& item : arr) {
    std::string text = item.get<std::string>();
    ResolvedSet probe = parse_label(kb, "1:[" + text + "];2:[]");
    if (probe.first.size() != 1)
      throw Error(Errc::label_decode, "bad element '" + text + "'");
    out.push_back(probe.first.front());
  }
  kb.sort_elems(out);
  return out;
}

nlohmann::ordered_json factored_node_json(const KnowledgeBase& kb, const Schema& schema,
                                          const FactoredNode& n) {
  nlohmann::ordered_json j;
  if (!n.hoisted.empty()) {
    nlohmann::ordered_json h;
    h["first"] = elems_json(kb, n.hoisted.first);
    h["second"] = elems_json(kb, n.hoisted.second);
    j["hoisted"] = std::move(h);
  }
  if (n.leaf()) {
    nlohmann::ordered_json r;
    r["first"] = elems_json(kb, n.residual.first);
    r["second"] = elems_json(kb, n.residual.second);
    j["residual"] = std::move(r);
    j["support"] = n.support;
    return j;
  }
  const auto& attr = schema.attrs[n.split_attr];
  j["split"] = attr.name;
  for (const auto& b : n.branches) {
    if (b.other) {
      nlohmann::ordered_json members = nlohmann::ordered_json::array();
      for (int16_t v : b.values) members.push_back(attr.values[v]);
      j["other_values"] = std::move(members);
    }
  }
  nlohmann::ordered_json branches = nlohmann::ordered_json::object();
  for (const auto& b : n.branches) {
    std::string key = b.other ? "<other>" : attr.values[b.values.front()];
    branches[key] = factored_node_json(kb, schema, *b.child);
  }
  j["branches"] = std::move(branches);
  return j;
}

std::unique_ptr<FactoredNode> factored_node_from_json(const KnowledgeBase& kb,
                                                      const Schema& schema,
                                                      const nlohmann::json& j, size_t& nodes) {
  auto n = std::make_unique<FactoredNode>();
  ++nodes;
  if (j.contains("hoisted")) {
    n->hoisted.first = elems_from_json(kb, j.at("hoisted").at("first"));
    n->hoisted.second = elems_from_json(kb, j.at("hoisted").at("second"));
  }
  if (j.contains("residual")) {
    n->residual.first = elems_from_json(kb, j.at("residual").at("first"));
    n->residual.second = elems_from_json(kb, j.at("residual").at("second"));
    n->support = j.value("support", 0u);
    return n;
  }
  std::string attr_name = j.at("split").get<std::string>();
  int attr = -1;
  for (size_t i = 0; i < schema.attrs.size(); ++i)
    if (schema.attrs[i].name == attr_name) attr = static_cast<int>(i);
  if (attr < 0)
    throw Error(Errc::schema_mismatch, "tree splits on unknown attribute '" + attr_name + "'");
  n->split_attr = attr;
  const auto& values = schema.attrs[attr].values;
  auto value_index = [&](const std::string& name) {
    for (size_t i = 0; i < values.size(); ++i)
      if (values[i] == name) return static_cast<int16_t>(i);
    throw Error(Errc::schema_mismatch,
                "attribute '" + attr_name + "' has no value '" + name + "'");
  };
  for (const auto& [key, sub] : j.at("branches").items()) {
    FactoredNode::Branch b;
    if (key == "<other>") {
      b.other = true;
      for (const auto& m : j.at("other_values")) b.values.push_back(value_index(m));
      std::sort(b.values.begin(), b.values.end());
    } else {
      b.values = {value_index(key)};
    }
    b.child = factored_node_from_json(kb, schema, sub, nodes);
    n->support += b.child->support;
    n->branches.push_back(std::move(b));
  }
  order_branches(*n);
  return n;
}

}  // namespace

nlohmann::ordered_json factored_to_json(const KnowledgeBase& kb, const FactoredTree& tree) {
  nlohmann::ordered_json j;
  j["node_count"] = tree.node_count;
  j["source_node_count"] = tree.source_node_count;
  j["training_rows"] = tree.training_rows;
  j["tree"] = factored_node_json(kb, *tree.schema, *tree.root);
  return j;
}

FactoredTree factored_from_json(const KnowledgeBase& kb, const nlohmann::json& j,
                                std::shared_ptr<const Schema> schema) {
  FactoredTree tree;
  tree.schema = std::move(schema);
  size_t nodes = 0;
  tree.root = factored_node_from_json(kb, *tree.schema, j.at("tree"), nodes);
  tree.node_count = nodes;
  tree.source_node_count = j.value("source_node_count", nodes);
  tree.training_rows = j.value("training_rows", 0u);
  return tree;
}

}  // namespace gverify
