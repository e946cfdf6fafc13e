#include "gverify/c45.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "gverify/dss.hpp"
#include "gverify/generator.hpp"

namespace gverify {

Schema schema_from_kb(const KnowledgeBase& kb) {
  Schema s;
  s.attrs.reserve(kb.variables.size());
  for (const auto& var : kb.variables) {
    AttrInfo a;
    a.name = var.name;
    a.values = var.domain;
    if (var.conditional()) {
      a.values.push_back("NA");
      a.has_na = true;
    }
    s.attrs.push_back(std::move(a));
  }
  return s;
}

std::vector<int16_t> encode_row(const Schema& schema, const InputVector& v) {
  std::vector<int16_t> row(schema.attrs.size());
  for (size_t i = 0; i < schema.attrs.size(); ++i) {
    int16_t val = v.values[i];
    if (val == kNA) {
      if (!schema.attrs[i].has_na)
        throw Error(Errc::bad_argument,
                    "attribute '" + schema.attrs[i].name + "' cannot be NA");
      row[i] = schema.attrs[i].na_index();
    } else {
      row[i] = val;
    }
  }
  return row;
}

Dataset build_dataset(const KnowledgeBase& kb, const Roles& roles) {
  Dataset ds;
  ds.schema = std::make_shared<Schema>(schema_from_kb(kb));
  std::unordered_map<std::string, int32_t> intern;
  // Labels depend only on (matched rule, current treatment); cache them.
  std::unordered_map<int64_t, int32_t> cache;
  enumerate_vectors(kb, roles, [&](uint64_t, const InputVector& v) {
    int rule = match_rule(kb, v);
    int16_t cur = roles.current >= 0 ? v.values[roles.current] : kNA;
    int64_t key = (static_cast<int64_t>(rule) << 16) | static_cast<uint16_t>(cur);
    auto hit = cache.find(key);
    int32_t label;
    if (hit != cache.end()) {
      label = hit->second;
    } else {
      std::string text = label_vector(kb, roles, v);
      auto [it, fresh] = intern.emplace(std::move(text), static_cast<int32_t>(ds.label_texts.size()));
      if (fresh) ds.label_texts.push_back(it->first);
      label = it->second;
      cache.emplace(key, label);
    }
    auto row = encode_row(*ds.schema, v);
    ds.cells.insert(ds.cells.end(), row.begin(), row.end());
    ds.labels.push_back(label);
    ++ds.n_rows;
  });
  return ds;
}

double entropy(std::span<const uint64_t> counts) {
  uint64_t total = 0;
  for (uint64_t c : counts) total += c;
  if (total == 0)
    throw Error(Errc::empty_distribution, "entropy of an empty distribution");
  double h = 0.0;
  for (uint64_t c : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

namespace {

constexpr double kGainEps = 1e-12;

double entropy_of_map(const std::unordered_map<int32_t, uint64_t>& counts, uint64_t total) {
  double h = 0.0;
  for (const auto& [label, c] : counts) {
    double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace

SplitStats attribute_stats(const Dataset& ds, std::span<const uint32_t> rows, int attr) {
  if (attr < 0 || attr >= static_cast<int>(ds.n_attrs()))
    throw Error(Errc::bad_argument, "unknown attribute index " + std::to_string(attr));
  if (rows.empty()) throw Error(Errc::bad_argument, "empty row set");

  size_t n_values = ds.schema->attrs[attr].values.size();
  std::vector<uint64_t> value_totals(n_values, 0);
  std::vector<std::unordered_map<int32_t, uint64_t>> value_classes(n_values);
  std::unordered_map<int32_t, uint64_t> classes;
  for (uint32_t r : rows) {
    int16_t v = ds.cell(r, attr);
    ++value_totals[v];
    ++value_classes[v][ds.labels[r]];
    ++classes[ds.labels[r]];
  }

  size_t present = 0;
  for (uint64_t t : value_totals)
    if (t > 0) ++present;
  SplitStats stats;
  if (present <= 1) return stats;  // single represented value: all zero

  uint64_t total = rows.size();
  double base = entropy_of_map(classes, total);
  double remainder = 0.0;
  double split_info = 0.0;
  for (size_t v = 0; v < n_values; ++v) {
    if (value_totals[v] == 0) continue;
    double w = static_cast<double>(value_totals[v]) / static_cast<double>(total);
    remainder += w * entropy_of_map(value_classes[v], value_totals[v]);
    split_info -= w * std::log2(w);
  }
  stats.info_gain = base - remainder;
  if (stats.info_gain < 0 && stats.info_gain > -1e-12) stats.info_gain = 0.0;
  stats.split_info = split_info;
  stats.gain_ratio = split_info > 0 ? stats.info_gain / split_info : 0.0;
  return stats;
}

SplitStats gain_ratio(const Dataset& ds, int attr) {
  std::vector<uint32_t> rows(ds.n_rows);
  for (uint64_t i = 0; i < ds.n_rows; ++i) rows[i] = static_cast<uint32_t>(i);
  return attribute_stats(ds, rows, attr);
}

namespace {

struct Builder {
  const Dataset& ds;
  size_t nodes = 0;

  std::unique_ptr<TreeNode> build(std::vector<uint32_t>& rows) {
    auto node = std::make_unique<TreeNode>();
    node->support = rows.size();
    ++nodes;

    int32_t first_label = ds.labels[rows[0]];
    bool pure = std::all_of(rows.begin(), rows.end(),
                            [&](uint32_t r) { return ds.labels[r] == first_label; });
    if (pure) {
      node->label = first_label;
      return node;
    }

    int best = -1;
    double best_ratio = -1.0;
    for (int attr = 0; attr < static_cast<int>(ds.n_attrs()); ++attr) {
      SplitStats stats = attribute_stats(ds, rows, attr);
      if (stats.info_gain <= kGainEps) continue;
      if (stats.gain_ratio > best_ratio) {
        best_ratio = stats.gain_ratio;
        best = attr;
      }
    }
    if (best < 0) {
      // Mixed node where no attribute carries gain (parity-style label
      // structure). Splitting on the first attribute that still varies
      // keeps the zero-training-error guarantee.
      for (int attr = 0; attr < static_cast<int>(ds.n_attrs()); ++attr) {
        int16_t v0 = ds.cell(rows[0], attr);
        bool varies = std::any_of(rows.begin(), rows.end(),
                                  [&](uint32_t r) { return ds.cell(r, attr) != v0; });
        if (varies) {
          best = attr;
          break;
        }
      }
    }
    if (best < 0) {
      uint32_t a = rows[0];
      uint32_t b = *std::find_if(rows.begin(), rows.end(), [&](uint32_t r) {
        return ds.labels[r] != first_label;
      });
      throw Error(Errc::non_functional,
                  "identical rows " + std::to_string(a) + " and " + std::to_string(b) +
                      " carry labels '" + ds.label_texts[ds.labels[a]] + "' and '" +
                      ds.label_texts[ds.labels[b]] + "'");
    }

    node->split_attr = best;
    size_t n_values = ds.schema->attrs[best].values.size();
    std::vector<std::vector<uint32_t>> parts(n_values);
    for (uint32_t r : rows) parts[ds.cell(r, best)].push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    for (size_t v = 0; v < n_values; ++v) {
      if (parts[v].empty()) continue;
      node->branches.emplace_back(static_cast<int16_t>(v), build(parts[v]));
    }
    return node;
  }
};

}  // namespace

DecisionTree build_tree(const Dataset& ds) {
  if (ds.n_rows == 0) throw Error(Errc::bad_argument, "empty dataset");
  DecisionTree tree;
  tree.schema = ds.schema;
  tree.label_texts = ds.label_texts;
  tree.training_rows = ds.n_rows;
  std::vector<uint32_t> rows(ds.n_rows);
  for (uint64_t i = 0; i < ds.n_rows; ++i) rows[i] = static_cast<uint32_t>(i);
  Builder b{ds};
  tree.root = b.build(rows);
  tree.node_count = b.nodes;
  return tree;
}

int32_t classify(const DecisionTree& tree, std::span<const int16_t> row) {
  const TreeNode* node = tree.root.get();
  while (!node->leaf()) {
    int16_t value = row[node->split_attr];
    const TreeNode* next = nullptr;
    for (const auto& [v, child] : node->branches) {
      if (v == value) {
        next = child.get();
        break;
      }
    }
    if (!next) {
      const auto& attr = tree.schema->attrs[node->split_attr];
      std::string name = value >= 0 && value < static_cast<int16_t>(attr.values.size())
                             ? attr.values[value]
                             : std::to_string(value);
      throw Error(Errc::unseen_value,
                  "no branch for " + attr.name + " = '" + name + "'");
    }
    node = next;
  }
  return node->label;
}

size_t count_nodes(const TreeNode& node) {
  size_t n = 1;
  for (const auto& [v, child] : node.branches) n += count_nodes(*child);
  return n;
}

namespace {

nlohmann::ordered_json node_to_json(const DecisionTree& tree, const TreeNode& node) {
  nlohmann::ordered_json j;
  if (node.leaf()) {
    j["label"] = tree.label_texts[node.label];
    j["support"] = node.support;
    return j;
  }
  const auto& attr = tree.schema->attrs[node.split_attr];
  j["split"] = attr.name;
  nlohmann::ordered_json branches = nlohmann::ordered_json::object();
  for (const auto& [v, child] : node.branches)
    branches[attr.values[v]] = node_to_json(tree, *child);
  j["branches"] = std::move(branches);
  return j;
}

std::unique_ptr<TreeNode> node_from_json(const nlohmann::json& j, const Schema& schema,
                                         std::unordered_map<std::string, int32_t>& intern,
                                         std::vector<std::string>& label_texts,
                                         size_t& nodes, uint64_t& support_total) {
  auto node = std::make_unique<TreeNode>();
  ++nodes;
  if (j.contains("label")) {
    std::string text = j.at("label").get<std::string>();
    auto [it, fresh] = intern.emplace(text, static_cast<int32_t>(label_texts.size()));
    if (fresh) label_texts.push_back(text);
    node->label = it->second;
    node->support = j.value("support", 0u);
    support_total += node->support;
    return node;
  }
  std::string attr_name = j.at("split").get<std::string>();
  int attr = -1;
  for (size_t i = 0; i < schema.attrs.size(); ++i)
    if (schema.attrs[i].name == attr_name) attr = static_cast<int>(i);
  if (attr < 0)
    throw Error(Errc::schema_mismatch, "tree splits on unknown attribute '" + attr_name + "'");
  node->split_attr = attr;
  const auto& values = schema.attrs[attr].values;
  for (const auto& [value_name, sub] : j.at("branches").items()) {
    int16_t value = -1;
    for (size_t i = 0; i < values.size(); ++i)
      if (values[i] == value_name) value = static_cast<int16_t>(i);
    if (value < 0)
      throw Error(Errc::schema_mismatch, "attribute '" + attr_name + "' has no value '" +
                                             value_name + "'");
    uint64_t sub_support = 0;
    auto child = node_from_json(sub, schema, intern, label_texts, nodes, sub_support);
    node->support += sub_support;
    support_total += sub_support;
    node->branches.emplace_back(value, std::move(child));
  }
  std::sort(node->branches.begin(), node->branches.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return node;
}

}  // namespace

nlohmann::ordered_json tree_to_json(const DecisionTree& tree) {
  return node_to_json(tree, *tree.root);
}

DecisionTree tree_from_json(const nlohmann::json& j, std::shared_ptr<const Schema> schema) {
  DecisionTree tree;
  tree.schema = std::move(schema);
  std::unordered_map<std::string, int32_t> intern;
  size_t nodes = 0;
  uint64_t support = 0;
  tree.root = node_from_json(j, *tree.schema, intern, tree.label_texts, nodes, support);
  tree.node_count = nodes;
  tree.training_rows = support;
  return tree;
}

}  // namespace gverify
