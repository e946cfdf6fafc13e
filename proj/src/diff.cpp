#include "gverify/diff.hpp"

#include <algorithm>
#include <sstream>

namespace gverify {

namespace {

std::string line_string(const KnowledgeBase& kb, const LineSets& s) {
  std::string out = "first: [";
  for (size_t i = 0; i < s.first.size(); ++i) {
    if (i) out += ",";
    out += kb.rec_string(s.first[i]);
  }
  out += "] second: [";
  for (size_t i = 0; i < s.second.size(); ++i) {
    if (i) out += ",";
    out += kb.rec_string(s.second[i]);
  }
  out += "]";
  return out;
}

std::string branch_key(const Schema& schema, int attr, const FactoredNode::Branch& b) {
  if (!b.other) return schema.attrs[attr].values[b.values.front()];
  std::string out = "<other> {";
  for (size_t i = 0; i < b.values.size(); ++i) {
    if (i) out += ",";
    out += schema.attrs[attr].values[b.values[i]];
  }
  out += "}";
  return out;
}

struct Differ {
  const KnowledgeBase& kb;
  const Schema& schema;
  TreeDiff& out;

  void note(const std::string& path, std::string kind, std::string a, std::string b) {
    out.entries.push_back({path, std::move(kind), std::move(a), std::move(b)});
  }

  void walk(const std::string& path, const FactoredNode& a, const FactoredNode& b) {
    if (!(a.hoisted == b.hoisted))
      note(path, "hoisted-changed", line_string(kb, a.hoisted), line_string(kb, b.hoisted));
    if (a.leaf() != b.leaf()) {
      note(path, "kind-changed", a.leaf() ? "leaf" : "internal", b.leaf() ? "leaf" : "internal");
      return;
    }
    if (a.leaf()) {
      if (!(a.residual == b.residual))
        note(path, "residual-changed", line_string(kb, a.residual), line_string(kb, b.residual));
      return;
    }
    if (a.split_attr != b.split_attr) {
      note(path, "split-changed", schema.attrs[a.split_attr].name,
           schema.attrs[b.split_attr].name);
      return;
    }
    // Pair branches by their value sets.
    const std::string& attr_name = schema.attrs[a.split_attr].name;
    for (const auto& ba : a.branches) {
      const FactoredNode::Branch* match = nullptr;
      for (const auto& bb : b.branches)
        if (bb.values == ba.values && bb.other == ba.other) match = &bb;
      std::string key = attr_name + "=" + branch_key(schema, a.split_attr, ba);
      std::string sub_path = path.empty() ? key : path + "/" + key;
      if (!match) {
        note(sub_path, "branch-removed", key, "");
        continue;
      }
      walk(sub_path, *ba.child, *match->child);
    }
    for (const auto& bb : b.branches) {
      bool present = std::any_of(a.branches.begin(), a.branches.end(), [&](const auto& ba) {
        return ba.values == bb.values && ba.other == bb.other;
      });
      if (!present) {
        std::string key = attr_name + "=" + branch_key(schema, b.split_attr, bb);
        std::string sub_path = path.empty() ? key : path + "/" + key;
        note(sub_path, "branch-added", "", key);
      }
    }
  }
};

}  // namespace

TreeDiff tree_diff(const KnowledgeBase& kb, const FactoredTree& a, const FactoredTree& b) {
  if (!a.schema || !b.schema || !(*a.schema == *b.schema))
    throw Error(Errc::schema_mismatch, "trees span different attribute universes");
  TreeDiff d;
  Differ differ{kb, *a.schema, d};
  differ.walk("", *a.root, *b.root);
  return d;
}

nlohmann::ordered_json diff_to_json(const TreeDiff& d) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& e : d.entries) {
    nlohmann::ordered_json j;
    j["path"] = e.path;
    j["kind"] = e.kind;
    j["a"] = e.a;
    j["b"] = e.b;
    arr.push_back(std::move(j));
  }
  nlohmann::ordered_json out;
  out["entries"] = std::move(arr);
  out["identical"] = d.empty();
  return out;
}

}  // namespace gverify
