#include "gverify/render.hpp"

#include <sstream>

namespace gverify {

namespace {

std::string elems_line(const KnowledgeBase& kb, const std::vector<RecElem>& es) {
  std::string out;
  for (size_t i = 0; i < es.size(); ++i) {
    if (i) out += ", ";
    out += kb.rec_string(es[i]);
  }
  return out;
}

struct OtherGroup {
  std::string id;
  int attr;
  std::vector<int16_t> values;
};

void render_text_node(const KnowledgeBase& kb, const Schema& schema, const FactoredNode& n,
                      int depth, std::ostringstream& os, std::vector<OtherGroup>& legend) {
  std::string pad(static_cast<size_t>(depth) * 2, ' ');
  if (!n.hoisted.first.empty())
    os << pad << "+ first: " << elems_line(kb, n.hoisted.first) << '\n';
  if (!n.hoisted.second.empty())
    os << pad << "+ second: " << elems_line(kb, n.hoisted.second) << '\n';
  if (n.leaf()) {
    os << pad << "=> first: [" << elems_line(kb, n.residual.first) << "] second: ["
       << elems_line(kb, n.residual.second) << "]  (n=" << n.support << ")\n";
    return;
  }
  const auto& attr = schema.attrs[n.split_attr];
  for (const auto& b : n.branches) {
    if (b.other) {
      OtherGroup g;
      g.id = "<other#" + std::to_string(legend.size() + 1) + ">";
      g.attr = n.split_attr;
      g.values = b.values;
      os << pad << attr.name << " = " << g.id << ":\n";
      legend.push_back(g);
      render_text_node(kb, schema, *b.child, depth + 1, os, legend);
    } else {
      os << pad << attr.name << " = " << attr.values[b.values.front()] << ":\n";
      render_text_node(kb, schema, *b.child, depth + 1, os, legend);
    }
  }
}

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

void render_dot_node(const KnowledgeBase& kb, const Schema& schema, const FactoredNode& n,
                     int& next_id, std::ostringstream& os) {
  int id = next_id++;
  std::ostringstream label;
  if (n.leaf()) {
    label << "first: [" << elems_line(kb, n.residual.first) << "]\\nsecond: ["
          << elems_line(kb, n.residual.second) << "]\\nn=" << n.support;
  } else {
    label << schema.attrs[n.split_attr].name;
  }
  if (!n.hoisted.first.empty())
    label << "\\n+ first: " << elems_line(kb, n.hoisted.first);
  if (!n.hoisted.second.empty())
    label << "\\n+ second: " << elems_line(kb, n.hoisted.second);
  os << "  n" << id << " [shape=" << (n.leaf() ? "box" : "ellipse") << ", label=\""
     << dot_escape(label.str()) << "\"];\n";
  for (const auto& b : n.branches) {
    const auto& attr = schema.attrs[n.split_attr];
    std::string edge;
    if (b.other) {
      edge = "<other> {";
      for (size_t i = 0; i < b.values.size(); ++i) {
        if (i) edge += ", ";
        edge += attr.values[b.values[i]];
      }
      edge += "}";
    } else {
      edge = attr.values[b.values.front()];
    }
    int child_id = next_id;
    render_dot_node(kb, schema, *b.child, next_id, os);
    os << "  n" << id << " -> n" << child_id << " [label=\"" << dot_escape(edge) << "\"];\n";
  }
}

}  // namespace

std::string render_text(const KnowledgeBase& kb, const FactoredTree& tree) {
  std::ostringstream os;
  os << "tree: " << tree.node_count << " nodes (" << tree.source_node_count
     << " before factorization), " << tree.training_rows << " training rows\n";
  std::vector<OtherGroup> legend;
  render_text_node(kb, *tree.schema, *tree.root, 0, os, legend);
  if (!legend.empty()) {
    os << "legend:\n";
    for (const auto& g : legend) {
      os << "  " << g.id << " = " << tree.schema->attrs[g.attr].name << " in {";
      for (size_t i = 0; i < g.values.size(); ++i) {
        if (i) os << ", ";
        os << tree.schema->attrs[g.attr].values[g.values[i]];
      }
      os << "}\n";
    }
  }
  return os.str();
}

std::string render_dot(const KnowledgeBase& kb, const FactoredTree& tree) {
  std::ostringstream os;
  os << "digraph gverify_tree {\n";
  os << "  graph [rankdir=LR];\n";
  int next_id = 0;
  render_dot_node(kb, *tree.schema, *tree.root, next_id, os);
  os << "}\n";
  return os.str();
}

nlohmann::ordered_json render_json(const KnowledgeBase& kb, const FactoredTree& tree) {
  return factored_to_json(kb, tree);
}

}  // namespace gverify
