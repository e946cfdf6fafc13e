#ifndef GVERIFY_RENDER_HPP
#define GVERIFY_RENDER_HPP

#include <string>

#include "gverify/factorize.hpp"

#include "json.hpp"

namespace gverify {

// Indented outline; hoisted elements shown at their node, <other> groups
// referenced inline and expanded in a trailing legend.
std::string render_text(const KnowledgeBase& kb, const FactoredTree& tree);

// Graphviz digraph: one node statement per tree node, edges labeled with
// the branch value or <other>.
std::string render_dot(const KnowledgeBase& kb, const FactoredTree& tree);

nlohmann::ordered_json render_json(const KnowledgeBase& kb, const FactoredTree& tree);

}  // namespace gverify

#endif
