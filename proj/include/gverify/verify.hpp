#ifndef GVERIFY_VERIFY_HPP
#define GVERIFY_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gverify/factorize.hpp"
#include "gverify/kb.hpp"

#include "json.hpp"

namespace gverify {

struct Divergence {
  InputVector vector;
  std::string tree_result;  // label-format serialization
  std::string dss_result;
};

struct DivergenceReport {
  uint64_t vectors_checked = 0;
  uint64_t total_divergences = 0;
  uint64_t witness_cap = 100;
  std::vector<Divergence> witnesses;  // first witness_cap divergences, stream order

  bool pass() const { return total_divergences == 0; }
};

// Exhaustive oracle-equivalence sweep: re-enumerates kb and compares
// evaluate_factored against recommend for every realistic vector.
// Throws Error(schema_mismatch) when the tree was built over a different
// attribute universe.
DivergenceReport verify_tree(const KnowledgeBase& kb, const Roles& roles,
                             const FactoredTree& tree, uint64_t max_witnesses = 100,
                             int jobs = 1);

nlohmann::ordered_json report_to_json(const KnowledgeBase& kb, const DivergenceReport& report);

}  // namespace gverify

#endif
