#ifndef GVERIFY_GENERATOR_HPP
#define GVERIFY_GENERATOR_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>

#include "gverify/kb.hpp"

namespace gverify {

struct CountSummary {
  // Product of all declared domain sizes, applicability ignored.
  uint64_t raw_product = 0;
  // Combinations after conditional expansion (inapplicable variables pinned
  // to NA), before structural invariants and constraints.
  uint64_t prefilter = 0;
  // Vectors actually emitted by enumeration.
  uint64_t realistic = 0;
};

// Deterministic exhaustive enumeration of the realistic vector space:
// mixed-radix order over declaration-order variables, inapplicable
// variables pinned to NA, structural invariants (intolerant drug within the
// current treatment, current_type consistent with current) enforced, all
// constraint rules applied. The callback sees vectors in stream order and
// must not retain the reference.
void enumerate_vectors(const KnowledgeBase& kb, const Roles& roles,
                       const std::function<void(uint64_t index, const InputVector&)>& fn);

CountSummary count_vectors(const KnowledgeBase& kb, const Roles& roles);

// True when v satisfies guards, structural invariants and all constraints;
// used for membership spot checks and witness validation.
bool vector_realistic(const KnowledgeBase& kb, const Roles& roles, const InputVector& v);

// CSV per the export contract: header = variable names (+ label + verdict
// when labeled), UTF-8, comma separator, cells quoted when they contain
// ',' '+' '"' or a newline, NA for inapplicable slots.
std::string csv_cell(std::string_view raw);
void export_vectors_csv(const KnowledgeBase& kb, const Roles& roles, std::ostream& out);
void export_labeled_csv(const KnowledgeBase& kb, const Roles& roles, std::ostream& out,
                        int jobs = 1);

}  // namespace gverify

#endif
