#ifndef GVERIFY_DSS_HPP
#define GVERIFY_DSS_HPP

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gverify/kb.hpp"

namespace gverify {

enum class Verdict : uint8_t { non_conform = 0, not_optimal = 1, conform = 2 };

std::string_view verdict_name(Verdict v);

// A recommendation set after dose resolution against a concrete vector:
// both lines sorted canonically, dose-annotated elements kept only when
// their treatment equals the vector's current treatment.
struct ResolvedSet {
  std::vector<RecElem> first;
  std::vector<RecElem> second;

  friend bool operator==(const ResolvedSet&, const ResolvedSet&) = default;
};

struct ProposedAction {
  int treatment = -1;
  DoseMod dose = DoseMod::none;
};

// Returns the index of the unique rule whose guard matches v.
// Throws Error(no_match) / Error(multi_match) with the offending vector and
// rule names; a failure here is a KB exclusivity/exhaustiveness defect.
int match_rule(const KnowledgeBase& kb, const InputVector& v);

ResolvedSet recommend(const KnowledgeBase& kb, const Roles& roles, const InputVector& v);

// Dose rule: proposing the current treatment means modifying its dose,
// increased for low efficiency and decreased for poor tolerance.
ProposedAction derive_action(const KnowledgeBase& kb, const Roles& roles, const InputVector& v);

Verdict critique(const KnowledgeBase& kb, const Roles& roles, const InputVector& v);

// Canonical class-label serialization: "1:[e1,e2,...];2:[f1,...]" with
// elements sorted by canonical treatment name then dose modifier.
std::string make_label(const KnowledgeBase& kb, const ResolvedSet& set);
std::string label_vector(const KnowledgeBase& kb, const Roles& roles, const InputVector& v);

// Inverse of make_label; throws Error(label_decode) for text this KB's
// serializer cannot have produced.
ResolvedSet parse_label(const KnowledgeBase& kb, std::string_view label);

// Builds a vector from (variable, value) pairs; unset conditional variables
// become NA. Throws Error(bad_argument) on unknown names/values or when a
// non-conditional variable is missing.
InputVector make_vector(const KnowledgeBase& kb,
                        const std::vector<std::pair<std::string, std::string>>& assignment);

std::string vector_to_string(const KnowledgeBase& kb, const InputVector& v);

}  // namespace gverify

#endif
