#ifndef GVERIFY_KB_HPP
#define GVERIFY_KB_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gverify/errors.hpp"

namespace gverify {

// Sentinel for "not applicable" slots in an input vector.
inline constexpr int16_t kNA = -1;

struct SourceLoc {
  int line = 0;
  int col = 0;
};

enum class DoseMod : uint8_t { none = 0, increase = 1, decrease = 2 };

std::string_view dose_suffix(DoseMod d);  // "", "^+", "^-"

struct VariableDef {
  std::string name;
  std::vector<std::string> domain;
  // Applicability guard: the variable is meaningful only while
  // variables[guard_var] == guard_value. -1 when unconditional.
  int guard_var = -1;
  int guard_value = -1;
  SourceLoc loc;

  bool conditional() const { return guard_var >= 0; }
};

struct Treatment {
  std::string name;             // DSL identifier
  std::vector<int> components;  // component indices, catalog declaration order
  std::string canonical;        // components joined with '+', or "no treatment"
  SourceLoc loc;

  bool no_treatment() const { return components.empty(); }
};

enum class TestOp : uint8_t { eq, neq, in_set };

struct GuardTest {
  int var = -1;
  TestOp op = TestOp::eq;
  std::vector<int> values;  // one entry for eq/neq, >=1 for in_set
  SourceLoc loc;
};

struct ConstraintRule {
  std::string name;
  std::vector<GuardTest> tests;
  SourceLoc loc;
};

struct RecElem {
  int treatment = -1;
  DoseMod dose = DoseMod::none;

  friend bool operator==(const RecElem&, const RecElem&) = default;
};

struct TherapyRule {
  std::string name;
  std::vector<GuardTest> guard;
  std::vector<RecElem> first_line;
  std::vector<RecElem> second_line;
  SourceLoc loc;
};

// One assignment of the KB's variables: a value index per variable in
// declaration order, kNA for inapplicable slots.
struct InputVector {
  std::vector<int16_t> values;

  friend bool operator==(const InputVector&, const InputVector&) = default;
};

struct KnowledgeBase {
  std::string version;
  std::vector<std::string> components;
  std::vector<Treatment> catalog;
  std::vector<VariableDef> variables;
  std::vector<ConstraintRule> constraints;
  std::vector<TherapyRule> rules;

  // Rank of each catalog entry when sorted by canonical name; fixed by
  // finalize() and used for the canonical ordering of recommendation
  // elements everywhere (labels, renders, set comparisons).
  std::vector<int> canonical_rank;

  // Recomputes canonical names and ranks. Must be called after the catalog
  // is populated or mutated; parse_kb does this automatically.
  void finalize();

  int variable_index(std::string_view name) const;          // -1 if absent
  int value_index(int var, std::string_view value) const;   // -1 if absent
  int component_index(std::string_view name) const;
  int treatment_index(std::string_view name) const;
  int treatment_by_canonical(std::string_view canonical) const;

  // Number of drug components (the reserved component "diet" is not a drug).
  int drug_count(const Treatment& t) const;
  std::vector<int> drug_components(const Treatment& t) const;

  bool rec_less(const RecElem& a, const RecElem& b) const;
  std::string rec_string(const RecElem& e) const;  // "diet+metformin^+"
  void sort_elems(std::vector<RecElem>& elems) const;
};

// The reserved current-type classification. Domain values of a variable
// named "current_type" are matched against these names.
enum class TreatmentClass : uint8_t {
  no_treatment = 0,
  diet_only,
  monotherapy,
  bitherapy,
  tritherapy,
  insulin_single,
  insulin_fractioned,
  unclassified,
};

inline constexpr std::array<std::string_view, 7> kTreatmentClassNames = {
    "no_treatment",   "diet_only",      "monotherapy",       "bitherapy",
    "tritherapy",     "insulin_single", "insulin_fractioned"};

TreatmentClass classify_treatment(const KnowledgeBase& kb, const Treatment& t);

// Bindings of the reserved variable names that carry the critiquing
// semantics. Every member is optional; a KB that declares none of them is a
// plain combinatorial model (still enumerable and learnable).
struct Roles {
  int current = -1;
  int proposed = -1;
  int current_type = -1;
  int problem = -1;
  int efficiency = -1;
  int intolerant = -1;

  int low_efficiency_value = -1;  // value index within problem's domain
  int poor_tolerance_value = -1;

  std::vector<int> current_treatments;     // current domain value -> catalog index
  std::vector<int> proposed_treatments;    // proposed domain value -> catalog index
  std::vector<int> intolerant_components;  // intolerant domain value -> component index
  std::array<int, 7> class_values{};       // TreatmentClass -> current_type value index
  std::vector<TreatmentClass> treatment_class;  // catalog index -> class

  bool has_dss() const { return current >= 0 && proposed >= 0; }
};

Roles resolve_roles(const KnowledgeBase& kb);

// Guard evaluation over an input vector. NA never satisfies a test: eq and
// in_set are false on NA, and neq is also false on NA (a test on an
// inapplicable variable does not fire).
bool eval_test(const GuardTest& t, const InputVector& v);
bool eval_guard(const std::vector<GuardTest>& tests, const InputVector& v);

struct Finding {
  std::string code;
  std::string message;
};

// Structural validation plus the exclusivity/exhaustiveness sweep over the
// realistic vector space. Empty result means the KB is valid.
std::vector<Finding> validate_kb(const KnowledgeBase& kb);

// Deterministic DSL serialization; parse_kb(serialize_kb(kb)) is
// structurally identical to kb.
std::string serialize_kb(const KnowledgeBase& kb);

bool kb_equal(const KnowledgeBase& a, const KnowledgeBase& b);  // ignores locs

}  // namespace gverify

#endif
