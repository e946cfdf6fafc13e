#include <algorithm>
#include <set>
#include <sstream>

#include "gverify/dss.hpp"
#include "gverify/generator.hpp"
#include "gverify/kb.hpp"

namespace gverify {

namespace {

void add(std::vector<Finding>& out, std::string code, std::string message) {
  out.push_back({std::move(code), std::move(message)});
}

// Treatments a rule guard can pin the `current` variable to; empty means
// unconstrained. Used to check that dose annotations target a treatment the
// matched vectors can actually be on.
std::vector<int> pinned_currents(const KnowledgeBase& kb, const Roles& roles,
                                 const TherapyRule& rule) {
  std::vector<int> out;
  if (roles.current < 0) return out;
  for (const auto& t : rule.guard) {
    if (t.var != roles.current) continue;
    if (t.op == TestOp::eq || t.op == TestOp::in_set) {
      for (int v : t.values) {
        int treatment = roles.current_treatments[v];
        if (treatment >= 0) out.push_back(treatment);
      }
    }
  }
  return out;
}

}  // namespace

std::vector<Finding> validate_kb(const KnowledgeBase& kb) {
  std::vector<Finding> out;
  Roles roles = resolve_roles(kb);

  for (const auto& var : kb.variables) {
    if (var.domain.size() < 2)
      add(out, "domain-size",
          "variable '" + var.name + "' needs at least 2 values, has " +
              std::to_string(var.domain.size()));
    if (var.conditional() && var.guard_var >= kb.variable_index(var.name))
      add(out, "applicability-order",
          "variable '" + var.name + "' guards on a variable declared later");
  }

  std::set<std::string> canon;
  for (const auto& t : kb.catalog) {
    if (!canon.insert(t.canonical).second)
      add(out, "duplicate-canonical",
          "treatment '" + t.name + "' duplicates canonical form '" + t.canonical + "'");
    if (kb.drug_count(t) >= 4)
      add(out, "quadritherapy",
          "treatment '" + t.name + "' combines " + std::to_string(kb.drug_count(t)) +
              " drugs; quadritherapies are never recommended");
  }

  // Role bindings: reserved variable names must resolve cleanly.
  auto check_treatment_domain = [&](int var, const std::vector<int>& mapped) {
    if (var < 0) return;
    const auto& def = kb.variables[var];
    for (size_t i = 0; i < mapped.size(); ++i)
      if (mapped[i] < 0)
        add(out, "role-binding",
            "variable '" + def.name + "' value '" + def.domain[i] +
                "' is not a catalog treatment");
  };
  check_treatment_domain(roles.current, roles.current_treatments);
  check_treatment_domain(roles.proposed, roles.proposed_treatments);
  if (roles.intolerant >= 0) {
    const auto& def = kb.variables[roles.intolerant];
    for (size_t i = 0; i < roles.intolerant_components.size(); ++i)
      if (roles.intolerant_components[i] < 0)
        add(out, "role-binding",
            "variable '" + def.name + "' value '" + def.domain[i] +
                "' is not a declared component");
  }
  if (roles.current_type >= 0) {
    const auto& def = kb.variables[roles.current_type];
    for (const auto& value : def.domain) {
      bool known = std::find(kTreatmentClassNames.begin(), kTreatmentClassNames.end(),
                             value) != kTreatmentClassNames.end();
      if (!known)
        add(out, "role-binding",
            "variable '" + def.name + "' value '" + value +
                "' is not a treatment class");
    }
    if (roles.current >= 0) {
      for (size_t i = 0; i < roles.current_treatments.size(); ++i) {
        int treatment = roles.current_treatments[i];
        if (treatment < 0) continue;
        TreatmentClass cls = roles.treatment_class[treatment];
        if (cls == TreatmentClass::unclassified)
          add(out, "role-binding",
              "treatment '" + kb.catalog[treatment].name + "' has no treatment class");
        else if (roles.class_values[static_cast<size_t>(cls)] < 0)
          add(out, "role-binding",
              "variable '" + def.name + "' lacks value '" +
                  std::string(kTreatmentClassNames[static_cast<size_t>(cls)]) +
                  "' required by treatment '" + kb.catalog[treatment].name + "'");
      }
    }
  }

  for (const auto& rule : kb.rules) {
    std::set<int> guard_vars;
    for (const auto& t : rule.guard) {
      if (!guard_vars.insert(t.var).second)
        add(out, "guard-repeat",
            "rule '" + rule.name + "' tests variable '" + kb.variables[t.var].name +
                "' more than once");
      if (t.var == roles.proposed)
        add(out, "guard-uses-proposed",
            "rule '" + rule.name + "' guards on the proposed treatment");
    }
    if (rule.first_line.empty())
      add(out, "empty-first-line", "rule '" + rule.name + "' has an empty first line");

    std::vector<int> pins = pinned_currents(kb, roles, rule);
    for (const auto* line : {&rule.first_line, &rule.second_line}) {
      for (const auto& e : *line) {
        if (e.dose == DoseMod::none) continue;
        bool reachable = roles.current < 0 ||
                         std::find(roles.current_treatments.begin(),
                                   roles.current_treatments.end(),
                                   e.treatment) != roles.current_treatments.end();
        if (!reachable) {
          add(out, "dose-target",
              "rule '" + rule.name + "' modifies the dose of '" +
                  kb.catalog[e.treatment].name + "', which can never be the current treatment");
          continue;
        }
        if (!pins.empty() &&
            std::find(pins.begin(), pins.end(), e.treatment) == pins.end())
          add(out, "dose-target",
              "rule '" + rule.name + "' modifies the dose of '" +
                  kb.catalog[e.treatment].name +
                  "' but its guard pins the current treatment elsewhere");
      }
    }
  }

  // Mutual exclusivity and exhaustiveness over the realistic space.
  if (!kb.rules.empty()) {
    constexpr size_t kMaxWitnesses = 3;
    uint64_t uncovered = 0, overlapping = 0;
    std::vector<std::string> uncovered_witnesses;
    std::set<std::pair<int, int>> overlap_pairs;
    std::vector<std::string> overlap_witnesses;
    enumerate_vectors(kb, roles, [&](uint64_t, const InputVector& v) {
      int first = -1;
      int second = -1;
      for (size_t i = 0; i < kb.rules.size(); ++i) {
        if (!eval_guard(kb.rules[i].guard, v)) continue;
        if (first < 0)
          first = static_cast<int>(i);
        else if (second < 0)
          second = static_cast<int>(i);
      }
      if (first < 0) {
        if (uncovered_witnesses.size() < kMaxWitnesses)
          uncovered_witnesses.push_back(vector_to_string(kb, v));
        ++uncovered;
      } else if (second >= 0) {
        if (overlap_pairs.insert({first, second}).second &&
            overlap_witnesses.size() < kMaxWitnesses)
          overlap_witnesses.push_back("rules '" + kb.rules[first].name + "' and '" +
                                      kb.rules[second].name + "' both match " +
                                      vector_to_string(kb, v));
        ++overlapping;
      }
    });
    if (uncovered > 0) {
      std::ostringstream os;
      os << uncovered << " realistic vector(s) match no rule, e.g. ";
      for (size_t i = 0; i < uncovered_witnesses.size(); ++i)
        os << (i ? "; " : "") << uncovered_witnesses[i];
      add(out, "no-rule-match", os.str());
    }
    if (overlapping > 0) {
      std::ostringstream os;
      os << overlapping << " realistic vector(s) match more than one rule: ";
      for (size_t i = 0; i < overlap_witnesses.size(); ++i)
        os << (i ? "; " : "") << overlap_witnesses[i];
      add(out, "rule-overlap", os.str());
    }
  }

  return out;
}

}  // namespace gverify
