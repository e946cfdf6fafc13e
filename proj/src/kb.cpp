#include "gverify/kb.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace gverify {

std::string_view dose_suffix(DoseMod d) {
  switch (d) {
    case DoseMod::none: return "";
    case DoseMod::increase: return "^+";
    case DoseMod::decrease: return "^-";
  }
  return "";
}

void KnowledgeBase::finalize() {
  for (auto& t : catalog) {
    std::sort(t.components.begin(), t.components.end());
    t.components.erase(std::unique(t.components.begin(), t.components.end()),
                       t.components.end());
    if (t.components.empty()) {
      t.canonical = "no treatment";
    } else {
      std::string out;
      for (size_t i = 0; i < t.components.size(); ++i) {
        if (i) out += '+';
        out += components[t.components[i]];
      }
      t.canonical = std::move(out);
    }
  }
  std::vector<int> order(catalog.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return catalog[a].canonical < catalog[b].canonical;
  });
  canonical_rank.assign(catalog.size(), 0);
  for (size_t r = 0; r < order.size(); ++r) canonical_rank[order[r]] = static_cast<int>(r);
}

int KnowledgeBase::variable_index(std::string_view name) const {
  for (size_t i = 0; i < variables.size(); ++i)
    if (variables[i].name == name) return static_cast<int>(i);
  return -1;
}

int KnowledgeBase::value_index(int var, std::string_view value) const {
  if (var < 0 || var >= static_cast<int>(variables.size())) return -1;
  const auto& dom = variables[var].domain;
  for (size_t i = 0; i < dom.size(); ++i)
    if (dom[i] == value) return static_cast<int>(i);
  return -1;
}

int KnowledgeBase::component_index(std::string_view name) const {
  for (size_t i = 0; i < components.size(); ++i)
    if (components[i] == name) return static_cast<int>(i);
  return -1;
}

int KnowledgeBase::treatment_index(std::string_view name) const {
  for (size_t i = 0; i < catalog.size(); ++i)
    if (catalog[i].name == name) return static_cast<int>(i);
  return -1;
}

int KnowledgeBase::treatment_by_canonical(std::string_view canonical) const {
  for (size_t i = 0; i < catalog.size(); ++i)
    if (catalog[i].canonical == canonical) return static_cast<int>(i);
  return -1;
}

int KnowledgeBase::drug_count(const Treatment& t) const {
  return static_cast<int>(drug_components(t).size());
}

std::vector<int> KnowledgeBase::drug_components(const Treatment& t) const {
  int diet = component_index("diet");
  std::vector<int> out;
  for (int c : t.components)
    if (c != diet) out.push_back(c);
  return out;
}

bool KnowledgeBase::rec_less(const RecElem& a, const RecElem& b) const {
  int ra = canonical_rank[a.treatment];
  int rb = canonical_rank[b.treatment];
  if (ra != rb) return ra < rb;
  return static_cast<int>(a.dose) < static_cast<int>(b.dose);
}

std::string KnowledgeBase::rec_string(const RecElem& e) const {
  std::string out = catalog[e.treatment].canonical;
  out += dose_suffix(e.dose);
  return out;
}

void KnowledgeBase::sort_elems(std::vector<RecElem>& elems) const {
  std::sort(elems.begin(), elems.end(),
            [this](const RecElem& a, const RecElem& b) { return rec_less(a, b); });
}

TreatmentClass classify_treatment(const KnowledgeBase& kb, const Treatment& t) {
  if (t.no_treatment()) return TreatmentClass::no_treatment;
  int slow = kb.component_index("slow_insulin");
  int delayed = kb.component_index("delayed_insulin");
  bool has_slow = slow >= 0 && std::count(t.components.begin(), t.components.end(), slow) > 0;
  bool has_delayed =
      delayed >= 0 && std::count(t.components.begin(), t.components.end(), delayed) > 0;
  if (has_slow && has_delayed) return TreatmentClass::unclassified;
  if (has_slow) return TreatmentClass::insulin_single;
  if (has_delayed) return TreatmentClass::insulin_fractioned;
  switch (kb.drug_count(t)) {
    case 0: return TreatmentClass::diet_only;
    case 1: return TreatmentClass::monotherapy;
    case 2: return TreatmentClass::bitherapy;
    case 3: return TreatmentClass::tritherapy;
    default: return TreatmentClass::unclassified;
  }
}

Roles resolve_roles(const KnowledgeBase& kb) {
  Roles r;
  r.current = kb.variable_index("current");
  r.proposed = kb.variable_index("proposed");
  r.current_type = kb.variable_index("current_type");
  r.problem = kb.variable_index("problem");
  r.efficiency = kb.variable_index("efficiency");
  r.intolerant = kb.variable_index("intolerant_drug");

  if (r.problem >= 0) {
    r.low_efficiency_value = kb.value_index(r.problem, "low_efficiency");
    r.poor_tolerance_value = kb.value_index(r.problem, "poor_tolerance");
  }

  auto map_treatments = [&](int var, std::vector<int>& out) {
    if (var < 0) return;
    for (const auto& value : kb.variables[var].domain)
      out.push_back(kb.treatment_index(value));
  };
  map_treatments(r.current, r.current_treatments);
  map_treatments(r.proposed, r.proposed_treatments);

  if (r.intolerant >= 0)
    for (const auto& value : kb.variables[r.intolerant].domain)
      r.intolerant_components.push_back(kb.component_index(value));

  r.class_values.fill(-1);
  if (r.current_type >= 0)
    for (size_t c = 0; c < kTreatmentClassNames.size(); ++c)
      r.class_values[c] = kb.value_index(r.current_type, kTreatmentClassNames[c]);

  r.treatment_class.reserve(kb.catalog.size());
  for (const auto& t : kb.catalog) r.treatment_class.push_back(classify_treatment(kb, t));
  return r;
}

bool eval_test(const GuardTest& t, const InputVector& v) {
  int16_t val = v.values[t.var];
  switch (t.op) {
    case TestOp::eq:
      return val != kNA && val == t.values[0];
    case TestOp::neq:
      return val != kNA && val != t.values[0];
    case TestOp::in_set:
      if (val == kNA) return false;
      return std::find(t.values.begin(), t.values.end(), val) != t.values.end();
  }
  return false;
}

bool eval_guard(const std::vector<GuardTest>& tests, const InputVector& v) {
  for (const auto& t : tests)
    if (!eval_test(t, v)) return false;
  return true;
}

namespace {

// A VALUE token survives as a bare atom when it only uses atom characters.
bool atom_safe(std::string_view s) {
  if (s.empty()) return false;
  auto atom_char = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '.' || c == '-';
  };
  for (char c : s)
    if (!atom_char(c)) return false;
  return true;
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::string value_token(std::string_view s) {
  return atom_safe(s) ? std::string(s) : quote(s);
}

void write_test(std::ostream& os, const KnowledgeBase& kb, const GuardTest& t) {
  const auto& var = kb.variables[t.var];
  os << var.name;
  switch (t.op) {
    case TestOp::eq:
      os << " = " << value_token(var.domain[t.values[0]]);
      break;
    case TestOp::neq:
      os << " != " << value_token(var.domain[t.values[0]]);
      break;
    case TestOp::in_set: {
      os << " in {";
      for (int v : t.values) os << ' ' << value_token(var.domain[v]);
      os << " }";
      break;
    }
  }
}

void write_tests(std::ostream& os, const KnowledgeBase& kb, const std::vector<GuardTest>& ts) {
  for (size_t i = 0; i < ts.size(); ++i) {
    if (i) os << " and ";
    write_test(os, kb, ts[i]);
  }
}

void write_elems(std::ostream& os, const KnowledgeBase& kb, const std::vector<RecElem>& es) {
  for (const auto& e : es)
    os << ' ' << kb.catalog[e.treatment].name << dose_suffix(e.dose);
}

}  // namespace

std::string serialize_kb(const KnowledgeBase& kb) {
  std::ostringstream os;
  os << "kb " << quote(kb.version) << " {\n";

  if (!kb.components.empty()) {
    os << "\n  components {";
    for (const auto& c : kb.components) os << ' ' << c;
    os << " }\n";
  }

  if (!kb.catalog.empty()) {
    os << '\n';
    for (const auto& t : kb.catalog) {
      os << "  treatment " << t.name << " {";
      for (int c : t.components) os << ' ' << kb.components[c];
      os << " }\n";
    }
  }

  if (!kb.variables.empty()) {
    os << '\n';
    for (const auto& v : kb.variables) {
      os << "  variable " << v.name;
      if (v.conditional()) {
        const auto& g = kb.variables[v.guard_var];
        os << " when " << g.name << " = " << value_token(g.domain[v.guard_value]);
      }
      os << " {";
      for (const auto& d : v.domain) os << ' ' << value_token(d);
      os << " }\n";
    }
  }

  if (!kb.constraints.empty()) {
    os << '\n';
    for (const auto& c : kb.constraints) {
      os << "  exclude " << c.name << " when ";
      write_tests(os, kb, c.tests);
      os << '\n';
    }
  }

  if (!kb.rules.empty()) {
    for (const auto& r : kb.rules) {
      os << "\n  rule " << r.name << " {\n    when ";
      write_tests(os, kb, r.guard);
      os << "\n    first {";
      write_elems(os, kb, r.first_line);
      os << " }\n    second {";
      write_elems(os, kb, r.second_line);
      os << " }\n  }\n";
    }
  }

  os << "}\n";
  return os.str();
}

namespace {

bool tests_equal(const std::vector<GuardTest>& a, const std::vector<GuardTest>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i].var != b[i].var || a[i].op != b[i].op || a[i].values != b[i].values) return false;
  return true;
}

}  // namespace

bool kb_equal(const KnowledgeBase& a, const KnowledgeBase& b) {
  if (a.version != b.version || a.components != b.components) return false;
  if (a.catalog.size() != b.catalog.size() || a.variables.size() != b.variables.size() ||
      a.constraints.size() != b.constraints.size() || a.rules.size() != b.rules.size())
    return false;
  for (size_t i = 0; i < a.catalog.size(); ++i) {
    if (a.catalog[i].name != b.catalog[i].name ||
        a.catalog[i].components != b.catalog[i].components)
      return false;
  }
  for (size_t i = 0; i < a.variables.size(); ++i) {
    const auto& x = a.variables[i];
    const auto& y = b.variables[i];
    if (x.name != y.name || x.domain != y.domain || x.guard_var != y.guard_var ||
        x.guard_value != y.guard_value)
      return false;
  }
  for (size_t i = 0; i < a.constraints.size(); ++i) {
    if (a.constraints[i].name != b.constraints[i].name ||
        !tests_equal(a.constraints[i].tests, b.constraints[i].tests))
      return false;
  }
  for (size_t i = 0; i < a.rules.size(); ++i) {
    const auto& x = a.rules[i];
    const auto& y = b.rules[i];
    if (x.name != y.name || !tests_equal(x.guard, y.guard) || x.first_line != y.first_line ||
        x.second_line != y.second_line)
      return false;
  }
  return true;
}

}  // namespace gverify
