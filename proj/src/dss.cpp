#include "gverify/dss.hpp"

#include <algorithm>
#include <sstream>

namespace gverify {

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::conform: return "conform";
    case Verdict::not_optimal: return "not_optimal";
    case Verdict::non_conform: return "non_conform";
  }
  return "non_conform";
}

std::string vector_to_string(const KnowledgeBase& kb, const InputVector& v) {
  std::ostringstream os;
  os << '{';
  for (size_t i = 0; i < kb.variables.size(); ++i) {
    if (i) os << ", ";
    os << kb.variables[i].name << '=';
    int16_t val = v.values[i];
    os << (val == kNA ? "NA" : kb.variables[i].domain[val]);
  }
  os << '}';
  return os.str();
}

int match_rule(const KnowledgeBase& kb, const InputVector& v) {
  int matched = -1;
  for (size_t i = 0; i < kb.rules.size(); ++i) {
    if (!eval_guard(kb.rules[i].guard, v)) continue;
    if (matched >= 0)
      throw Error(Errc::multi_match,
                  "rules '" + kb.rules[matched].name + "' and '" + kb.rules[i].name +
                      "' both match " + vector_to_string(kb, v));
    matched = static_cast<int>(i);
  }
  if (matched < 0)
    throw Error(Errc::no_match, "no rule matches " + vector_to_string(kb, v));
  return matched;
}

namespace {

int current_treatment_of(const Roles& roles, const InputVector& v) {
  if (roles.current < 0) return -1;
  int16_t val = v.values[roles.current];
  if (val == kNA) return -1;
  return roles.current_treatments[val];
}

// Dose-annotated elements only make sense against the vector's current
// treatment; an annotation aimed at anything else is dropped.
std::vector<RecElem> resolve_line(const KnowledgeBase& kb, const std::vector<RecElem>& line,
                                  int current_treatment) {
  std::vector<RecElem> out;
  out.reserve(line.size());
  for (const auto& e : line) {
    if (e.dose != DoseMod::none && e.treatment != current_treatment) continue;
    out.push_back(e);
  }
  kb.sort_elems(out);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

ResolvedSet recommend(const KnowledgeBase& kb, const Roles& roles, const InputVector& v) {
  const TherapyRule& rule = kb.rules[match_rule(kb, v)];
  int current = current_treatment_of(roles, v);
  ResolvedSet set;
  set.first = resolve_line(kb, rule.first_line, current);
  set.second = resolve_line(kb, rule.second_line, current);
  return set;
}

ProposedAction derive_action(const KnowledgeBase& kb, const Roles& roles,
                             const InputVector& v) {
  (void)kb;
  if (roles.proposed < 0)
    throw Error(Errc::bad_argument, "KB declares no 'proposed' variable");
  int16_t pv = v.values[roles.proposed];
  if (pv == kNA) throw Error(Errc::bad_argument, "proposed treatment is NA");
  ProposedAction action;
  action.treatment = roles.proposed_treatments[pv];
  int current = current_treatment_of(roles, v);
  if (action.treatment >= 0 && action.treatment == current && roles.problem >= 0) {
    int16_t problem = v.values[roles.problem];
    if (problem != kNA && problem == roles.low_efficiency_value)
      action.dose = DoseMod::increase;
    else if (problem != kNA && problem == roles.poor_tolerance_value)
      action.dose = DoseMod::decrease;
  }
  return action;
}

Verdict critique(const KnowledgeBase& kb, const Roles& roles, const InputVector& v) {
  ResolvedSet set = recommend(kb, roles, v);
  ProposedAction action = derive_action(kb, roles, v);
  RecElem probe{action.treatment, action.dose};
  auto contains = [&](const std::vector<RecElem>& line) {
    return std::find(line.begin(), line.end(), probe) != line.end();
  };
  if (contains(set.first)) return Verdict::conform;
  if (contains(set.second)) return Verdict::not_optimal;
  return Verdict::non_conform;
}

std::string make_label(const KnowledgeBase& kb, const ResolvedSet& set) {
  auto line = [&](const std::vector<RecElem>& es) {
    std::string out;
    for (size_t i = 0; i < es.size(); ++i) {
      if (i) out += ',';
      out += kb.rec_string(es[i]);
    }
    return out;
  };
  return "1:[" + line(set.first) + "];2:[" + line(set.second) + "]";
}

std::string label_vector(const KnowledgeBase& kb, const Roles& roles, const InputVector& v) {
  return make_label(kb, recommend(kb, roles, v));
}

namespace {

RecElem parse_elem(const KnowledgeBase& kb, std::string_view text, std::string_view label) {
  RecElem e;
  if (text.size() >= 2 && text.substr(text.size() - 2) == "^+") {
    e.dose = DoseMod::increase;
    text.remove_suffix(2);
  } else if (text.size() >= 2 && text.substr(text.size() - 2) == "^-") {
    e.dose = DoseMod::decrease;
    text.remove_suffix(2);
  }
  e.treatment = kb.treatment_by_canonical(text);
  if (e.treatment < 0)
    throw Error(Errc::label_decode, "label '" + std::string(label) +
                                        "' names unknown treatment '" + std::string(text) + "'");
  return e;
}

std::vector<RecElem> parse_line(const KnowledgeBase& kb, std::string_view body,
                                std::string_view label) {
  std::vector<RecElem> out;
  if (body.empty()) return out;
  size_t start = 0;
  while (true) {
    size_t comma = body.find(',', start);
    std::string_view item =
        comma == std::string_view::npos ? body.substr(start) : body.substr(start, comma - start);
    out.push_back(parse_elem(kb, item, label));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

ResolvedSet parse_label(const KnowledgeBase& kb, std::string_view label) {
  // Shape: 1:[...];2:[...]
  auto bad = [&](const char* why) -> Error {
    return Error(Errc::label_decode,
                 "malformed label '" + std::string(label) + "': " + why);
  };
  if (label.substr(0, 3) != "1:[") throw bad("expected '1:[' prefix");
  size_t close1 = label.find("];2:[", 3);
  if (close1 == std::string_view::npos) throw bad("expected '];2:[' separator");
  if (label.empty() || label.back() != ']') throw bad("expected ']' suffix");
  std::string_view first = label.substr(3, close1 - 3);
  std::string_view second = label.substr(close1 + 5, label.size() - close1 - 6);
  ResolvedSet set;
  set.first = parse_line(kb, first, label);
  set.second = parse_line(kb, second, label);
  kb.sort_elems(set.first);
  kb.sort_elems(set.second);
  return set;
}

InputVector make_vector(const KnowledgeBase& kb,
                        const std::vector<std::pair<std::string, std::string>>& assignment) {
  InputVector v;
  v.values.assign(kb.variables.size(), kNA);
  std::vector<bool> seen(kb.variables.size(), false);
  for (const auto& [name, value] : assignment) {
    int var = kb.variable_index(name);
    if (var < 0) throw Error(Errc::bad_argument, "unknown variable '" + name + "'");
    if (seen[var]) throw Error(Errc::bad_argument, "variable '" + name + "' set twice");
    seen[var] = true;
    if (value == "NA") {
      v.values[var] = kNA;
      continue;
    }
    int idx = kb.value_index(var, value);
    if (idx < 0)
      throw Error(Errc::bad_argument,
                  "variable '" + name + "' has no value '" + value + "'");
    v.values[var] = static_cast<int16_t>(idx);
  }
  for (size_t i = 0; i < kb.variables.size(); ++i) {
    if (seen[i] || kb.variables[i].conditional()) continue;
    throw Error(Errc::bad_argument,
                "variable '" + kb.variables[i].name + "' is not assigned");
  }
  return v;
}

}  // namespace gverify
