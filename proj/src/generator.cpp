#include "gverify/generator.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "gverify/dss.hpp"

namespace gverify {

namespace {

// The structural invariants enforced during enumeration, checked at the
// later of the two variables involved so both values are already assigned.
struct StructuralChecks {
  const KnowledgeBase& kb;
  const Roles& roles;

  bool ok(int var, int16_t value, const InputVector& v) const {
    // current_type must equal the class of the current treatment.
    if (roles.current >= 0 && roles.current_type >= 0) {
      int later = std::max(roles.current, roles.current_type);
      if (var == later) {
        int16_t cur = var == roles.current ? value : v.values[roles.current];
        int16_t type = var == roles.current_type ? value : v.values[roles.current_type];
        if (cur != kNA && type != kNA) {
          int treatment = roles.current_treatments[cur];
          if (treatment < 0) return false;
          TreatmentClass cls = roles.treatment_class[treatment];
          if (cls == TreatmentClass::unclassified) return false;
          if (roles.class_values[static_cast<size_t>(cls)] != type) return false;
        }
      }
    }
    // The intolerant drug must be a component of the current treatment.
    if (roles.current >= 0 && roles.intolerant >= 0) {
      int later = std::max(roles.current, roles.intolerant);
      if (var == later) {
        int16_t cur = var == roles.current ? value : v.values[roles.current];
        int16_t intol = var == roles.intolerant ? value : v.values[roles.intolerant];
        if (cur != kNA && intol != kNA) {
          int treatment = roles.current_treatments[cur];
          if (treatment < 0) return false;
          int component = roles.intolerant_components[intol];
          if (component < 0) return false;
          const auto& comps = kb.catalog[treatment].components;
          if (std::find(comps.begin(), comps.end(), component) == comps.end()) return false;
        }
      }
    }
    return true;
  }
};

bool applicable(const KnowledgeBase& kb, int var, const InputVector& v) {
  const auto& def = kb.variables[var];
  return !def.conditional() || v.values[def.guard_var] == def.guard_value;
}

bool passes_constraints(const KnowledgeBase& kb, const InputVector& v) {
  for (const auto& c : kb.constraints)
    if (eval_guard(c.tests, v)) return false;
  return true;
}

struct Enumerator {
  const KnowledgeBase& kb;
  const Roles& roles;
  StructuralChecks checks;
  InputVector v;
  uint64_t index = 0;
  const std::function<void(uint64_t, const InputVector&)>& fn;

  void run() {
    v.values.assign(kb.variables.size(), kNA);
    recurse(0);
  }

  void recurse(size_t var) {
    if (var == kb.variables.size()) {
      if (passes_constraints(kb, v)) fn(index++, v);
      return;
    }
    if (!applicable(kb, static_cast<int>(var), v)) {
      v.values[var] = kNA;
      recurse(var + 1);
      return;
    }
    int n = static_cast<int>(kb.variables[var].domain.size());
    for (int16_t val = 0; val < n; ++val) {
      if (!checks.ok(static_cast<int>(var), val, v)) continue;
      v.values[var] = val;
      recurse(var + 1);
    }
    v.values[var] = kNA;
  }
};

uint64_t prefilter_count(const KnowledgeBase& kb) {
  // Only variables gating some other variable need explicit branching;
  // every other applicable variable contributes a plain factor.
  std::vector<bool> is_gate(kb.variables.size(), false);
  for (const auto& var : kb.variables)
    if (var.conditional()) is_gate[var.guard_var] = true;

  std::vector<int16_t> vals(kb.variables.size(), kNA);
  auto rec = [&](auto&& self, size_t var) -> uint64_t {
    if (var == kb.variables.size()) return 1;
    const auto& def = kb.variables[var];
    bool active = !def.conditional() || vals[def.guard_var] == def.guard_value;
    if (!active) {
      vals[var] = kNA;
      return self(self, var + 1);
    }
    if (!is_gate[var]) {
      vals[var] = kNA;
      return static_cast<uint64_t>(def.domain.size()) * self(self, var + 1);
    }
    uint64_t total = 0;
    for (int16_t val = 0; val < static_cast<int16_t>(def.domain.size()); ++val) {
      vals[var] = val;
      total += self(self, var + 1);
    }
    vals[var] = kNA;
    return total;
  };
  return rec(rec, 0);
}

}  // namespace

void enumerate_vectors(const KnowledgeBase& kb, const Roles& roles,
                       const std::function<void(uint64_t, const InputVector&)>& fn) {
  Enumerator e{kb, roles, StructuralChecks{kb, roles}, {}, 0, fn};
  e.run();
}

CountSummary count_vectors(const KnowledgeBase& kb, const Roles& roles) {
  CountSummary s;
  s.raw_product = 1;
  for (const auto& var : kb.variables) s.raw_product *= var.domain.size();
  s.prefilter = prefilter_count(kb);
  enumerate_vectors(kb, roles, [&](uint64_t, const InputVector&) { ++s.realistic; });
  return s;
}

bool vector_realistic(const KnowledgeBase& kb, const Roles& roles, const InputVector& v) {
  if (v.values.size() != kb.variables.size()) return false;
  StructuralChecks checks{kb, roles};
  for (size_t var = 0; var < kb.variables.size(); ++var) {
    int16_t val = v.values[var];
    if (!applicable(kb, static_cast<int>(var), v)) {
      if (val != kNA) return false;
      continue;
    }
    if (val == kNA || val < 0 || val >= static_cast<int16_t>(kb.variables[var].domain.size()))
      return false;
    if (!checks.ok(static_cast<int>(var), val, v)) return false;
  }
  return passes_constraints(kb, v);
}

std::string csv_cell(std::string_view raw) {
  bool needs_quote = raw.find_first_of(",+\"\n") != std::string_view::npos;
  if (!needs_quote) return std::string(raw);
  std::string out = "\"";
  for (char c : raw) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

void write_header(const KnowledgeBase& kb, std::ostream& out, bool labeled) {
  for (size_t i = 0; i < kb.variables.size(); ++i) {
    if (i) out << ',';
    out << csv_cell(kb.variables[i].name);
  }
  if (labeled) out << ",label,verdict";
  out << '\n';
}

void write_values(const KnowledgeBase& kb, std::ostream& out, const InputVector& v) {
  for (size_t i = 0; i < kb.variables.size(); ++i) {
    if (i) out << ',';
    int16_t val = v.values[i];
    out << (val == kNA ? "NA" : csv_cell(kb.variables[i].domain[val]));
  }
}

// Label text and verdict for one vector, memoized per (rule, current) since
// the resolved set depends on nothing else.
struct LabelCache {
  const KnowledgeBase& kb;
  const Roles& roles;
  std::map<std::pair<int, int16_t>, std::string> labels;

  std::string_view label_for(const InputVector& v, int rule) {
    int16_t cur = roles.current >= 0 ? v.values[roles.current] : kNA;
    auto key = std::make_pair(rule, cur);
    auto it = labels.find(key);
    if (it == labels.end())
      it = labels.emplace(key, label_vector(kb, roles, v)).first;
    return it->second;
  }
};

}  // namespace

void export_vectors_csv(const KnowledgeBase& kb, const Roles& roles, std::ostream& out) {
  write_header(kb, out, false);
  enumerate_vectors(kb, roles, [&](uint64_t, const InputVector& v) {
    write_values(kb, out, v);
    out << '\n';
  });
}

void export_labeled_csv(const KnowledgeBase& kb, const Roles& roles, std::ostream& out,
                        int jobs) {
  write_header(kb, out, true);
  bool has_verdict = roles.has_dss();

  if (jobs <= 1) {
    LabelCache cache{kb, roles, {}};
    enumerate_vectors(kb, roles, [&](uint64_t index, const InputVector& v) {
      try {
        write_values(kb, out, v);
        out << ',' << csv_cell(cache.label_for(v, match_rule(kb, v))) << ',';
        out << (has_verdict ? verdict_name(critique(kb, roles, v)) : "NA");
        out << '\n';
      } catch (const Error& e) {
        if (e.code() != Errc::no_match && e.code() != Errc::multi_match) throw;
        throw Error(e.code(), "row " + std::to_string(index) + ": " + e.what());
      }
    });
    return;
  }

  // Windowed fan-out: enumeration stays a single stream; each window is
  // labeled in parallel and flushed in enumeration order.
  constexpr size_t kWindow = 16384;
  std::vector<InputVector> window;
  std::vector<std::string> rows;
  auto flush = [&]() {
    if (window.empty()) return;
    rows.assign(window.size(), {});
    size_t n_threads = std::min<size_t>(static_cast<size_t>(jobs), window.size());
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mu;
    for (size_t t = 0; t < n_threads; ++t) {
      pool.emplace_back([&, t]() {
        try {
          LabelCache cache{kb, roles, {}};
          for (size_t i = t; i < window.size(); i += n_threads) {
            const InputVector& v = window[i];
            std::ostringstream os;
            write_values(kb, os, v);
            os << ',' << csv_cell(cache.label_for(v, match_rule(kb, v))) << ',';
            os << (has_verdict ? verdict_name(critique(kb, roles, v)) : "NA");
            os << '\n';
            rows[i] = os.str();
          }
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    for (const auto& r : rows) out << r;
    window.clear();
  };
  enumerate_vectors(kb, roles, [&](uint64_t, const InputVector& v) {
    window.push_back(v);
    if (window.size() >= kWindow) flush();
  });
  flush();
}

}  // namespace gverify
