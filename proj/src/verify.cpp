#include "gverify/verify.hpp"

#include <mutex>
#include <thread>

#include "gverify/c45.hpp"
#include "gverify/dss.hpp"
#include "gverify/generator.hpp"

namespace gverify {

namespace {

void check_schema(const KnowledgeBase& kb, const FactoredTree& tree) {
  Schema expected = schema_from_kb(kb);
  if (!tree.schema || !(*tree.schema == expected))
    throw Error(Errc::schema_mismatch,
                "tree attribute universe does not match this KB's variables");
}

}  // namespace

DivergenceReport verify_tree(const KnowledgeBase& kb, const Roles& roles,
                             const FactoredTree& tree, uint64_t max_witnesses, int jobs) {
  check_schema(kb, tree);
  DivergenceReport report;
  report.witness_cap = max_witnesses;

  auto compare_one = [&](const InputVector& v) -> std::optional<Divergence> {
    auto row = encode_row(*tree.schema, v);
    ResolvedSet dss = recommend(kb, roles, v);
    ResolvedSet from_tree;
    std::string tree_text;
    try {
      from_tree = evaluate_factored(kb, tree, row);
      if (from_tree == dss) return std::nullopt;
      tree_text = make_label(kb, from_tree);
    } catch (const Error& e) {
      if (e.code() != Errc::unseen_value) throw;
      tree_text = std::string("<error: ") + e.what() + ">";
    }
    return Divergence{v, tree_text, make_label(kb, dss)};
  };

  if (jobs <= 1) {
    enumerate_vectors(kb, roles, [&](uint64_t, const InputVector& v) {
      ++report.vectors_checked;
      auto d = compare_one(v);
      if (!d) return;
      ++report.total_divergences;
      if (report.witnesses.size() < max_witnesses) report.witnesses.push_back(std::move(*d));
    });
    return report;
  }

  // Windowed fan-out, witnesses merged back in enumeration order.
  constexpr size_t kWindow = 16384;
  std::vector<InputVector> window;
  auto flush = [&]() {
    if (window.empty()) return;
    std::vector<std::optional<Divergence>> found(window.size());
    size_t n_threads = std::min<size_t>(static_cast<size_t>(jobs), window.size());
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mu;
    for (size_t t = 0; t < n_threads; ++t) {
      pool.emplace_back([&, t]() {
        try {
          for (size_t i = t; i < window.size(); i += n_threads) found[i] = compare_one(window[i]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    for (auto& d : found) {
      ++report.vectors_checked;
      if (!d) continue;
      ++report.total_divergences;
      if (report.witnesses.size() < max_witnesses) report.witnesses.push_back(std::move(*d));
    }
    window.clear();
  };
  enumerate_vectors(kb, roles, [&](uint64_t, const InputVector& v) {
    window.push_back(v);
    if (window.size() >= kWindow) flush();
  });
  flush();
  return report;
}

nlohmann::ordered_json report_to_json(const KnowledgeBase& kb, const DivergenceReport& report) {
  nlohmann::ordered_json j;
  j["vectors_checked"] = report.vectors_checked;
  j["total_divergences"] = report.total_divergences;
  j["witness_cap"] = report.witness_cap;
  nlohmann::ordered_json ws = nlohmann::ordered_json::array();
  for (const auto& d : report.witnesses) {
    nlohmann::ordered_json w;
    nlohmann::ordered_json vec = nlohmann::ordered_json::object();
    for (size_t i = 0; i < kb.variables.size(); ++i) {
      int16_t val = d.vector.values[i];
      vec[kb.variables[i].name] = val == kNA ? "NA" : kb.variables[i].domain[val];
    }
    w["vector"] = std::move(vec);
    w["tree"] = d.tree_result;
    w["dss"] = d.dss_result;
    ws.push_back(std::move(w));
  }
  j["witnesses"] = std::move(ws);
  return j;
}

}  // namespace gverify
