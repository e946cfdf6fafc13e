#include "gverify/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "gverify/c45.hpp"
#include "gverify/dss.hpp"
#include "gverify/factorize.hpp"
#include "gverify/generator.hpp"
#include "gverify/parser.hpp"
#include "gverify/render.hpp"
#include "gverify/verify.hpp"

namespace gverify {

namespace {

class StageClock {
 public:
  explicit StageClock(std::ostream& diag) : diag_(diag) {}

  void done(const std::string& stage) {
    auto now = std::chrono::steady_clock::now();
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now - last_).count();
    diag_ << "[gverify] " << stage << " (" << ms << " ms)\n";
    last_ = now;
  }

 private:
  std::ostream& diag_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace

int run_pipeline(const PipelineOptions& opts, std::ostream& diag) {
  StageClock clock(diag);

  KnowledgeBase kb;
  try {
    kb = load_kb_file(opts.kb_path);
  } catch (const Error& e) {
    diag << "[gverify] parse: " << e.what() << '\n';
    return kExitIoError;
  }
  clock.done("parse");

  auto findings = validate_kb(kb);
  if (!findings.empty()) {
    for (const auto& f : findings) diag << "[gverify] validate: " << f.code << ": " << f.message << '\n';
    return kExitInvalidKb;
  }
  clock.done("validate");

  Roles roles = resolve_roles(kb);
  CountSummary counts = count_vectors(kb, roles);
  clock.done("enumerate");

  std::error_code ec;
  std::filesystem::create_directories(opts.out_dir, ec);
  if (ec) {
    diag << "[gverify] out dir: " << ec.message() << '\n';
    return kExitIoError;
  }
  auto path = [&](const char* name) {
    return (std::filesystem::path(opts.out_dir) / name).string();
  };

  try {
    std::ostringstream csv;
    export_labeled_csv(kb, roles, csv, opts.jobs);
    write_file(path("vectors.csv"), csv.str());
    clock.done("label");

    Dataset ds = build_dataset(kb, roles);
    DecisionTree tree = build_tree(ds);
    clock.done("learn");

    FactoredTree factored = factorize(kb, tree);
    clock.done("factorize");

    DivergenceReport report = verify_tree(kb, roles, factored, opts.max_witnesses, opts.jobs);
    clock.done("verify");

    write_file(path("tree.json"), render_json(kb, factored).dump(2) + "\n");
    write_file(path("tree.dot"), render_dot(kb, factored));
    write_file(path("tree.txt"), render_text(kb, factored));

    nlohmann::ordered_json manifest;
    manifest["tool"] = "gverify";
    manifest["kb_version"] = kb.version;
    manifest["kb_path"] = opts.kb_path;
    manifest["variables"] = kb.variables.size();
    manifest["treatments"] = kb.catalog.size();
    manifest["constraints"] = kb.constraints.size();
    manifest["rules"] = kb.rules.size();
    manifest["raw_product"] = counts.raw_product;
    manifest["prefilter"] = counts.prefilter;
    manifest["realistic"] = counts.realistic;
    manifest["distinct_labels"] = ds.label_texts.size();
    manifest["node_count_raw"] = tree.node_count;
    manifest["node_count_factored"] = factored.node_count;
    manifest["vectors_checked"] = report.vectors_checked;
    manifest["divergences"] = report.total_divergences;

    nlohmann::ordered_json out;
    out["manifest"] = std::move(manifest);
    nlohmann::ordered_json rj = report_to_json(kb, report);
    out["verification"] = std::move(rj);
    write_file(path("report.json"), out.dump(2) + "\n");
    clock.done("render");

    diag << "[gverify] vectors: " << counts.realistic << ", nodes: " << tree.node_count
         << " -> " << factored.node_count << ", divergences: " << report.total_divergences
         << '\n';
    return report.pass() ? kExitOk : kExitDivergent;
  } catch (const Error& e) {
    diag << "[gverify] " << e.what() << '\n';
    switch (e.code()) {
      case Errc::io:
        return kExitIoError;
      default:
        return kExitInvalidKb;
    }
  }
}

}  // namespace gverify
