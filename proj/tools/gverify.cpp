#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "gverify/c45.hpp"
#include "gverify/diff.hpp"
#include "gverify/dss.hpp"
#include "gverify/factorize.hpp"
#include "gverify/generator.hpp"
#include "gverify/parser.hpp"
#include "gverify/pipeline.hpp"
#include "gverify/render.hpp"
#include "gverify/verify.hpp"

namespace {

using namespace gverify;

int default_jobs() {
  if (const char* env = std::getenv("GVERIFY_JOBS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
    return;
  }
  write_file(out_path, content);
}

KnowledgeBase load_valid_kb(const std::string& path) {
  KnowledgeBase kb = load_kb_file(path);
  auto findings = validate_kb(kb);
  if (!findings.empty()) {
    for (const auto& f : findings)
      std::cerr << path << ": " << f.code << ": " << f.message << '\n';
    throw Error(Errc::bad_argument, "knowledge base '" + path + "' has validation findings");
  }
  return kb;
}

FactoredTree tree_for(const KnowledgeBase& kb, const std::string& tree_path) {
  auto schema = std::make_shared<Schema>(schema_from_kb(kb));
  if (!tree_path.empty()) {
    auto j = nlohmann::json::parse(read_file(tree_path));
    return factored_from_json(kb, j, schema);
  }
  Roles roles = resolve_roles(kb);
  Dataset ds = build_dataset(kb, roles);
  DecisionTree tree = build_tree(ds);
  return factorize(kb, tree);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"black-box verification toolkit for rule-based critiquing systems"};
  app.require_subcommand(1);

  std::string kb_path, out_path, tree_path, format = "text";
  std::string diff_a, diff_b;
  int jobs = default_jobs();
  uint64_t max_witnesses = 100;

  auto* c_pipeline = app.add_subcommand("pipeline", "run the full verification pipeline");
  c_pipeline->add_option("kb", kb_path, "knowledge base file")->required();
  std::string out_dir;
  c_pipeline->add_option("--out", out_dir, "output directory")->required();
  c_pipeline->add_option("--jobs", jobs, "worker threads");
  c_pipeline->add_option("--max-witnesses", max_witnesses, "divergence witnesses kept");

  auto* c_validate = app.add_subcommand("validate", "parse and validate a knowledge base");
  c_validate->add_option("kb", kb_path)->required();

  auto* c_generate = app.add_subcommand("generate", "enumerate realistic input vectors");
  c_generate->add_option("kb", kb_path)->required();
  c_generate->add_option("-o,--out", out_path, "output file (default stdout)");

  auto* c_label = app.add_subcommand("label", "enumerate and label vectors (CSV)");
  c_label->add_option("kb", kb_path)->required();
  c_label->add_option("-o,--out", out_path);
  c_label->add_option("--jobs", jobs);

  auto* c_learn = app.add_subcommand("learn", "induce the unpruned decision tree");
  c_learn->add_option("kb", kb_path)->required();
  c_learn->add_option("-o,--out", out_path);

  auto* c_factorize = app.add_subcommand("factorize", "factorize the decision tree");
  c_factorize->add_option("kb", kb_path)->required();
  c_factorize->add_option("--tree", tree_path, "raw tree JSON (default: learn in-process)");
  c_factorize->add_option("-o,--out", out_path);

  auto* c_render = app.add_subcommand("render", "render a factored tree");
  c_render->add_option("kb", kb_path)->required();
  c_render->add_option("--format", format, "text|dot|json")
      ->check(CLI::IsMember({"text", "dot", "json"}));
  c_render->add_option("--tree", tree_path, "factored tree JSON (default: build in-process)");
  c_render->add_option("-o,--out", out_path);

  auto* c_verify = app.add_subcommand("verify", "oracle-equivalence sweep of a tree vs the DSS");
  c_verify->add_option("kb", kb_path)->required();
  c_verify->add_option("--tree", tree_path, "factored tree JSON (default: build in-process)");
  c_verify->add_option("--max-witnesses", max_witnesses);
  c_verify->add_option("--jobs", jobs);
  c_verify->add_option("-o,--out", out_path);

  auto* c_diff = app.add_subcommand("diff", "structural diff of two factored trees");
  c_diff->add_option("a", diff_a, "first tree JSON")->required();
  c_diff->add_option("b", diff_b, "second tree JSON")->required();
  c_diff->add_option("--kb", kb_path, "knowledge base both trees were built from")->required();
  c_diff->add_option("-o,--out", out_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_pipeline->parsed()) {
      PipelineOptions opts;
      opts.kb_path = kb_path;
      opts.out_dir = out_dir;
      opts.jobs = jobs;
      opts.max_witnesses = max_witnesses;
      return run_pipeline(opts, std::cerr);
    }

    if (c_validate->parsed()) {
      KnowledgeBase kb = load_kb_file(kb_path);
      auto findings = validate_kb(kb);
      for (const auto& f : findings)
        std::cout << f.code << ": " << f.message << '\n';
      if (findings.empty()) std::cout << "ok: " << kb_path << " is valid\n";
      return findings.empty() ? kExitOk : kExitInvalidKb;
    }

    if (c_generate->parsed()) {
      KnowledgeBase kb = load_valid_kb(kb_path);
      Roles roles = resolve_roles(kb);
      std::ostringstream os;
      export_vectors_csv(kb, roles, os);
      emit(out_path, os.str());
      return kExitOk;
    }

    if (c_label->parsed()) {
      KnowledgeBase kb = load_valid_kb(kb_path);
      Roles roles = resolve_roles(kb);
      std::ostringstream os;
      export_labeled_csv(kb, roles, os, jobs);
      emit(out_path, os.str());
      return kExitOk;
    }

    if (c_learn->parsed()) {
      KnowledgeBase kb = load_valid_kb(kb_path);
      Roles roles = resolve_roles(kb);
      Dataset ds = build_dataset(kb, roles);
      DecisionTree tree = build_tree(ds);
      emit(out_path, tree_to_json(tree).dump(2) + "\n");
      return kExitOk;
    }

    if (c_factorize->parsed()) {
      KnowledgeBase kb = load_valid_kb(kb_path);
      auto schema = std::make_shared<Schema>(schema_from_kb(kb));
      FactoredTree factored;
      if (!tree_path.empty()) {
        auto j = nlohmann::json::parse(read_file(tree_path));
        DecisionTree tree = tree_from_json(j, schema);
        factored = factorize(kb, tree);
      } else {
        Roles roles = resolve_roles(kb);
        Dataset ds = build_dataset(kb, roles);
        DecisionTree tree = build_tree(ds);
        factored = factorize(kb, tree);
      }
      emit(out_path, factored_to_json(kb, factored).dump(2) + "\n");
      return kExitOk;
    }

    if (c_render->parsed()) {
      KnowledgeBase kb = load_valid_kb(kb_path);
      FactoredTree tree = tree_for(kb, tree_path);
      if (format == "text")
        emit(out_path, render_text(kb, tree));
      else if (format == "dot")
        emit(out_path, render_dot(kb, tree));
      else
        emit(out_path, render_json(kb, tree).dump(2) + "\n");
      return kExitOk;
    }

    if (c_verify->parsed()) {
      KnowledgeBase kb = load_valid_kb(kb_path);
      Roles roles = resolve_roles(kb);
      FactoredTree tree = tree_for(kb, tree_path);
      DivergenceReport report = verify_tree(kb, roles, tree, max_witnesses, jobs);
      emit(out_path, report_to_json(kb, report).dump(2) + "\n");
      std::cerr << "[gverify] checked " << report.vectors_checked << " vectors, "
                << report.total_divergences << " divergence(s)\n";
      return report.pass() ? kExitOk : kExitDivergent;
    }

    if (c_diff->parsed()) {
      KnowledgeBase kb = load_valid_kb(kb_path);
      auto schema = std::make_shared<Schema>(schema_from_kb(kb));
      FactoredTree a = factored_from_json(kb, nlohmann::json::parse(read_file(diff_a)), schema);
      FactoredTree b = factored_from_json(kb, nlohmann::json::parse(read_file(diff_b)), schema);
      TreeDiff d = tree_diff(kb, a, b);
      emit(out_path, diff_to_json(d).dump(2) + "\n");
      return d.empty() ? kExitOk : kExitDivergent;
    }
  } catch (const Error& e) {
    std::cerr << "gverify: " << e.what() << '\n';
    switch (e.code()) {
      case Errc::io:
      case Errc::syntax:
      case Errc::reference:
      case Errc::duplicate:
        return kExitIoError;
      default:
        return kExitInvalidKb;
    }
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "gverify: " << e.what() << '\n';
    return kExitIoError;
  }
  return kExitOk;
}
