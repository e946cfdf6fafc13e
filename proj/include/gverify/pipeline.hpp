#ifndef GVERIFY_PIPELINE_HPP
#define GVERIFY_PIPELINE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>

namespace gverify {

// Exit-code discipline shared by the pipeline and the CLI.
inline constexpr int kExitOk = 0;          // verified, zero divergences
inline constexpr int kExitDivergent = 1;   // divergences found
inline constexpr int kExitInvalidKb = 2;   // validation findings
inline constexpr int kExitIoError = 3;     // I/O or parse failure

struct PipelineOptions {
  std::string kb_path;
  std::string out_dir;
  int jobs = 1;
  uint64_t max_witnesses = 100;
};

// parse -> validate -> enumerate -> label -> learn -> factorize -> verify
// -> render. Writes vectors.csv, tree.json, tree.dot, tree.txt and
// report.json (divergences + manifest) into out_dir; all five files are
// byte-deterministic. Stage progress and timings go to diag only.
int run_pipeline(const PipelineOptions& opts, std::ostream& diag);

}  // namespace gverify

#endif
