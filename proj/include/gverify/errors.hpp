#ifndef GVERIFY_ERRORS_HPP
#define GVERIFY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gverify {

enum class Errc {
  syntax,
  reference,
  duplicate,
  bad_argument,
  no_match,
  multi_match,
  unseen_value,
  non_functional,
  label_decode,
  schema_mismatch,
  empty_distribution,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace gverify

#endif
