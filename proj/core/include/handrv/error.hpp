#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace handrv {

enum class Errc {
  parse,
  validation,
  size_mismatch,
  schema,
  io,
  degenerate_path,
  missing_kinematics,
  missing_embeddings,
  incompatible_embeddings,
  infeasible_split,
  invalid_cost,
  invalid_argument,
  unknown_motif,
};

std::string_view to_string(Errc code);

/// Every failure raised by the engine. The code identifies the failure class
/// so callers (and the CLI's exit-code mapping) never parse messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Parse failure on a line-oriented input; line numbers are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace handrv
