#include "handrv/error.hpp"

namespace handrv {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::parse: return "parse error";
    case Errc::validation: return "validation error";
    case Errc::size_mismatch: return "size mismatch";
    case Errc::schema: return "schema mismatch";
    case Errc::io: return "i/o error";
    case Errc::degenerate_path: return "degenerate path";
    case Errc::missing_kinematics: return "missing kinematics";
    case Errc::missing_embeddings: return "missing embeddings";
    case Errc::incompatible_embeddings: return "incompatible embeddings";
    case Errc::infeasible_split: return "infeasible split";
    case Errc::invalid_cost: return "invalid cost";
    case Errc::invalid_argument: return "invalid argument";
    case Errc::unknown_motif: return "unknown motif";
  }
  return "error";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

ParseError::ParseError(std::size_t line, const std::string& what)
    : Error(Errc::parse, "line " + std::to_string(line) + ": " + what), line_(line) {}

}  // namespace handrv
