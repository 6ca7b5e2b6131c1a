#include "uwbfuse/solver.hpp"

namespace uwbfuse {

std::string_view to_string(SolveMode mode) {
  return mode == SolveMode::ToaOnly ? "toa" : "fused";
}

SolveMode solve_mode_from_string(std::string_view name) {
  if (name == "toa") return SolveMode::ToaOnly;
  if (name == "fused") return SolveMode::Fused;
  throw ConfigError("unknown solve mode '" + std::string(name) + "'");
}

}  // namespace uwbfuse
