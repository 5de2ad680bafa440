#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "qce/model.hpp"

namespace qce {

// Exit codes: 0 success, 1 validation error, 2 resource/numeric error,
// 3 comparison failed its tolerance.
struct RunConfig {
  std::string command;  // estimate | exact | compare | sweep | presets
  std::optional<std::string> model_path;
  std::optional<std::string> preset_name;
  std::string graph_spec;  // "path:8", "cycle:6", "grid:3x4", "random_regular:8,3"
  std::map<std::string, double> params;
  std::uint64_t seed = 0;
  Complex beta{0.0, 0.0};
  double epsilon = 1e-3;
  std::optional<int> order;
  bool force_region = false;
  int threads = 1;
  int steps = 10;  // sweep grid points
  std::string format = "json";
  std::optional<std::string> output;
  bool timings = false;  // wall-clock diagnostics make output non-reproducible
};

int run(const RunConfig& config, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// "re" or "re,im" to a complex value.
Complex parse_beta(const std::string& text);

}  // namespace qce
