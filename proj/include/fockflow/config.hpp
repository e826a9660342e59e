#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fockflow/decision.hpp"
#include "fockflow/fock.hpp"

namespace fockflow {

/// Everything a CLI run depends on. Serialized as sectioned `key = value`
/// text; to_text and parse_config round-trip exactly.
struct RunConfig {
  // [problem]
  std::string polynomial;
  unsigned cutoff = 8;
  std::vector<Complex> alphas;  // empty: per-mode defaults; one value: spread over modes
  unsigned bound = 0;           // oracle bound; 0 means the cutoff
  // [schedule]
  std::string schedule = "smoothstep";
  // [flow]
  std::size_t levels = 8;
  double epsilon_start = 1e-3;
  double end_s = 1.0 - 1e-3;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  std::string closure = "resolvent";
  // [scan]
  std::vector<double> grid;  // explicit s values; empty means `points` interior points
  std::size_t points = 101;
  std::size_t pair = 0;
  // [dynamics]
  std::vector<double> times{10.0, 50.0, 200.0};
  std::size_t num_slices = 0;
  // [decide]
  std::size_t decide_levels = 4;
  double decide_time = 20.0;
  // [output]
  std::string directory = ".";
  std::uint64_t seed = 0;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses a config document; unknown sections or keys are InputErrors.
RunConfig parse_config(std::string_view text);
/// Applies one key from `section` onto `config`.
void apply_setting(RunConfig& config, std::string_view section, std::string_view key, std::string_view value);
std::string to_text(const RunConfig& config);

/// Accepts `1.5`, `-0.3i`, `0.9+0.1i`, `1e-2-2e-3i`.
Complex parse_complex(std::string_view text);
std::vector<Complex> parse_complex_list(std::string_view text);
std::vector<double> parse_double_list(std::string_view text);

/// Per-mode displacements for a K-mode problem under `config`.
std::vector<Complex> resolve_alphas(const RunConfig& config, std::size_t modes);
std::vector<double> resolve_grid(const RunConfig& config);
FlowConfig make_flow_config(const RunConfig& config);
DecisionConfig make_decision_config(const RunConfig& config);

}  // namespace fockflow
