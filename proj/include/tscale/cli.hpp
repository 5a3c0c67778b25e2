#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tscale {

struct ExperimentConfig {
  std::string command;
  std::string timescale = "interval";
  double mesh = 1.0 / 64.0;
  std::string drift = "sin:0.5";
  std::size_t n_paths = 1000;
  std::uint64_t seed = 1;
  double tol = 1e-10;
  std::size_t max_iter = 200;
  std::string out = "out";
  unsigned workers = 0;
  std::size_t trials = 20;
  std::size_t probes = 200;
  std::optional<double> expect_k;
  bool self_test = false;
};

/// Throws on an invalid time scale or drift spec, N = 0, or tol <= 0.
void validate(const ExperimentConfig& config);

/// The reproducibility-relevant fields as key=value lines (no worker count).
std::string echo_config(const ExperimentConfig& config);

/// Entry point shared by the tscale binary and the tests. `args` excludes the
/// program name. Returns the process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tscale
