#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "erw/cut_times.hpp"
#include "erw/environment.hpp"

namespace erw {

/// Flat key=value experiment configuration. The canonical emitted text is the
/// identity under parse (parse(emit(c)).emit() == emit(c)) and feeds the
/// config hash embedded in every result record.
struct ExperimentConfig {
  std::string experiment = "speed";
  int d = 6;
  int m = 1;
  std::string env = "det(beta=0.5,m=1)";
  std::int64_t horizon = 100000;
  Window window{10000, 10000};
  std::int64_t replicates = 10000;
  std::int64_t env_draws = 32;
  std::int64_t replicates_per_env = 512;
  std::vector<double> beta_grid = {0.0, 0.2, 0.4, 0.6, 0.8};
  double beta = 0.5;
  double t = 0.5;
  double eps = 0.9;
  int dim = 3;
  int n = 10;
  std::uint64_t seed = 1;
  std::uint64_t stream0 = 0;
  int threads = 1;
  std::string out_dir = "out";
  std::int64_t max_rejection_attempts = 200000;
  double ess_warn_fraction = 0.1;
  std::string mechanism = "direct";
  std::string mode = "zero";

  std::map<std::string, std::string> to_map() const;
  static ExperimentConfig from_map(const std::map<std::string, std::string>& kv);

  std::string emit() const;
  static ExperimentConfig parse_text(const std::string& text);
  /// Reads a config file (may be empty path), then applies key=value overrides.
  static ExperimentConfig load(const std::string& path,
                               const std::vector<std::pair<std::string, std::string>>& overrides);

  /// FNV-1a hash of the canonical text, as 16 hex digits.
  std::string hash() const;

  CookieEnvironment environment() const { return CookieEnvironment::parse(env); }
};

std::string fmt_g17(double v);
std::string format_beta_grid(const std::vector<double>& grid);
std::vector<double> parse_beta_grid(const std::string& text);

}  // namespace erw
