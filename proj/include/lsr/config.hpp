#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lsr/metrics.hpp"

namespace lsr {

// Resolved run parameters shared by every subcommand.
struct RunConfig {
  std::string subcommand;
  std::string metric = "schwarzschild";  // builtin name or config file path

  int L = 24;
  int degree = 48;
  double tol_H_factor = 1e-10;
  double tol_V = 1e-10;
  int max_iter = 60;
  int n_radial = 48;
  double fd_step = 1e-3;

  std::string format = "json";  // json | csv
  std::string out_path;         // empty: stdout
  std::uint64_t seed = 12345;
  int threads = 0;  // 0: hardware default
  bool dry_run = false;
  bool plot = false;

  double xi_x = 3, xi_y = 0, xi_z = 0;
  double lambda = 10;
  int j = 1, k = 1;
  double A = -1;  // <= 0: doubling search
  double t_min = 2, t_max = 9;
  double points_per_unit = 25;
  std::vector<double> xis = {2, 3, 5};
  std::vector<double> lambdas = {20, 40, 80, 160};
};

// Sorted flat key-value rendering; parsing it back yields the same text.
std::string canonical_serialize(const RunConfig& cfg);
RunConfig parse_run_config(const std::string& text);

// Flat key-value metric description with a [metric] section.
MetricSpec metric_from_file(const std::string& path);
// Builtin name or (when the argument names an existing file) a config file.
MetricSpec resolve_metric(const std::string& arg);
std::string metric_to_config(const MetricSpec& spec);

// shared key-value section parser
std::map<std::string, std::string> parse_key_values(const std::string& text,
                                                    const std::string& section);

}  // namespace lsr
