#pragma once

#include <cstdint>
#include <string>

namespace hardygeo {

struct RunConfig {
  std::string command = "hardy";
  std::string scenario = "interval";  // built-in name or a JSON file path
  double p = 2.0;
  double n = 0.0;  // resolution override (cells per unit length); 0 = default
  int levels = 3;
  double l = 1.0;      // content dimension parameter
  double R = 0.5;      // thickness scale cap
  double gamma = 0.5;  // required thickness ratio
  double kappa = 0.1;  // required porosity
  uint64_t seed = 0;
  int threads = 0;  // 0 = library default
  std::string out;  // output directory; empty writes no files
  bool quiet = false;
};

// Executes one command and returns the process exit code:
// 0 ok, 1 hypothesis failed, 2 solver failed, 3 bad config.
int run(const RunConfig& cfg);

}  // namespace hardygeo
