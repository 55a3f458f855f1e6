#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "tat/geometry.hpp"

namespace tat {

/// Geometry scaled with the image size: n_theta = 360·(n-1)/256 (rounded to
/// even), n_time = 2(n-1) + 1.
GeometryConfig bench_config(int n_image);

struct BenchRow {
  int size = 0;
  std::string op;  // forward, adjoint, inverse, slow_forward
  double seconds = 0.0;  // best of the repetitions, plan construction excluded
};

/// Times the fast operators at each size; slow_forward too for sizes <= slow_max.
std::vector<BenchRow> run_bench(const std::vector<int>& sizes, int reps, int slow_max = 0);
std::string bench_csv(const std::vector<BenchRow>& rows);

/// Quick numerical checks of every module; report["pass"] is the verdict.
nlohmann::json run_selftest(bool small);

}  // namespace tat
