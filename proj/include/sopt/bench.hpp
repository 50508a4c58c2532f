#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sopt/core.hpp"

namespace sopt {

enum class BenchGenerator { kUniform, kGaussianMixture };

BenchGenerator parse_bench_generator(const std::string& name);
std::string bench_generator_name(BenchGenerator generator);

struct BenchConfig {
  BenchGenerator generator = BenchGenerator::kUniform;
  std::vector<int> sizes;        // source sizes n
  int m_offset = 1000;           // m = n + m_offset
  std::vector<double> lambdas;
  int repeats = 10;
  std::uint64_t seed = 0;
  CostSpec cost{};
};

struct BenchRecord {
  std::string generator;
  int n = 0;
  int m = 0;
  double lambda = 0.0;
  int repeat = 0;
  double seconds = 0.0;  // monotonic wall clock over sort + solve
  double value = 0.0;
  std::string status = "ok";
};

/// Runs the sweep: per (n, lambda, repeat) draw a fresh instance from a
/// sub-seed, then time sorting plus solving together. Failures are recorded
/// in the status column rather than aborting the sweep.
std::vector<BenchRecord> run_bench(const BenchConfig& config);

void write_bench_csv(std::ostream& out,
                     const std::vector<BenchRecord>& records);

/// Median of the "ok" records' times for each (n, lambda) cell.
struct BenchCell {
  int n = 0;
  double lambda = 0.0;
  double median_seconds = 0.0;
};
std::vector<BenchCell> median_times(const std::vector<BenchRecord>& records);

double median(std::vector<double> values);

/// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& xs,
                     const std::vector<double>& ys);

/// Deterministic sub-seed derivation for sweep cells.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace sopt
