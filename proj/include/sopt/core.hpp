#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sopt {

/// Sentinel for "this source point is not transported".
inline constexpr int kUnassigned = -1;

/// Thrown on malformed inputs (unsorted samples, bad plans, bad config).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ground cost |a - b|^p with p > 1. p = 1 is rejected: the monotone
/// matching structure the solver exploits requires a strictly convex cost.
class CostSpec {
 public:
  CostSpec() = default;
  explicit CostSpec(double exponent);

  double exponent() const { return exponent_; }

  double operator()(double a, double b) const {
    const double d = std::abs(a - b);
    return exponent_ == 2.0 ? d * d : std::pow(d, exponent_);
  }

 private:
  double exponent_ = 2.0;
};

/// A non-decreasing list of 1-D coordinates (duplicates permitted).
/// The constructor validates; use from_unsorted() to sort arbitrary input.
class SortedSamples {
 public:
  SortedSamples() = default;
  explicit SortedSamples(std::vector<double> values);

  static SortedSamples from_unsorted(std::vector<double> values);

  const std::vector<double>& values() const { return values_; }
  std::span<const double> span() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  std::vector<double> values_;
};

/// Result of sorting raw coordinates while remembering where they came from:
/// sorted[r] == raw[order[r]]. Stable, so ties keep their input order.
struct SortPermutation {
  SortedSamples sorted;
  std::vector<int> order;
};

SortPermutation sort_with_permutation(std::span<const double> raw);

/// Partial transport plan: assignment[i] is the target index matched to
/// source i, or kUnassigned. Valid plans are injective and strictly
/// increasing on their domain.
struct PartialPlan {
  std::vector<int> assignment;

  int domain_size() const;
  /// Throws ValidationError if the plan is out of range for (n, m),
  /// non-injective, or not strictly increasing on its domain.
  void validate(std::size_t n, std::size_t m) const;
};

/// Dual potentials: phi over source points, psi over target points.
struct DualPair {
  std::vector<double> phi;
  std::vector<double> psi;
};

struct SolverStats {
  std::int64_t main_iterations = 0;
  std::int64_t chain_steps = 0;
};

struct Solution {
  PartialPlan plan;
  DualPair duals;
  double value = 0.0;
  SolverStats stats;
};

/// Objective value of a plan: sum of matched costs plus
/// lambda * (n + m - 2 |dom(L)|). Validates the plan first.
double eval_plan_cost(const SortedSamples& x, const SortedSamples& y,
                      const PartialPlan& plan, double lambda,
                      const CostSpec& cost = CostSpec());

/// Converts a symmetric-penalty optimum (at lambda = (lambda1 + lambda2)/2)
/// into the asymmetric one: adds (lambda1-lambda2)/2 * n + (lambda2-lambda1)/2 * m.
double symmetric_shift(double value_sym, double lambda1, double lambda2,
                       std::size_t n, std::size_t m);

/// Seedable deterministic generator. Wraps mt19937_64 and derives uniform /
/// normal variates itself so streams are reproducible bit-for-bit for a
/// given seed on one platform, independent of the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  /// Uniform integer in [0, bound). bound must be positive.
  int uniform_int(int bound);

  /// Standard normal via Box-Muller (no rejection, fixed draw count).
  double normal(double mean = 0.0, double stddev = 1.0);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct SamplePair {
  SortedSamples x;
  SortedSamples y;
};

/// i.i.d. uniform draws on the given ranges, returned sorted.
/// Deterministic per seed. Ranges must satisfy lo < hi.
SamplePair gen_uniform(int n, int m, double x_lo, double x_hi, double y_lo,
                       double y_hi, std::uint64_t seed);

struct MixtureSamplePair {
  SortedSamples x;
  SortedSamples y;
  /// How many draws came from each mixture component (x: 5, y: 6).
  std::vector<int> x_component_counts;
  std::vector<int> y_component_counts;
};

/// x from the 5-component mixture of N(-4+2k, 1), k = 1..5; y from the
/// 6-component mixture of N(-5+2k, 1), k = 1..6. Returned sorted.
MixtureSamplePair gen_gaussian_mixture(int n, int m, std::uint64_t seed);

/// Unsorted variants used where sorting must be timed by the caller.
std::vector<double> gen_uniform_raw(int n, double lo, double hi, Rng& rng);
std::vector<double> gen_mixture_raw(int n, std::span<const double> means,
                                    Rng& rng,
                                    std::vector<int>* component_counts);

}  // namespace sopt
