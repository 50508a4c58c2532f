#include "sopt/core.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>

namespace sopt {

CostSpec::CostSpec(double exponent) : exponent_(exponent) {
  if (!std::isfinite(exponent) || exponent <= 1.0) {
    throw ValidationError(
        "cost exponent must be a finite value > 1 (got " +
        std::to_string(exponent) +
        "); the monotone matching structure requires a strictly convex cost");
  }
}

SortedSamples::SortedSamples(std::vector<double> values)
    : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw ValidationError("sample " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && values_[i] < values_[i - 1]) {
      throw ValidationError("samples are not sorted at index " +
                            std::to_string(i));
    }
  }
}

SortedSamples SortedSamples::from_unsorted(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return SortedSamples(std::move(values));
}

SortPermutation sort_with_permutation(std::span<const double> raw) {
  std::vector<int> order(raw.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return raw[a] < raw[b]; });
  std::vector<double> sorted(raw.size());
  for (std::size_t r = 0; r < raw.size(); ++r) sorted[r] = raw[order[r]];
  return {SortedSamples(std::move(sorted)), std::move(order)};
}

int PartialPlan::domain_size() const {
  int count = 0;
  for (int j : assignment) {
    if (j != kUnassigned) ++count;
  }
  return count;
}

void PartialPlan::validate(std::size_t n, std::size_t m) const {
  if (assignment.size() != n) {
    throw ValidationError("plan has " + std::to_string(assignment.size()) +
                          " entries, expected " + std::to_string(n));
  }
  int last = kUnassigned;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const int j = assignment[i];
    if (j == kUnassigned) continue;
    if (j < 0 || static_cast<std::size_t>(j) >= m) {
      throw ValidationError("plan entry " + std::to_string(i) +
                            " is out of range: " + std::to_string(j));
    }
    if (last != kUnassigned && j <= last) {
      throw ValidationError("plan is not strictly increasing at entry " +
                            std::to_string(i));
    }
    last = j;
  }
}

double eval_plan_cost(const SortedSamples& x, const SortedSamples& y,
                      const PartialPlan& plan, double lambda,
                      const CostSpec& cost) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw ValidationError("lambda must be finite and non-negative");
  }
  plan.validate(x.size(), y.size());
  double transported = 0.0;
  int matched = 0;
  for (std::size_t i = 0; i < plan.assignment.size(); ++i) {
    const int j = plan.assignment[i];
    if (j == kUnassigned) continue;
    transported += cost(x[i], y[static_cast<std::size_t>(j)]);
    ++matched;
  }
  const double unmatched =
      static_cast<double>(x.size()) + static_cast<double>(y.size()) -
      2.0 * static_cast<double>(matched);
  return transported + lambda * unmatched;
}

double symmetric_shift(double value_sym, double lambda1, double lambda2,
                       std::size_t n, std::size_t m) {
  if (!std::isfinite(lambda1) || !std::isfinite(lambda2) || lambda1 < 0.0 ||
      lambda2 < 0.0) {
    throw ValidationError("penalties must be finite and non-negative");
  }
  return value_sym + 0.5 * (lambda1 - lambda2) * static_cast<double>(n) +
         0.5 * (lambda2 - lambda1) * static_cast<double>(m);
}

int Rng::uniform_int(int bound) {
  if (bound <= 0) throw ValidationError("uniform_int bound must be positive");
  return static_cast<int>(next_u64() % static_cast<std::uint64_t>(bound));
}

double Rng::normal(double mean, double stddev) {
  if (has_spare_) {
    has_spare_ = false;
    return mean + stddev * spare_;
  }
  const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return mean + stddev * r * std::cos(a);
}

std::vector<double> gen_uniform_raw(int n, double lo, double hi, Rng& rng) {
  if (n < 0) throw ValidationError("sample count must be non-negative");
  if (!(lo < hi)) throw ValidationError("empty range: lo must be < hi");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (double& v : out) v = rng.uniform(lo, hi);
  return out;
}

std::vector<double> gen_mixture_raw(int n, std::span<const double> means,
                                    Rng& rng,
                                    std::vector<int>* component_counts) {
  if (n < 0) throw ValidationError("sample count must be non-negative");
  if (means.empty()) throw ValidationError("mixture needs at least one mean");
  if (component_counts != nullptr) {
    component_counts->assign(means.size(), 0);
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  for (double& v : out) {
    const int k = rng.uniform_int(static_cast<int>(means.size()));
    if (component_counts != nullptr) ++(*component_counts)[k];
    v = rng.normal(means[static_cast<std::size_t>(k)], 1.0);
  }
  return out;
}

SamplePair gen_uniform(int n, int m, double x_lo, double x_hi, double y_lo,
                       double y_hi, std::uint64_t seed) {
  Rng rng(seed);
  auto xs = gen_uniform_raw(n, x_lo, x_hi, rng);
  auto ys = gen_uniform_raw(m, y_lo, y_hi, rng);
  return {SortedSamples::from_unsorted(std::move(xs)),
          SortedSamples::from_unsorted(std::move(ys))};
}

MixtureSamplePair gen_gaussian_mixture(int n, int m, std::uint64_t seed) {
  // x components N(-4+2k, 1), k = 1..5; y components N(-5+2k, 1), k = 1..6.
  static constexpr double x_means[] = {-2.0, 0.0, 2.0, 4.0, 6.0};
  static constexpr double y_means[] = {-3.0, -1.0, 1.0, 3.0, 5.0, 7.0};
  Rng rng(seed);
  MixtureSamplePair out;
  auto xs = gen_mixture_raw(n, x_means, rng, &out.x_component_counts);
  auto ys = gen_mixture_raw(m, y_means, rng, &out.y_component_counts);
  out.x = SortedSamples::from_unsorted(std::move(xs));
  out.y = SortedSamples::from_unsorted(std::move(ys));
  return out;
}

}  // namespace sopt
