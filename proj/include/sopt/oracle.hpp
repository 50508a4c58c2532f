#pragma once

#include "sopt/core.hpp"

namespace sopt {

struct EnumerationResult {
  double value = 0.0;
  PartialPlan plan;
};

/// Exhaustive search over every strictly increasing partial map, with
/// separate penalties for unmatched source (lambda1) and target (lambda2)
/// points. Exponential; refuses n or m above 14.
EnumerationResult oracle_enumerate(const SortedSamples& x,
                                   const SortedSamples& y, double lambda1,
                                   double lambda2,
                                   const CostSpec& cost = CostSpec());

/// Monotone-matching dynamic program on the shifted costs c - 2*lambda;
/// returns the optimum of the symmetric problem. Refuses n*m above ~1e7.
double oracle_dp(const SortedSamples& x, const SortedSamples& y, double lambda,
                 const CostSpec& cost = CostSpec());

struct DpPlanResult {
  double value = 0.0;
  PartialPlan plan;
};

/// Same dynamic program with the plan recovered by backtracking.
DpPlanResult oracle_dp_plan(const SortedSamples& x, const SortedSamples& y,
                            double lambda, const CostSpec& cost = CostSpec());

/// Full-assignment dynamic program: every source point must be matched
/// (n <= m required); unmatched targets cost lambda_report each, which only
/// shifts the reported value.
double oracle_dp_full(const SortedSamples& x, const SortedSamples& y,
                      const CostSpec& cost = CostSpec(),
                      double lambda_report = 0.0);

/// Reduction to a balanced (n+m) x (n+m) assignment problem with shifted
/// cost c - 2*lambda on the real block and zeros elsewhere, solved exactly
/// by a Hungarian method. Refuses n+m above 200.
double oracle_extended_balanced(const SortedSamples& x, const SortedSamples& y,
                                double lambda,
                                const CostSpec& cost = CostSpec());

}  // namespace sopt
