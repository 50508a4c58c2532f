#pragma once

#include <string>
#include <vector>

#include "sopt/core.hpp"

namespace sopt {

struct SolverConfig {
  /// Destruction/creation penalty per unit of unmatched mass. Must be
  /// finite and >= 0 for solve(); solve_pot() treats it as the finite
  /// creation penalty of the no-destruction mode.
  double lambda = 1.0;
  CostSpec cost{};
  /// Absolute tolerance for the solver's equality tests (phi hitting
  /// lambda, tie-breaking between chain bounds, equal coordinates).
  double tolerance = 1e-12;
  /// When set, structural invariants of the primal-dual state are checked
  /// after every main-loop iteration and every conflict-chain step, and the
  /// incremental target search is cross-checked against a linear scan.
  /// Violations throw std::logic_error. Expensive: O(n*m) per iteration.
  bool debug_invariants = false;
};

/// Solves the 1-D partial transport problem between two sorted sample lists
/// with symmetric penalty config.lambda. Returns an optimal plan, optimal
/// dual potentials, the objective value, and instrumentation counters.
Solution solve(const SortedSamples& x, const SortedSamples& y,
               const SolverConfig& config);

/// No-destruction mode: every source point must be transported, target
/// points may be created at config.lambda each. Requires n <= m; when
/// n > m the flipped problem (every target covered) is solved and the plan
/// inverted. Reported value is the matched cost plus config.lambda * |m - n|.
Solution solve_pot(const SortedSamples& x, const SortedSamples& y,
                   const SolverConfig& config);

struct OptimalityCheck {
  std::string name;
  bool pass = false;
  std::string detail;  // empty when the check passes
};

struct OptimalityReport {
  std::vector<OptimalityCheck> checks;
  bool all_pass() const;
  std::string summary() const;
};

/// Report-only audit of a solution against the primal-dual optimality
/// conditions: plan shape, dual feasibility, active constraints on the
/// support, potential thresholds (phi_i < lambda implies i matched, same
/// for psi), potential bounds, strong duality, the 2*lambda truncation
/// bound on matched costs, and co-monotonicity. Never throws on failure.
OptimalityReport verify_optimality(const SortedSamples& x,
                                   const SortedSamples& y,
                                   const Solution& solution, double lambda,
                                   const CostSpec& cost = CostSpec(),
                                   double tolerance = 1e-9);

}  // namespace sopt
