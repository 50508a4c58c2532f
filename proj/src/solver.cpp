#include "sopt/solver.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace sopt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string logic_msg(const char* what, int k) {
  std::ostringstream os;
  os << "solver state check failed at iteration " << k << ": " << what;
  return os.str();
}

// Slack for the debug checks: absolute + mild relative scaling, so fuzz
// corpora with large coordinates do not trip on accumulated rounding.
double slack(double a, double b) {
  return 1e-9 * (1.0 + std::max(std::abs(a), std::abs(b)));
}

/// Primal-dual engine for one solve. Owns all scratch state.
///
/// The main loop inserts source points left to right, keeping the prefix
/// problem optimal. A new point either stays unmatched (its potential hit
/// lambda), takes a free target, or competes for a taken one; competition
/// raises the potentials of a contiguous chain of matched pairs until
/// either some potential reaches lambda, the chain tips over to the target
/// above, or it tips to the target below. Dual updates inside a chain are
/// deferred: `v` accumulates the total raise and `joined_at_[i]` records
/// the value of `v` when x_i joined, so each member's pending increment is
/// v - joined_at_[i] and a chain resolution costs O(chain), not O(chain^2).
class Engine {
 public:
  Engine(const SortedSamples& x, const SortedSamples& y,
         const SolverConfig& config, bool pot_mode)
      : x_(x.values()),
        y_(y.values()),
        n_(static_cast<int>(x.size())),
        m_(static_cast<int>(y.size())),
        cost_(config.cost),
        eps_(config.tolerance),
        debug_(config.debug_invariants),
        pot_mode_(pot_mode),
        lambda_(pot_mode ? kInf : config.lambda),
        psi_init_(config.lambda) {}

  Solution run() {
    phi_.assign(static_cast<std::size_t>(n_), -kInf);
    psi_.assign(static_cast<std::size_t>(m_), psi_init_);
    plan_.assign(static_cast<std::size_t>(n_), kUnassigned);
    inverse_.assign(static_cast<std::size_t>(m_), kUnassigned);
    joined_at_.assign(static_cast<std::size_t>(n_), 0.0);
    j_last_ = 0;
    chain_steps_ = 0;

    if (m_ == 0) {
      std::fill(phi_.begin(), phi_.end(), lambda_);
    } else {
      for (int k = 0; k < n_; ++k) {
        step(k);
        if (debug_) check_boundary(k);
      }
    }
    return finish();
  }

 private:
  void step(int k) {
    const int js = find_target(k);
    const double phi_k = cost_(x_[k], y_[js]) - psi_[js];
    if (phi_k >= lambda_ - eps_) {
      // Case 1: destroying x_k is cheapest; leave it unmatched.
      phi_[k] = lambda_;
      return;
    }
    phi_[k] = phi_k;
    const int holder = inverse_[js];
    if (holder == kUnassigned) {
      // Case 2: free target.
      assign(k, js);
      j_last_ = js;
      return;
    }
    if (holder < k - 1) {
      // Duplicate coordinates: the holder sits below the chain position the
      // theory expects, which only happens when x_holder..x_{k-1} coincide
      // and phi_holder == lambda. Hand the target over directly.
      if (debug_ && std::abs(phi_[holder] - lambda_) > slack(phi_[holder], lambda_)) {
        throw std::logic_error(logic_msg("duplicate handover with phi below lambda", k));
      }
      plan_[holder] = kUnassigned;
      assign(k, js);
      return;
    }
    resolve_conflict(k, js);
  }

  // Smallest minimizer of cost(x_k, y_j) - psi_j over j in [j_last_, m).
  // Everything strictly above j_last_ is unmatched and still has its initial
  // potential, so on that stretch the objective is cost(x_k, y_j) - psi_init_,
  // a convex function of y_j: only j_last_ itself, the first index of the
  // duplicate run just below x_k, and the first index at-or-above x_k can
  // attain the minimum. That cuts the scan to O(log m).
  int find_target(int k) const {
    int best = j_last_;
    double best_val = cost_(x_[k], y_[best]) - psi_[best];
    const auto window_begin = y_.begin() + j_last_ + 1;
    if (window_begin < y_.end()) {
      const auto up = std::lower_bound(window_begin, y_.end(), x_[k]);
      if (up != window_begin) {
        const auto run = std::lower_bound(window_begin, up, *(up - 1));
        const int j = static_cast<int>(run - y_.begin());
        const double val = cost_(x_[k], y_[j]) - psi_[j];
        if (val < best_val) {
          best = j;
          best_val = val;
        }
      }
      if (up != y_.end()) {
        const int j = static_cast<int>(up - y_.begin());
        const double val = cost_(x_[k], y_[j]) - psi_[j];
        if (val < best_val) {
          best = j;
          best_val = val;
        }
      }
    }
    if (debug_) {
      int scan = j_last_;
      double scan_val = cost_(x_[k], y_[scan]) - psi_[scan];
      for (int j = j_last_ + 1; j < m_; ++j) {
        const double val = cost_(x_[k], y_[j]) - psi_[j];
        if (val < scan_val) {
          scan = j;
          scan_val = val;
        }
      }
      if (scan != best) {
        throw std::logic_error(logic_msg("incremental target search disagrees with linear scan", k));
      }
    }
    return best;
  }

  void assign(int i, int j) {
    plan_[i] = j;
    inverse_[j] = i;
  }

  // Case 3: x_k wants y_js but y_js is matched to x_{k-1}. Grow the conflict
  // chain downward until one of the three exits fires.
  void resolve_conflict(int k, const int js) {
    int i_min = k - 1;
    int j_min = js;
    double v = 0.0;
    joined_at_[k] = 0.0;
    joined_at_[k - 1] = 0.0;
    int i_delta = (phi_[k - 1] >= phi_[k]) ? k - 1 : k;
    double lambda_delta = lambda_ - phi_[i_delta];

    while (true) {
      ++chain_steps_;
      const double alpha =
          (js + 1 < m_)
              ? cost_(x_[k], y_[js + 1]) - (phi_[k] + v) - psi_[js + 1]
              : kInf;
      const double beta =
          (j_min > 0)
              ? cost_(x_[i_min], y_[j_min - 1]) - phi_[i_min] - psi_[j_min - 1]
              : kInf;
      if (lambda_delta == kInf && alpha == kInf && beta == kInf) {
        throw std::logic_error(logic_msg("conflict chain has no exit", k));
      }

      if (lambda_delta <= std::min(alpha, beta) + eps_) {
        // Case 3.1: phi_{i_delta} reaches lambda; that point drops out and
        // the part of the chain above it slides down one target.
        v += std::max(lambda_delta, 0.0);
        apply_duals(i_min, k, v);
        phi_[i_delta] = lambda_;
        if (i_delta < k) {
          plan_[i_delta] = kUnassigned;
          for (int i = i_delta + 1; i < k; ++i) {
            plan_[i] -= 1;
            inverse_[plan_[i]] = i;
          }
          assign(k, js);
        }
        return;
      }
      if (alpha <= std::min(lambda_delta, beta) + eps_) {
        // Case 3.2: the constraint against y_{js+1} became active; x_k moves
        // one target up and everyone else stays put.
        v += std::max(alpha, 0.0);
        apply_duals(i_min, k, v);
        assign(k, js + 1);
        j_last_ = js + 1;
        return;
      }
      // Case 3.3: the constraint against y_{j_min - 1} became active.
      v += std::max(beta, 0.0);
      const int below = j_min - 1;
      int holder = inverse_[below];
      if (holder != kUnassigned && holder < i_min - 1) {
        // Duplicate coordinates below the chain (phi_holder == lambda):
        // release y_below and resolve as if it were free.
        if (debug_ && std::abs(phi_[holder] - lambda_) > slack(phi_[holder], lambda_)) {
          throw std::logic_error(logic_msg("duplicate release with phi below lambda", k));
        }
        plan_[holder] = kUnassigned;
        inverse_[below] = kUnassigned;
        holder = kUnassigned;
      }
      if (holder == kUnassigned) {
        // Case 3.3a: whole chain slides down one target, x_k takes y_js.
        apply_duals(i_min, k, v);
        for (int i = i_min; i < k; ++i) {
          plan_[i] -= 1;
          inverse_[plan_[i]] = i;
        }
        assign(k, js);
        return;
      }
      // Case 3.3b: extend the chain with the pair (i_min - 1, j_min - 1).
      joined_at_[i_min - 1] = v;
      lambda_delta -= beta;
      --i_min;
      --j_min;
      if (lambda_ - phi_[i_min] < lambda_delta) {
        lambda_delta = lambda_ - phi_[i_min];
        i_delta = i_min;
      }
      if (debug_) check_chain(k, i_min, j_min, js, v, lambda_delta);
    }
  }

  void apply_duals(int i_min, int k, double v) {
    for (int i = i_min; i < k; ++i) {
      const double inc = v - joined_at_[i];
      phi_[i] += inc;
      psi_[plan_[i]] -= inc;
    }
    phi_[k] += v;
  }

  Solution finish() const {
    Solution out;
    out.plan.assignment = plan_;
    out.duals.phi = phi_;
    out.duals.psi = psi_;
    double transported = 0.0;
    int matched = 0;
    for (int i = 0; i < n_; ++i) {
      if (plan_[i] == kUnassigned) continue;
      transported += cost_(x_[i], y_[plan_[i]]);
      ++matched;
    }
    if (pot_mode_) {
      out.value = transported + psi_init_ * static_cast<double>(m_ - n_);
    } else {
      out.value =
          transported + psi_init_ * static_cast<double>(n_ + m_ - 2 * matched);
    }
    out.stats.main_iterations = n_;
    out.stats.chain_steps = static_cast<std::int64_t>(chain_steps_);
    return out;
  }

  // Invariants I-VII at a main-loop boundary: psi bounded by its initial
  // value and below it only on matched targets; phi bounded by lambda and
  // below it only on matched processed sources; all dual constraints hold,
  // matched ones with equality; the plan is strictly increasing and the
  // inverse map agrees; j_last_ is the largest matched target.
  void check_boundary(int k) const {
    for (int j = 0; j < m_; ++j) {
      if (psi_[j] > psi_init_ + slack(psi_[j], psi_init_)) {
        throw std::logic_error(logic_msg("psi above its bound", k));
      }
      if (psi_[j] < psi_init_ - slack(psi_[j], psi_init_) &&
          inverse_[j] == kUnassigned) {
        throw std::logic_error(logic_msg("lowered psi on an unmatched target", k));
      }
    }
    for (int i = 0; i <= k; ++i) {
      if (!pot_mode_) {
        if (phi_[i] > lambda_ + slack(phi_[i], lambda_)) {
          throw std::logic_error(logic_msg("phi above lambda", k));
        }
        if (phi_[i] < lambda_ - slack(phi_[i], lambda_) &&
            plan_[i] == kUnassigned) {
          throw std::logic_error(logic_msg("phi below lambda on an unmatched source", k));
        }
      } else if (plan_[i] == kUnassigned) {
        throw std::logic_error(logic_msg("unmatched source in no-destruction mode", k));
      }
      for (int j = 0; j < m_; ++j) {
        const double c = cost_(x_[i], y_[j]);
        if (phi_[i] + psi_[j] > c + slack(phi_[i] + psi_[j], c)) {
          throw std::logic_error(logic_msg("dual constraint violated", k));
        }
      }
      if (plan_[i] != kUnassigned) {
        const double c = cost_(x_[i], y_[plan_[i]]);
        if (std::abs(phi_[i] + psi_[plan_[i]] - c) > slack(phi_[i] + psi_[plan_[i]], c)) {
          throw std::logic_error(logic_msg("matched constraint not active", k));
        }
        if (inverse_[plan_[i]] != i) {
          throw std::logic_error(logic_msg("inverse map out of sync", k));
        }
      }
    }
    int last = kUnassigned;
    int max_assigned = kUnassigned;
    for (int i = 0; i <= k; ++i) {
      if (plan_[i] == kUnassigned) continue;
      if (last != kUnassigned && plan_[i] <= last) {
        throw std::logic_error(logic_msg("plan not strictly increasing", k));
      }
      last = plan_[i];
      max_assigned = plan_[i];
    }
    for (int j = 0; j < m_; ++j) {
      if (inverse_[j] != kUnassigned && plan_[inverse_[j]] != j) {
        throw std::logic_error(logic_msg("inverse map points at wrong source", k));
      }
    }
    if (max_assigned != kUnassigned && j_last_ != max_assigned) {
      throw std::logic_error(logic_msg("j_last out of date", k));
    }
  }

  // Invariant VIII at a chain step: the chain is a contiguous diagonal block
  // of matched pairs, its pairs are active and so are the "one target down"
  // constraints, all measured with pending increments applied; lambda_delta
  // matches a fresh minimum over the chain.
  void check_chain(int k, int i_min, int j_min, int js, double v,
                   double lambda_delta) const {
    const int len = (k - 1) - i_min;
    if (js - j_min != len) {
      throw std::logic_error(logic_msg("chain block is not diagonal", k));
    }
    auto eff_phi = [&](int i) { return phi_[i] + (v - joined_at_[i]); };
    auto eff_psi = [&](int j) {
      return psi_[j] - (v - joined_at_[inverse_[j]]);
    };
    for (int r = 0; r <= len; ++r) {
      const int i = i_min + r;
      const int j = j_min + r;
      if (plan_[i] != j || inverse_[j] != i) {
        throw std::logic_error(logic_msg("chain pair not matched", k));
      }
      const double c = cost_(x_[i], y_[j]);
      if (std::abs(eff_phi(i) + eff_psi(j) - c) > slack(eff_phi(i) + eff_psi(j), c)) {
        throw std::logic_error(logic_msg("chain pair not active", k));
      }
      if (r >= 1) {
        const double c_down = cost_(x_[i], y_[j - 1]);
        if (std::abs(eff_phi(i) + eff_psi(j - 1) - c_down) >
            slack(eff_phi(i) + eff_psi(j - 1), c_down)) {
          throw std::logic_error(logic_msg("chain down-shift constraint not active", k));
        }
      }
    }
    if (!pot_mode_) {
      double fresh = lambda_ - eff_phi(static_cast<int>(k));
      for (int i = i_min; i < k; ++i) {
        fresh = std::min(fresh, lambda_ - eff_phi(i));
      }
      if (std::abs(fresh - lambda_delta) > slack(fresh, lambda_delta)) {
        throw std::logic_error(logic_msg("lambda_delta out of date", k));
      }
    }
  }

  const std::vector<double>& x_;
  const std::vector<double>& y_;
  const int n_;
  const int m_;
  const CostSpec cost_;
  const double eps_;
  const bool debug_;
  const bool pot_mode_;
  const double lambda_;    // +inf in no-destruction mode
  const double psi_init_;  // the finite penalty; initial value of every psi

  std::vector<double> phi_;
  std::vector<double> psi_;
  std::vector<int> plan_;
  std::vector<int> inverse_;
  std::vector<double> joined_at_;  // d-array of the lazy dual updates
  int j_last_ = 0;                 // largest matched target index
  std::uint64_t chain_steps_ = 0;
};

void validate_common(const SolverConfig& config) {
  if (std::isnan(config.lambda) || config.lambda < 0.0) {
    throw ValidationError("lambda must be >= 0");
  }
  if (!std::isfinite(config.tolerance) || config.tolerance < 0.0) {
    throw ValidationError("tolerance must be finite and >= 0");
  }
}

Solution solve_pot_kernel(const SortedSamples& x, const SortedSamples& y,
                          const SolverConfig& config) {
  if (x.size() > y.size()) {
    throw ValidationError(
        "no-destruction mode needs n <= m; flip the marginals to cover the "
        "smaller side instead");
  }
  Engine engine(x, y, config, /*pot_mode=*/true);
  return engine.run();
}

}  // namespace

Solution solve(const SortedSamples& x, const SortedSamples& y,
               const SolverConfig& config) {
  validate_common(config);
  if (!std::isfinite(config.lambda)) {
    throw ValidationError("lambda must be finite here; use solve_pot for the "
                          "all-mass-transported mode");
  }
  Engine engine(x, y, config, /*pot_mode=*/false);
  return engine.run();
}

Solution solve_pot(const SortedSamples& x, const SortedSamples& y,
                   const SolverConfig& config) {
  validate_common(config);
  if (!std::isfinite(config.lambda)) {
    throw ValidationError("config.lambda is the finite creation penalty and "
                          "must not be infinite");
  }
  if (x.size() <= y.size()) {
    return solve_pot_kernel(x, y, config);
  }
  // n > m: cover every target instead, then invert the plan.
  Solution flipped = solve_pot_kernel(y, x, config);
  Solution out;
  out.plan.assignment.assign(x.size(), kUnassigned);
  for (std::size_t i = 0; i < flipped.plan.assignment.size(); ++i) {
    const int j = flipped.plan.assignment[i];
    if (j != kUnassigned) out.plan.assignment[j] = static_cast<int>(i);
  }
  out.duals.phi = std::move(flipped.duals.psi);
  out.duals.psi = std::move(flipped.duals.phi);
  out.value = flipped.value;
  out.stats = flipped.stats;
  return out;
}

bool OptimalityReport::all_pass() const {
  for (const auto& check : checks) {
    if (!check.pass) return false;
  }
  return true;
}

std::string OptimalityReport::summary() const {
  std::ostringstream os;
  for (const auto& check : checks) {
    os << (check.pass ? "pass " : "FAIL ") << check.name;
    if (!check.detail.empty()) os << " (" << check.detail << ")";
    os << '\n';
  }
  return os.str();
}

OptimalityReport verify_optimality(const SortedSamples& x,
                                   const SortedSamples& y,
                                   const Solution& solution, double lambda,
                                   const CostSpec& cost, double tolerance) {
  OptimalityReport report;
  auto add = [&](const std::string& name, bool pass,
                 const std::string& detail = "") {
    report.checks.push_back({name, pass, pass ? "" : detail});
  };
  auto tol = [&](double a, double b) {
    return tolerance * (1.0 + std::max(std::abs(a), std::abs(b)));
  };

  const std::size_t n = x.size();
  const std::size_t m = y.size();
  const auto& plan = solution.plan.assignment;
  const auto& phi = solution.duals.phi;
  const auto& psi = solution.duals.psi;

  if (!std::isfinite(lambda) || lambda < 0.0) {
    add("lambda-finite", false, "audit needs a finite non-negative lambda");
    return report;
  }
  if (plan.size() != n || phi.size() != n || psi.size() != m) {
    add("shape", false, "plan or dual sizes disagree with the sample lists");
    return report;
  }
  add("shape", true);

  bool plan_ok = true;
  std::string plan_detail;
  try {
    solution.plan.validate(n, m);
  } catch (const ValidationError& e) {
    plan_ok = false;
    plan_detail = e.what();
  }
  add("plan-monotone-injective", plan_ok, plan_detail);

  bool feasible = true;
  std::string feas_detail;
  for (std::size_t i = 0; i < n && feasible; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double c = cost(x[i], y[j]);
      if (phi[i] + psi[j] > c + tol(phi[i] + psi[j], c)) {
        feasible = false;
        feas_detail = "constraint (" + std::to_string(i) + "," +
                      std::to_string(j) + ") violated";
        break;
      }
    }
  }
  add("dual-feasible", feasible, feas_detail);

  bool active = true;
  bool truncated = true;
  bool co_monotone = plan_ok;
  std::string active_detail, trunc_detail;
  int prev = kUnassigned;
  for (std::size_t i = 0; i < n; ++i) {
    const int j = plan[i];
    if (j == kUnassigned) continue;
    if (j < 0 || static_cast<std::size_t>(j) >= m) continue;
    const double c = cost(x[i], y[j]);
    if (std::abs(phi[i] + psi[j] - c) > tol(phi[i] + psi[j], c)) {
      active = false;
      active_detail = "pair (" + std::to_string(i) + "," + std::to_string(j) +
                      ") not active";
    }
    if (c > 2.0 * lambda + tol(c, 2.0 * lambda)) {
      truncated = false;
      trunc_detail = "pair (" + std::to_string(i) + "," + std::to_string(j) +
                     ") costs more than 2*lambda";
    }
    if (prev != kUnassigned && j <= prev) co_monotone = false;
    prev = j;
  }
  add("support-active", active, active_detail);
  add("truncation-2lambda", truncated, trunc_detail);
  add("co-monotone", co_monotone, "matched pairs are not co-monotone");

  std::vector<bool> target_matched(m, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (plan[i] != kUnassigned && plan[i] >= 0 &&
        static_cast<std::size_t>(plan[i]) < m) {
      target_matched[static_cast<std::size_t>(plan[i])] = true;
    }
  }
  bool bounds = true;
  bool thresholds = true;
  std::string bound_detail, thresh_detail;
  for (std::size_t i = 0; i < n; ++i) {
    if (phi[i] > lambda + tol(phi[i], lambda)) {
      bounds = false;
      bound_detail = "phi[" + std::to_string(i) + "] above lambda";
    }
    if (phi[i] < lambda - tol(phi[i], lambda) && plan[i] == kUnassigned) {
      thresholds = false;
      thresh_detail = "phi[" + std::to_string(i) + "] below lambda but unmatched";
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (psi[j] > lambda + tol(psi[j], lambda)) {
      bounds = false;
      bound_detail = "psi[" + std::to_string(j) + "] above lambda";
    }
    if (psi[j] < lambda - tol(psi[j], lambda) && !target_matched[j]) {
      thresholds = false;
      thresh_detail = "psi[" + std::to_string(j) + "] below lambda but unmatched";
    }
  }
  add("potential-bounds", bounds, bound_detail);
  add("potential-thresholds", thresholds, thresh_detail);

  double primal = 0.0;
  bool primal_ok = plan_ok;
  if (plan_ok) {
    primal = eval_plan_cost(x, y, solution.plan, lambda, cost);
  }
  double dual = 0.0;
  for (std::size_t i = 0; i < n; ++i) dual += std::min(phi[i], lambda);
  for (std::size_t j = 0; j < m; ++j) dual += std::min(psi[j], lambda);
  const bool duality =
      primal_ok && std::abs(primal - dual) <= tol(primal, dual);
  add("strong-duality", duality,
      "primal " + std::to_string(primal) + " vs dual " + std::to_string(dual));
  const bool value_ok =
      primal_ok && std::abs(primal - solution.value) <= tol(primal, solution.value);
  add("reported-value", value_ok,
      "stored value " + std::to_string(solution.value) +
          " differs from the plan's cost " + std::to_string(primal));
  return report;
}

}  // namespace sopt
