#include "sopt/oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

namespace sopt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Enumerator {
  const std::vector<double>& x;
  const std::vector<double>& y;
  const CostSpec& cost;
  double lambda1;
  double lambda2;
  int n;
  int m;
  std::vector<int> current;
  std::vector<int> best;
  double best_value = kInf;

  void dfs(int i, int next_j, double acc, int matched) {
    if (i == n) {
      const double total = acc +
                           lambda1 * static_cast<double>(n - matched) +
                           lambda2 * static_cast<double>(m - matched);
      if (total < best_value) {
        best_value = total;
        best = current;
      }
      return;
    }
    current[i] = kUnassigned;
    dfs(i + 1, next_j, acc, matched);
    for (int j = next_j; j < m; ++j) {
      current[i] = j;
      dfs(i + 1, j + 1, acc + cost(x[i], y[j]), matched + 1);
    }
    current[i] = kUnassigned;
  }
};

void check_cells(std::size_t n, std::size_t m) {
  if (n * m > 10'000'000ULL) {
    throw ValidationError("instance too large for the dynamic program");
  }
}

// Exact min-cost perfect assignment on a square matrix via the Hungarian
// method with potentials, O(size^3). Handles negative entries.
double solve_assignment(int size, const std::vector<double>& a) {
  std::vector<double> u(size + 1, 0.0), v(size + 1, 0.0);
  std::vector<int> match(size + 1, 0), way(size + 1, 0);
  for (int i = 1; i <= size; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> min_slack(size + 1, kInf);
    std::vector<bool> used(size + 1, false);
    do {
      used[j0] = true;
      const int i0 = match[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= size; ++j) {
        if (used[j]) continue;
        const double cur =
            a[static_cast<std::size_t>(i0 - 1) * size + (j - 1)] - u[i0] - v[j];
        if (cur < min_slack[j]) {
          min_slack[j] = cur;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= size; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double total = 0.0;
  for (int j = 1; j <= size; ++j) {
    total += a[static_cast<std::size_t>(match[j] - 1) * size + (j - 1)];
  }
  return total;
}

}  // namespace

EnumerationResult oracle_enumerate(const SortedSamples& x,
                                   const SortedSamples& y, double lambda1,
                                   double lambda2, const CostSpec& cost) {
  if (x.size() > 14 || y.size() > 14) {
    throw ValidationError("enumeration oracle limited to n, m <= 14");
  }
  if (!std::isfinite(lambda1) || !std::isfinite(lambda2) || lambda1 < 0.0 ||
      lambda2 < 0.0) {
    throw ValidationError("penalties must be finite and non-negative");
  }
  Enumerator e{x.values(),
               y.values(),
               cost,
               lambda1,
               lambda2,
               static_cast<int>(x.size()),
               static_cast<int>(y.size()),
               std::vector<int>(x.size(), kUnassigned),
               std::vector<int>(x.size(), kUnassigned)};
  e.dfs(0, 0, 0.0, 0);
  EnumerationResult out;
  out.value = e.best_value;
  out.plan.assignment = std::move(e.best);
  return out;
}

double oracle_dp(const SortedSamples& x, const SortedSamples& y, double lambda,
                 const CostSpec& cost) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw ValidationError("lambda must be finite and non-negative");
  }
  check_cells(std::max<std::size_t>(x.size(), 1),
              std::max<std::size_t>(y.size(), 1));
  const std::size_t n = x.size();
  const std::size_t m = y.size();
  std::vector<double> prev(m + 1, 0.0), row(m + 1, 0.0);
  for (std::size_t i = 1; i <= n; ++i) {
    row[0] = 0.0;
    for (std::size_t j = 1; j <= m; ++j) {
      const double w = cost(x[i - 1], y[j - 1]) - 2.0 * lambda;
      row[j] = std::min({prev[j], row[j - 1], prev[j - 1] + w});
    }
    std::swap(prev, row);
  }
  return prev[m] + lambda * static_cast<double>(n + m);
}

DpPlanResult oracle_dp_plan(const SortedSamples& x, const SortedSamples& y,
                            double lambda, const CostSpec& cost) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw ValidationError("lambda must be finite and non-negative");
  }
  check_cells(std::max<std::size_t>(x.size(), 1),
              std::max<std::size_t>(y.size(), 1));
  const std::size_t n = x.size();
  const std::size_t m = y.size();
  enum : std::uint8_t { kSkipX = 0, kSkipY = 1, kMatch = 2 };
  std::vector<std::uint8_t> choice((n + 1) * (m + 1), kSkipX);
  std::vector<double> prev(m + 1, 0.0), row(m + 1, 0.0);
  for (std::size_t j = 0; j <= m; ++j) choice[j] = kSkipY;
  for (std::size_t i = 1; i <= n; ++i) {
    row[0] = 0.0;
    for (std::size_t j = 1; j <= m; ++j) {
      const double w = cost(x[i - 1], y[j - 1]) - 2.0 * lambda;
      double v = prev[j];
      std::uint8_t c = kSkipX;
      if (row[j - 1] < v) {
        v = row[j - 1];
        c = kSkipY;
      }
      if (prev[j - 1] + w < v) {
        v = prev[j - 1] + w;
        c = kMatch;
      }
      row[j] = v;
      choice[i * (m + 1) + j] = c;
    }
    std::swap(prev, row);
  }
  DpPlanResult out;
  out.value = prev[m] + lambda * static_cast<double>(n + m);
  out.plan.assignment.assign(n, kUnassigned);
  std::size_t i = n, j = m;
  while (i > 0 && j > 0) {
    switch (choice[i * (m + 1) + j]) {
      case kSkipX:
        --i;
        break;
      case kSkipY:
        --j;
        break;
      default:
        out.plan.assignment[i - 1] = static_cast<int>(j - 1);
        --i;
        --j;
        break;
    }
  }
  return out;
}

double oracle_dp_full(const SortedSamples& x, const SortedSamples& y,
                      const CostSpec& cost, double lambda_report) {
  if (x.size() > y.size()) {
    throw ValidationError("full-assignment oracle needs n <= m");
  }
  check_cells(std::max<std::size_t>(x.size(), 1),
              std::max<std::size_t>(y.size(), 1));
  const std::size_t n = x.size();
  const std::size_t m = y.size();
  std::vector<double> prev(m + 1, 0.0), row(m + 1, 0.0);
  for (std::size_t i = 1; i <= n; ++i) {
    row[0] = kInf;
    for (std::size_t j = 1; j <= m; ++j) {
      if (j < i) {
        row[j] = kInf;
        continue;
      }
      const double via_match = prev[j - 1] + cost(x[i - 1], y[j - 1]);
      row[j] = std::min(row[j - 1], via_match);
    }
    std::swap(prev, row);
  }
  return prev[m] + lambda_report * static_cast<double>(m - n);
}

double oracle_extended_balanced(const SortedSamples& x, const SortedSamples& y,
                                double lambda, const CostSpec& cost) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw ValidationError("lambda must be finite and non-negative");
  }
  const std::size_t n = x.size();
  const std::size_t m = y.size();
  if (n + m > 200) {
    throw ValidationError("extended balanced oracle limited to n + m <= 200");
  }
  const std::size_t size = n + m;
  if (size == 0) return 0.0;
  std::vector<double> a(size * size, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      a[i * size + j] = cost(x[i], y[j]) - 2.0 * lambda;
    }
  }
  const double optimum = solve_assignment(static_cast<int>(size), a);
  return optimum + lambda * static_cast<double>(n + m);
}

}  // namespace sopt
