#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sopt/core.hpp"
#include "sopt/sliced.hpp"

namespace sopt {

/// Rigid-plus-scale map T(x) = s * R * x + beta with R a proper rotation.
struct Transform {
  Eigen::MatrixXd rotation;     // d x d
  double scale = 1.0;
  Eigen::VectorXd translation;  // d

  static Transform identity(int dim);

  int dim() const { return static_cast<int>(rotation.rows()); }
  PointCloud apply(const PointCloud& cloud) const;
  /// The d x (d+1) matrix [s*R | beta].
  Eigen::MatrixXd packed() const;
};

/// Closed-form least-squares similarity transform from paired points:
/// target ~ s * R * source + beta, with det(R) = +1 enforced through the
/// sign-corrected SVD. Needs at least dim+1 pairs and a source covariance
/// of rank >= dim-1; degenerate input throws with a diagnostic.
Transform umeyama_fit(const PointCloud& source, const PointCloud& target);

/// Frobenius norm of the difference of the two packed [s*R | beta] matrices.
double transform_error(const Transform& a, const Transform& b);

struct RegistrationConfig {
  int clean_source_count = 0;   // prior on how many source points are clean
  int iterations = 0;           // one random projection per iteration
  double initial_lambda = 0.0;  // <= 0 picks the squared bbox diagonal of Y
  double lambda_decrease = 0.98;
  double lambda_increase = 1.02;
  std::uint64_t seed = 0;
  CostSpec cost{};
};

struct IterationRecord {
  double lambda = 0.0;  // value used during the iteration
  int matched = 0;
  bool fit_skipped = false;
};

struct RegistrationResult {
  Transform transform;
  std::vector<IterationRecord> trace;
};

/// Iterative sliced registration: per iteration, match the transformed
/// source to the target along one random direction, nudge the matched
/// points onto their targets' projections, refit the transform on the
/// matched subset, then lower lambda when more than clean_source_count
/// points matched and raise it otherwise. Iterations whose match count is
/// below dim+1 (or whose matched subset is degenerate) skip the refit and
/// are flagged in the trace.
RegistrationResult register_clouds(const PointCloud& source,
                                   const PointCloud& target,
                                   const RegistrationConfig& config);

}  // namespace sopt
