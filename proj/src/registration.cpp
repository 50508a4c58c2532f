#include "sopt/registration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sopt {
namespace {

Eigen::MatrixXd to_matrix(const PointCloud& cloud) {
  Eigen::MatrixXd out(cloud.dim(), cloud.size());
  for (int i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    for (int c = 0; c < cloud.dim(); ++c) out(c, i) = p[c];
  }
  return out;
}

PointCloud gather(const PointCloud& cloud, const std::vector<int>& indices) {
  std::vector<double> data;
  data.reserve(indices.size() * static_cast<std::size_t>(cloud.dim()));
  for (int i : indices) {
    const auto p = cloud.point(i);
    data.insert(data.end(), p.begin(), p.end());
  }
  return PointCloud(cloud.dim(), std::move(data));
}

double squared_bbox_diagonal(const PointCloud& cloud) {
  if (cloud.size() == 0) return 1.0;
  const int d = cloud.dim();
  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  for (int i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    for (int c = 0; c < d; ++c) {
      lo[c] = std::min(lo[c], p[c]);
      hi[c] = std::max(hi[c], p[c]);
    }
  }
  double acc = 0.0;
  for (int c = 0; c < d; ++c) acc += (hi[c] - lo[c]) * (hi[c] - lo[c]);
  return acc > 0.0 ? acc : 1.0;
}

}  // namespace

Transform Transform::identity(int dim) {
  Transform t;
  t.rotation = Eigen::MatrixXd::Identity(dim, dim);
  t.scale = 1.0;
  t.translation = Eigen::VectorXd::Zero(dim);
  return t;
}

PointCloud Transform::apply(const PointCloud& cloud) const {
  if (cloud.dim() != dim()) {
    throw ValidationError("transform dimension does not match the cloud");
  }
  const Eigen::MatrixXd mapped =
      (scale * rotation * to_matrix(cloud)).colwise() + translation;
  std::vector<double> data(cloud.data().size());
  for (int i = 0; i < cloud.size(); ++i) {
    for (int c = 0; c < cloud.dim(); ++c) {
      data[static_cast<std::size_t>(i) * cloud.dim() + c] = mapped(c, i);
    }
  }
  return PointCloud(cloud.dim(), std::move(data));
}

Eigen::MatrixXd Transform::packed() const {
  Eigen::MatrixXd out(dim(), dim() + 1);
  out.leftCols(dim()) = scale * rotation;
  out.col(dim()) = translation;
  return out;
}

Transform umeyama_fit(const PointCloud& source, const PointCloud& target) {
  if (source.dim() != target.dim()) {
    throw ValidationError("source and target dimensions differ");
  }
  const int d = source.dim();
  const int k = source.size();
  if (target.size() != k) {
    throw ValidationError("source and target must pair up point for point");
  }
  if (k < d + 1) {
    throw ValidationError("similarity fit needs at least dim+1 point pairs");
  }

  const Eigen::MatrixXd xs = to_matrix(source);
  const Eigen::MatrixXd ys = to_matrix(target);
  const Eigen::VectorXd x_mean = xs.rowwise().mean();
  const Eigen::VectorXd y_mean = ys.rowwise().mean();
  const Eigen::MatrixXd xd = xs.colwise() - x_mean;
  const Eigen::MatrixXd yd = ys.colwise() - y_mean;

  const double x_var = xd.squaredNorm() / k;
  if (x_var <= 1e-300) {
    throw ValidationError("degenerate source: all points coincide");
  }
  const Eigen::MatrixXd sigma = (yd * xd.transpose()) / k;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      sigma, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd singular = svd.singularValues();
  if (d >= 2 && singular(d - 2) <= 1e-12 * std::max(singular(0), 1e-300)) {
    throw ValidationError(
        "degenerate source: covariance rank below dim-1, transform not "
        "identifiable");
  }
  Eigen::VectorXd signs = Eigen::VectorXd::Ones(d);
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) {
    signs(d - 1) = -1.0;
  }
  Transform t;
  t.rotation =
      svd.matrixU() * signs.asDiagonal() * svd.matrixV().transpose();
  t.scale = singular.dot(signs) / x_var;
  t.translation = y_mean - t.scale * t.rotation * x_mean;
  return t;
}

double transform_error(const Transform& a, const Transform& b) {
  if (a.dim() != b.dim()) {
    throw ValidationError("transforms have different dimensions");
  }
  return (a.packed() - b.packed()).norm();
}

RegistrationResult register_clouds(const PointCloud& source,
                                   const PointCloud& target,
                                   const RegistrationConfig& config) {
  if (source.dim() != target.dim()) {
    throw ValidationError("source and target dimensions differ");
  }
  const int d = source.dim();
  if (d < 2) throw ValidationError("registration needs dimension 2 or 3");
  if (config.clean_source_count <= 0 ||
      config.clean_source_count > source.size()) {
    throw ValidationError("clean_source_count must be in (0, n]");
  }
  if (config.iterations <= 0) {
    throw ValidationError("iterations must be >= 1");
  }
  if (!(config.lambda_decrease > 0.0 && config.lambda_decrease < 1.0)) {
    throw ValidationError("lambda_decrease must lie in (0, 1)");
  }
  if (!(config.lambda_increase > 1.0)) {
    throw ValidationError("lambda_increase must exceed 1");
  }

  const Eigen::MatrixXd xs = to_matrix(source);
  const Eigen::MatrixXd ys = to_matrix(target);

  Transform t = Transform::identity(d);
  if (source.size() > 0 && target.size() > 0) {
    t.translation = ys.rowwise().mean() - xs.rowwise().mean();
  }
  double lambda = config.initial_lambda > 0.0 ? config.initial_lambda
                                              : squared_bbox_diagonal(target);

  const DirectionSet directions =
      sample_directions(d, config.iterations, config.seed);

  RegistrationResult result;
  result.trace.reserve(static_cast<std::size_t>(config.iterations));
  PointCloud y_hat;
  bool refit_done = true;  // forces the first recompute from the transform
  for (int l = 0; l < config.iterations; ++l) {
    if (refit_done) y_hat = t.apply(source);

    const SliceDisplacement step = sopt_slice_displacement(
        y_hat, target, directions.direction(l), lambda, config.cost);
    for (int i = 0; i < y_hat.size(); ++i) {
      auto p = y_hat.mutable_point(i);
      const double* offset =
          step.offsets.data() + static_cast<std::size_t>(i) * d;
      for (int c = 0; c < d; ++c) p[c] += offset[c];
    }

    IterationRecord record;
    record.lambda = lambda;
    record.matched = static_cast<int>(step.matched.size());
    if (record.matched >= d + 1) {
      try {
        t = umeyama_fit(gather(source, step.matched),
                        gather(y_hat, step.matched));
        refit_done = true;
      } catch (const ValidationError&) {
        // Degenerate matched subset; keep accumulating displacements.
        record.fit_skipped = true;
        refit_done = false;
      }
    } else {
      record.fit_skipped = true;
      refit_done = false;
    }

    lambda *= (record.matched > config.clean_source_count)
                  ? config.lambda_decrease
                  : config.lambda_increase;
    lambda = std::min(lambda, 1e100);  // clean runs raise lambda forever
    result.trace.push_back(record);
  }
  result.transform = t;
  return result;
}

}  // namespace sopt
