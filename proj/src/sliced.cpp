#include "sopt/sliced.hpp"

#include <algorithm>
#include <cmath>

#include "sopt/solver.hpp"

namespace sopt {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) acc += a[c] * b[c];
  return acc;
}

void check_same_dim(const PointCloud& x, const PointCloud& y) {
  if (x.dim() != y.dim()) {
    throw ValidationError("point clouds have different dimensions: " +
                          std::to_string(x.dim()) + " vs " +
                          std::to_string(y.dim()));
  }
}

}  // namespace

PointCloud::PointCloud(int dim, std::vector<double> data)
    : dim_(dim), data_(std::move(data)) {
  if (dim_ <= 0) throw ValidationError("point dimension must be >= 1");
  if (data_.size() % static_cast<std::size_t>(dim_) != 0) {
    throw ValidationError("cloud data length is not a multiple of dim");
  }
  for (double v : data_) {
    if (!std::isfinite(v)) {
      throw ValidationError("cloud contains a non-finite coordinate");
    }
  }
}

PointCloud PointCloud::zeros(int dim, int count) {
  if (dim <= 0) throw ValidationError("point dimension must be >= 1");
  if (count < 0) throw ValidationError("point count must be >= 0");
  return PointCloud(
      dim, std::vector<double>(static_cast<std::size_t>(dim) * count, 0.0));
}

DirectionSet sample_directions(int dim, int count, std::uint64_t seed) {
  if (dim <= 0) throw ValidationError("direction dimension must be >= 1");
  if (count <= 0) throw ValidationError("direction count must be >= 1");
  DirectionSet out;
  out.dim = dim;
  out.seed = seed;
  out.data.resize(static_cast<std::size_t>(dim) * count);
  Rng rng(seed);
  for (int l = 0; l < count; ++l) {
    double* theta = out.data.data() + static_cast<std::size_t>(l) * dim;
    double norm = 0.0;
    do {
      norm = 0.0;
      for (int c = 0; c < dim; ++c) {
        theta[c] = rng.normal();
        norm += theta[c] * theta[c];
      }
      norm = std::sqrt(norm);
    } while (norm < 1e-12);
    for (int c = 0; c < dim; ++c) theta[c] /= norm;
  }
  return out;
}

Projection project(const PointCloud& cloud, std::span<const double> direction) {
  if (static_cast<int>(direction.size()) != cloud.dim()) {
    throw ValidationError("direction dimension does not match the cloud");
  }
  std::vector<double> raw(static_cast<std::size_t>(cloud.size()));
  for (int i = 0; i < cloud.size(); ++i) {
    raw[static_cast<std::size_t>(i)] = dot(cloud.point(i), direction);
  }
  auto perm = sort_with_permutation(raw);
  return {std::move(perm.sorted), std::move(perm.order)};
}

double SoptEstimate::metric(double p) const {
  return std::pow(std::max(value, 0.0), 1.0 / p);
}

SoptEstimate sopt_estimate(const PointCloud& x, const PointCloud& y,
                           double lambda, const DirectionSet& directions,
                           const CostSpec& cost) {
  check_same_dim(x, y);
  if (directions.dim != x.dim()) {
    throw ValidationError("direction set dimension does not match the clouds");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ValidationError("sliced estimate needs a finite lambda > 0");
  }
  SoptEstimate out;
  out.per_slice.resize(static_cast<std::size_t>(directions.count()));
  SolverConfig config;
  config.lambda = lambda;
  config.cost = cost;
  for (int l = 0; l < directions.count(); ++l) {
    const auto px = project(x, directions.direction(l));
    const auto py = project(y, directions.direction(l));
    out.per_slice[static_cast<std::size_t>(l)] =
        solve(px.values, py.values, config).value;
  }
  double acc = 0.0;
  for (double v : out.per_slice) acc += v;
  out.value = directions.count() > 0 ? acc / directions.count() : 0.0;
  return out;
}

SoptEstimate sopt_estimate(const PointCloud& x, const PointCloud& y,
                           double lambda, int num_directions,
                           std::uint64_t seed, const CostSpec& cost) {
  return sopt_estimate(x, y, lambda,
                       sample_directions(x.dim(), num_directions, seed), cost);
}

SliceDisplacement sopt_slice_displacement(const PointCloud& x_hat,
                                          const PointCloud& y,
                                          std::span<const double> direction,
                                          double lambda,
                                          const CostSpec& cost) {
  check_same_dim(x_hat, y);
  const auto px = project(x_hat, direction);
  const auto py = project(y, direction);
  SolverConfig config;
  config.lambda = lambda;
  config.cost = cost;
  const Solution solution = solve(px.values, py.values, config);

  SliceDisplacement out;
  out.offsets.assign(
      static_cast<std::size_t>(x_hat.size()) * x_hat.dim(), 0.0);
  for (std::size_t r = 0; r < solution.plan.assignment.size(); ++r) {
    const int q = solution.plan.assignment[r];
    if (q == kUnassigned) continue;
    const int source = px.order[r];
    const double shift =
        py.values[static_cast<std::size_t>(q)] - px.values[r];
    double* offset =
        out.offsets.data() + static_cast<std::size_t>(source) * x_hat.dim();
    for (int c = 0; c < x_hat.dim(); ++c) offset[c] = shift * direction[c];
    out.matched.push_back(source);
  }
  std::sort(out.matched.begin(), out.matched.end());
  return out;
}

}  // namespace sopt
