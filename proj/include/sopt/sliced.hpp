#pragma once

#include <span>
#include <vector>

#include "sopt/core.hpp"

namespace sopt {

/// Flat row-major storage of `size` points in `dim` dimensions.
class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(int dim, std::vector<double> data);
  static PointCloud zeros(int dim, int count);

  int dim() const { return dim_; }
  int size() const {
    return dim_ == 0 ? 0 : static_cast<int>(data_.size()) / dim_;
  }
  std::span<const double> point(int i) const {
    return {data_.data() + static_cast<std::size_t>(i) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  std::span<double> mutable_point(int i) {
    return {data_.data() + static_cast<std::size_t>(i) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

 private:
  int dim_ = 0;
  std::vector<double> data_;
};

/// A batch of unit vectors drawn uniformly from the sphere.
struct DirectionSet {
  int dim = 0;
  std::vector<double> data;  // count * dim, row-major
  std::uint64_t seed = 0;

  int count() const {
    return dim == 0 ? 0 : static_cast<int>(data.size()) / dim;
  }
  std::span<const double> direction(int l) const {
    return {data.data() + static_cast<std::size_t>(l) * dim,
            static_cast<std::size_t>(dim)};
  }
};

/// i.i.d. uniform directions via normalized standard Gaussian vectors;
/// deterministic per seed.
DirectionSet sample_directions(int dim, int count, std::uint64_t seed);

/// Projection of a cloud onto a direction: values[r] is the r-th smallest
/// dot product and order[r] the index of the point it came from.
struct Projection {
  SortedSamples values;
  std::vector<int> order;
};

Projection project(const PointCloud& cloud, std::span<const double> direction);

struct SoptEstimate {
  double value = 0.0;              // average of the per-slice optima
  std::vector<double> per_slice;

  /// Metric form value^(1/p).
  double metric(double p) const;
};

/// Monte-Carlo sliced estimate: mean over the given directions of the 1-D
/// partial transport optimum between the projected clouds.
SoptEstimate sopt_estimate(const PointCloud& x, const PointCloud& y,
                           double lambda, const DirectionSet& directions,
                           const CostSpec& cost = CostSpec());

SoptEstimate sopt_estimate(const PointCloud& x, const PointCloud& y,
                           double lambda, int num_directions,
                           std::uint64_t seed,
                           const CostSpec& cost = CostSpec());

/// One transport step along a direction: for each matched source point the
/// offset that aligns its projection with its target's projection, zero for
/// unmatched points. `matched` lists the matched source indices ascending.
struct SliceDisplacement {
  std::vector<double> offsets;  // size() * dim, row-major
  std::vector<int> matched;
};

SliceDisplacement sopt_slice_displacement(const PointCloud& x_hat,
                                          const PointCloud& y,
                                          std::span<const double> direction,
                                          double lambda,
                                          const CostSpec& cost = CostSpec());

}  // namespace sopt
