#include "sopt/color.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sopt {
namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double sq_dist3(std::span<const double> a, const double* b) {
  double acc = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double d = a[c] - b[c];
    acc += d * d;
  }
  return acc;
}

}  // namespace

void validate_image(const Image& img) {
  if (img.width < 0 || img.height < 0) {
    throw ValidationError("image dimensions must be non-negative");
  }
  if (img.pixels.size() !=
      static_cast<std::size_t>(img.pixel_count()) * 3) {
    throw ValidationError("pixel buffer does not match width * height");
  }
  for (double v : img.pixels) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ValidationError("image channel outside [0, 1]");
    }
  }
}

Palette kmeans_palette(const Image& img, int k, std::uint64_t seed,
                       int iterations) {
  validate_image(img);
  const int n = img.pixel_count();
  if (k <= 0) throw ValidationError("palette size k must be >= 1");
  if (k > n) throw ValidationError("palette size k exceeds the pixel count");
  if (iterations < 0) throw ValidationError("iterations must be >= 0");

  // Seed centroids from k distinct pixels (partial Fisher-Yates).
  Rng rng(seed);
  std::vector<int> indices(static_cast<std::size_t>(n));
  std::iota(indices.begin(), indices.end(), 0);
  std::vector<double> centroids(static_cast<std::size_t>(k) * 3);
  for (int i = 0; i < k; ++i) {
    const int pick = i + rng.uniform_int(n - i);
    std::swap(indices[i], indices[pick]);
    const auto p = img.pixel(indices[i]);
    std::copy(p.begin(), p.end(), centroids.begin() + static_cast<std::size_t>(i) * 3);
  }

  Palette palette;
  palette.assignment.assign(static_cast<std::size_t>(n), 0);
  std::vector<double> sums(static_cast<std::size_t>(k) * 3);
  std::vector<int> counts(static_cast<std::size_t>(k));

  std::vector<double> nearest(static_cast<std::size_t>(n), 0.0);
  auto assign_pass = [&]() {
    double sse = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto p = img.pixel(i);
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = sq_dist3(p, centroids.data() + static_cast<std::size_t>(c) * 3);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      palette.assignment[static_cast<std::size_t>(i)] = best;
      nearest[static_cast<std::size_t>(i)] = best_d;
      sse += best_d;
    }
    return sse;
  };

  for (int t = 0; t < iterations; ++t) {
    palette.sse_trace.push_back(assign_pass());
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < n; ++i) {
      const int c = palette.assignment[static_cast<std::size_t>(i)];
      const auto p = img.pixel(i);
      double* s = sums.data() + static_cast<std::size_t>(c) * 3;
      for (int ch = 0; ch < 3; ++ch) s[ch] += p[ch];
      ++counts[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < k; ++c) {
      double* m = centroids.data() + static_cast<std::size_t>(c) * 3;
      if (counts[static_cast<std::size_t>(c)] == 0) {
        // Relocate an empty cluster onto the worst-served pixel.
        int far_i = 0;
        for (int i = 1; i < n; ++i) {
          if (nearest[static_cast<std::size_t>(i)] >
              nearest[static_cast<std::size_t>(far_i)]) {
            far_i = i;
          }
        }
        const auto p = img.pixel(far_i);
        std::copy(p.begin(), p.end(), m);
        nearest[static_cast<std::size_t>(far_i)] = 0.0;
        continue;
      }
      const double* s = sums.data() + static_cast<std::size_t>(c) * 3;
      for (int ch = 0; ch < 3; ++ch) {
        m[ch] = s[ch] / counts[static_cast<std::size_t>(c)];
      }
    }
  }
  palette.sse_trace.push_back(assign_pass());
  palette.centroids = PointCloud(3, std::move(centroids));
  return palette;
}

PaletteTransfer transfer_palette(const Palette& source, const Palette& target,
                                 double lambda, int num_slices,
                                 std::uint64_t seed, const CostSpec& cost) {
  if (source.centroids.dim() != 3 || target.centroids.dim() != 3) {
    throw ValidationError("palette centroids must be 3-dimensional");
  }
  if (num_slices <= 0) throw ValidationError("num_slices must be >= 1");

  PaletteTransfer out;
  out.centroids = source.centroids;
  out.per_slice_matched.reserve(static_cast<std::size_t>(num_slices));
  const DirectionSet directions = sample_directions(3, num_slices, seed);
  for (int l = 0; l < num_slices; ++l) {
    const SliceDisplacement step = sopt_slice_displacement(
        out.centroids, target.centroids, directions.direction(l), lambda,
        cost);
    for (std::size_t i = 0; i < out.centroids.data().size(); ++i) {
      out.centroids.data()[i] += step.offsets[i];
    }
    out.per_slice_matched.push_back(static_cast<int>(step.matched.size()));
  }
  for (double& v : out.centroids.data()) v = clamp01(v);
  return out;
}

Image reconstruct(const Image& img, const Palette& source,
                  const PointCloud& transported) {
  validate_image(img);
  if (source.assignment.size() !=
      static_cast<std::size_t>(img.pixel_count())) {
    throw ValidationError("palette assignment does not cover this image");
  }
  if (transported.dim() != 3 ||
      transported.size() != source.centroids.size()) {
    throw ValidationError(
        "transported centroids do not match the source palette");
  }
  Image out = img;
  for (int i = 0; i < img.pixel_count(); ++i) {
    const int c = source.assignment[static_cast<std::size_t>(i)];
    if (c < 0 || c >= source.centroids.size()) {
      throw ValidationError("palette assignment index out of range");
    }
    const auto original = source.centroids.point(c);
    const auto moved = transported.point(c);
    auto p = out.mutable_pixel(i);
    for (int ch = 0; ch < 3; ++ch) {
      p[ch] = clamp01(p[ch] + (moved[ch] - original[ch]));
    }
  }
  return out;
}

}  // namespace sopt
