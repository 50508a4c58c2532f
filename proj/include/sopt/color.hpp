#pragma once

#include <span>
#include <vector>

#include "sopt/core.hpp"
#include "sopt/sliced.hpp"

namespace sopt {

/// RGB image with channels normalized to [0, 1].
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;  // 3 * width * height, row-major RGB

  int pixel_count() const { return width * height; }
  std::span<const double> pixel(int i) const {
    return {pixels.data() + static_cast<std::size_t>(i) * 3, 3};
  }
  std::span<double> mutable_pixel(int i) {
    return {pixels.data() + static_cast<std::size_t>(i) * 3, 3};
  }
};

/// Throws unless dimensions and channel ranges are consistent.
void validate_image(const Image& img);

/// Color palette: k centroids in [0,1]^3 plus a pixel -> centroid map.
struct Palette {
  PointCloud centroids;         // dim 3
  std::vector<int> assignment;  // one entry per pixel
  std::vector<double> sse_trace;  // within-cluster SSE per Lloyd pass
};

/// Lloyd's k-means on the image's pixels, seeded from k distinct random
/// pixels. Deterministic per seed; empty clusters keep their centroid.
Palette kmeans_palette(const Image& img, int k, std::uint64_t seed,
                       int iterations = 25);

struct PaletteTransfer {
  PointCloud centroids;  // transported source centroids, clamped to [0,1]^3
  std::vector<int> per_slice_matched;
};

/// Moves the source centroids toward the target palette with num_slices
/// sliced partial-transport steps; unmatched centroids sit still on their
/// slice. Clamping happens once at the end.
PaletteTransfer transfer_palette(const Palette& source, const Palette& target,
                                 double lambda, int num_slices,
                                 std::uint64_t seed,
                                 const CostSpec& cost = CostSpec());

/// Shifts every pixel by its centroid's displacement, clamped to [0, 1].
Image reconstruct(const Image& img, const Palette& source,
                  const PointCloud& transported);

}  // namespace sopt
