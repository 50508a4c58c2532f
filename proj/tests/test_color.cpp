#include <cmath>

#include "doctest.h"
#include "sopt/color.hpp"
#include "test_util.hpp"

using namespace sopt;

namespace {

Image solid_image(int w, int h, double r, double g, double b) {
  Image img;
  img.width = w;
  img.height = h;
  img.pixels.reserve(static_cast<std::size_t>(w) * h * 3);
  for (int i = 0; i < w * h; ++i) {
    img.pixels.push_back(r);
    img.pixels.push_back(g);
    img.pixels.push_back(b);
  }
  return img;
}

Image random_image(Rng& rng, int w, int h) {
  Image img;
  img.width = w;
  img.height = h;
  img.pixels.resize(static_cast<std::size_t>(w) * h * 3);
  for (double& v : img.pixels) v = rng.uniform01();
  return img;
}

}  // namespace

TEST_CASE("image validation") {
  Image img = solid_image(2, 2, 0.5, 0.5, 0.5);
  CHECK_NOTHROW(validate_image(img));
  img.pixels[0] = 1.5;
  CHECK_THROWS_AS(validate_image(img), ValidationError);
  img.pixels[0] = -0.1;
  CHECK_THROWS_AS(validate_image(img), ValidationError);
  img.pixels.pop_back();
  CHECK_THROWS_AS(validate_image(img), ValidationError);
}

TEST_CASE("kmeans on a monochrome image") {
  const Image img = solid_image(8, 8, 0.3, 0.6, 0.9);
  const auto palette = kmeans_palette(img, 1, 42, 5);
  CHECK(palette.centroids.size() == 1);
  CHECK(palette.centroids.point(0)[0] == doctest::Approx(0.3));
  CHECK(palette.centroids.point(0)[1] == doctest::Approx(0.6));
  CHECK(palette.centroids.point(0)[2] == doctest::Approx(0.9));
  for (int a : palette.assignment) CHECK(a == 0);
}

TEST_CASE("kmeans separates a two-color image") {
  Image img = solid_image(8, 4, 0.1, 0.1, 0.1);
  for (int i = 16; i < 32; ++i) {
    auto p = img.mutable_pixel(i);
    p[0] = 0.9;
    p[1] = 0.8;
    p[2] = 0.7;
  }
  // any seed must work: empty clusters relocate to the unserved color
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL}) {
    const auto palette = kmeans_palette(img, 2, seed, 6);
    std::vector<double> first(palette.centroids.point(0).begin(),
                              palette.centroids.point(0).end());
    std::vector<double> second(palette.centroids.point(1).begin(),
                               palette.centroids.point(1).end());
    if (first[0] > second[0]) std::swap(first, second);
    CHECK(first[0] == doctest::Approx(0.1));
    CHECK(first[2] == doctest::Approx(0.1));
    CHECK(second[0] == doctest::Approx(0.9));
    CHECK(second[2] == doctest::Approx(0.7));
  }
}

TEST_CASE("kmeans objective is non-increasing and deterministic") {
  Rng rng(7);
  const Image img = random_image(rng, 16, 16);
  const auto palette = kmeans_palette(img, 8, 99, 12);
  REQUIRE(palette.sse_trace.size() == 13);
  for (std::size_t t = 1; t < palette.sse_trace.size(); ++t) {
    CHECK(palette.sse_trace[t] <= palette.sse_trace[t - 1] + 1e-12);
  }
  const auto again = kmeans_palette(img, 8, 99, 12);
  CHECK(palette.centroids.data() == again.centroids.data());
  CHECK(palette.assignment == again.assignment);

  CHECK_THROWS_AS(kmeans_palette(img, 0, 1, 3), ValidationError);
  CHECK_THROWS_AS(kmeans_palette(img, 16 * 16 + 1, 1, 3), ValidationError);
}

TEST_CASE("palette transfer between identical palettes is the identity") {
  Rng rng(11);
  const Image img = random_image(rng, 12, 12);
  const auto palette = kmeans_palette(img, 6, 5, 8);
  const auto moved = transfer_palette(palette, palette, 10.0, 24, 3);
  for (std::size_t i = 0; i < moved.centroids.data().size(); ++i) {
    CHECK(std::abs(moved.centroids.data()[i] - palette.centroids.data()[i]) <=
          1e-6);
  }
  for (int count : moved.per_slice_matched) {
    CHECK(count == 6);
  }
}

TEST_CASE("large lambda transports every centroid on every slice") {
  Rng rng(13);
  const Image src = random_image(rng, 10, 10);
  const Image tgt = random_image(rng, 10, 10);
  const auto ps = kmeans_palette(src, 5, 21, 8);
  const auto pt = kmeans_palette(tgt, 5, 22, 8);
  // lambda = 10 dominates the squared diameter of the unit cube (3)
  const auto moved = transfer_palette(ps, pt, 10.0, 32, 77);
  for (int count : moved.per_slice_matched) CHECK(count == 5);
  for (double v : moved.centroids.data()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("small lambda leaves part of a separated palette untransported") {
  // two well-separated palettes: all source mass near the origin corner,
  // all target mass near the opposite corner
  Palette src, tgt;
  src.centroids = PointCloud(3, {0.02, 0.02, 0.02, 0.05, 0.03, 0.02,
                                 0.03, 0.06, 0.04, 0.01, 0.04, 0.05});
  tgt.centroids = PointCloud(3, {0.97, 0.95, 0.98, 0.96, 0.99, 0.94,
                                 0.95, 0.97, 0.96, 0.99, 0.98, 0.97});
  // 2*lambda = 0.1 while the projected squared separation exceeds it on any
  // direction that is not nearly orthogonal to the corner-to-corner axis, so
  // some early slice transports nothing
  const auto moved = transfer_palette(src, tgt, 0.05, 32, 5);
  int min_matched = 1 << 20;
  for (int count : moved.per_slice_matched) {
    min_matched = std::min(min_matched, count);
  }
  CHECK(min_matched < 4);
}

TEST_CASE("reconstruction applies centroid displacements") {
  Rng rng(17);
  const Image img = random_image(rng, 9, 9);
  const auto palette = kmeans_palette(img, 4, 31, 6);

  SUBCASE("zero displacement is the identity") {
    const auto out = reconstruct(img, palette, palette.centroids);
    CHECK(out.pixels == img.pixels);
  }

  SUBCASE("uniform displacement shifts every pixel") {
    PointCloud moved = palette.centroids;
    const double delta[3] = {0.05, -0.03, 0.02};
    for (int c = 0; c < moved.size(); ++c) {
      auto p = moved.mutable_point(c);
      for (int ch = 0; ch < 3; ++ch) p[ch] += delta[ch];
    }
    const auto out = reconstruct(img, palette, moved);
    for (int i = 0; i < img.pixel_count(); ++i) {
      for (int ch = 0; ch < 3; ++ch) {
        const double expected =
            std::clamp(img.pixel(i)[ch] + delta[ch], 0.0, 1.0);
        CHECK(out.pixel(i)[ch] == doctest::Approx(expected));
      }
    }
  }

  SUBCASE("outputs stay inside the unit cube") {
    PointCloud moved = palette.centroids;
    for (double& v : moved.data()) v = std::clamp(v + 0.9, 0.0, 1.0);
    const auto out = reconstruct(img, palette, moved);
    CHECK_NOTHROW(validate_image(out));
  }

  SUBCASE("mismatched palettes are rejected") {
    const PointCloud wrong(3, {0.1, 0.2, 0.3});
    CHECK_THROWS_AS(reconstruct(img, palette, wrong), ValidationError);
  }
}

TEST_CASE("whole pipeline is nearly idempotent on identical images") {
  // identical inputs with one pipeline seed give identical palettes, so the
  // transfer collapses to the identity up to numerical noise
  Rng rng(23);
  const Image img = random_image(rng, 16, 16);
  const auto src_palette = kmeans_palette(img, 12, 3, 10);
  const auto tgt_palette = kmeans_palette(img, 12, 3, 10);
  const auto moved = transfer_palette(src_palette, tgt_palette, 10.0, 48, 9);
  const auto out = reconstruct(img, src_palette, moved.centroids);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    CHECK(std::abs(out.pixels[i] - img.pixels[i]) <= 2.0 / 255.0);
  }
}
