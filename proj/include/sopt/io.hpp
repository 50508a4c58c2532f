#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "sopt/color.hpp"
#include "sopt/sliced.hpp"

namespace sopt::io {

/// Plain-text 1-D point list: one coordinate per line, '#' starts a comment,
/// blank lines ignored. Parse failures report the offending line number.
std::vector<double> read_point_list(std::istream& in,
                                    const std::string& name = "<stream>");
std::vector<double> read_point_list(const std::filesystem::path& path);
void write_point_list(std::ostream& out, std::span<const double> values);
void write_point_list(const std::filesystem::path& path,
                      std::span<const double> values);

/// CSV rows "i,value" with a header line.
void write_points_csv(std::ostream& out, std::span<const double> values);
void write_points_csv(const std::filesystem::path& path,
                      std::span<const double> values);

/// Whitespace-separated point cloud: one point per line, dim columns,
/// '#' comments allowed.
PointCloud read_point_cloud(std::istream& in, int dim,
                            const std::string& name = "<stream>");
PointCloud read_point_cloud(const std::filesystem::path& path, int dim);
void write_point_cloud(std::ostream& out, const PointCloud& cloud);
void write_point_cloud(const std::filesystem::path& path,
                       const PointCloud& cloud);

/// Binary 8-bit P6 PPM. Reading accepts header comments; writing rounds
/// channels to bytes, so byte images round-trip exactly.
Image read_ppm(std::istream& in, const std::string& name = "<stream>");
Image read_ppm(const std::filesystem::path& path);
void write_ppm(std::ostream& out, const Image& img);
void write_ppm(const std::filesystem::path& path, const Image& img);

}  // namespace sopt::io
