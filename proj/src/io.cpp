#include "sopt/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sopt::io {
namespace {

[[noreturn]] void fail(const std::string& name, int line,
                       const std::string& what) {
  throw ValidationError(name + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open_input(const std::filesystem::path& path,
                         std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw ValidationError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path,
                          std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

// Strips comments and surrounding whitespace; empty result means skip.
std::string clean_line(const std::string& raw) {
  std::string s = raw.substr(0, raw.find('#'));
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& token, const std::string& name,
                    int line) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size() || token.empty()) {
    fail(name, line, "cannot parse '" + token + "' as a number");
  }
  if (!std::isfinite(v)) fail(name, line, "non-finite value");
  return v;
}

}  // namespace

std::vector<double> read_point_list(std::istream& in,
                                    const std::string& name) {
  std::vector<double> values;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = clean_line(raw);
    if (s.empty()) continue;
    if (s.find_first_of(" \t") != std::string::npos) {
      fail(name, line, "expected one coordinate per line");
    }
    values.push_back(parse_double(s, name, line));
  }
  return values;
}

std::vector<double> read_point_list(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_point_list(in, path.string());
}

void write_point_list(std::ostream& out, std::span<const double> values) {
  out.precision(17);
  for (double v : values) out << v << '\n';
}

void write_point_list(const std::filesystem::path& path,
                      std::span<const double> values) {
  auto out = open_output(path);
  write_point_list(out, values);
}

void write_points_csv(std::ostream& out, std::span<const double> values) {
  out.precision(17);
  out << "i,x\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << i << ',' << values[i] << '\n';
  }
}

void write_points_csv(const std::filesystem::path& path,
                      std::span<const double> values) {
  auto out = open_output(path);
  write_points_csv(out, values);
}

PointCloud read_point_cloud(std::istream& in, int dim,
                            const std::string& name) {
  if (dim <= 0) throw ValidationError("cloud dimension must be >= 1");
  std::vector<double> data;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = clean_line(raw);
    if (s.empty()) continue;
    std::istringstream row(s);
    std::string token;
    int cols = 0;
    while (row >> token) {
      if (cols == dim) fail(name, line, "too many columns");
      data.push_back(parse_double(token, name, line));
      ++cols;
    }
    if (cols != dim) {
      fail(name, line,
           "expected " + std::to_string(dim) + " columns, got " +
               std::to_string(cols));
    }
  }
  return PointCloud(dim, std::move(data));
}

PointCloud read_point_cloud(const std::filesystem::path& path, int dim) {
  auto in = open_input(path);
  return read_point_cloud(in, dim, path.string());
}

void write_point_cloud(std::ostream& out, const PointCloud& cloud) {
  out.precision(17);
  for (int i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    for (int c = 0; c < cloud.dim(); ++c) {
      if (c > 0) out << ' ';
      out << p[c];
    }
    out << '\n';
  }
}

void write_point_cloud(const std::filesystem::path& path,
                       const PointCloud& cloud) {
  auto out = open_output(path);
  write_point_cloud(out, cloud);
}

namespace {

// PPM header token: skips whitespace and '#' comments.
std::string ppm_token(std::istream& in, const std::string& name) {
  std::string token;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  while (c != EOF && !std::isspace(c)) {
    token.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (token.empty()) throw ValidationError(name + ": truncated PPM header");
  return token;
}

int ppm_int(std::istream& in, const std::string& name) {
  const std::string token = ppm_token(in, name);
  char* end = nullptr;
  const long v = std::strtol(token.c_str(), &end, 10);
  if (end != token.c_str() + token.size() || v < 0) {
    throw ValidationError(name + ": bad PPM header field '" + token + "'");
  }
  return static_cast<int>(v);
}

}  // namespace

Image read_ppm(std::istream& in, const std::string& name) {
  if (ppm_token(in, name) != "P6") {
    throw ValidationError(name + ": not a binary P6 PPM");
  }
  Image img;
  img.width = ppm_int(in, name);
  img.height = ppm_int(in, name);
  const int maxval = ppm_int(in, name);
  if (maxval != 255) {
    throw ValidationError(name + ": only 8-bit PPM (maxval 255) supported");
  }
  // The single whitespace byte after maxval was consumed by the tokenizer.
  const std::size_t bytes = static_cast<std::size_t>(img.width) * img.height * 3;
  std::vector<char> buffer(bytes);
  in.read(buffer.data(), static_cast<std::streamsize>(bytes));
  if (static_cast<std::size_t>(in.gcount()) != bytes) {
    throw ValidationError(name + ": truncated PPM pixel data");
  }
  img.pixels.resize(bytes);
  for (std::size_t i = 0; i < bytes; ++i) {
    img.pixels[i] = static_cast<unsigned char>(buffer[i]) / 255.0;
  }
  return img;
}

Image read_ppm(const std::filesystem::path& path) {
  auto in = open_input(path, std::ios::in | std::ios::binary);
  return read_ppm(in, path.string());
}

void write_ppm(std::ostream& out, const Image& img) {
  validate_image(img);
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  std::vector<char> buffer(img.pixels.size());
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    const double v = std::round(img.pixels[i] * 255.0);
    buffer[i] = static_cast<char>(
        static_cast<unsigned char>(std::clamp(v, 0.0, 255.0)));
  }
  out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
}

void write_ppm(const std::filesystem::path& path, const Image& img) {
  auto out = open_output(path, std::ios::out | std::ios::binary);
  write_ppm(out, img);
}

}  // namespace sopt::io
