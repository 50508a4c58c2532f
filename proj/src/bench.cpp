#include "sopt/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>

#include "sopt/solver.hpp"

namespace sopt {
namespace {

constexpr double kXMeans[] = {-2.0, 0.0, 2.0, 4.0, 6.0};
constexpr double kYMeans[] = {-3.0, -1.0, 1.0, 3.0, 5.0, 7.0};

}  // namespace

BenchGenerator parse_bench_generator(const std::string& name) {
  if (name == "uniform") return BenchGenerator::kUniform;
  if (name == "gaussian-mixture") return BenchGenerator::kGaussianMixture;
  throw ValidationError("unknown generator '" + name +
                        "'; expected uniform or gaussian-mixture");
}

std::string bench_generator_name(BenchGenerator generator) {
  return generator == BenchGenerator::kUniform ? "uniform"
                                               : "gaussian-mixture";
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL + salt;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<BenchRecord> run_bench(const BenchConfig& config) {
  if (config.sizes.empty() || config.lambdas.empty()) {
    throw ValidationError("bench needs at least one size and one lambda");
  }
  if (config.repeats <= 0) throw ValidationError("repeats must be >= 1");

  std::vector<BenchRecord> records;
  records.reserve(config.sizes.size() * config.lambdas.size() *
                  static_cast<std::size_t>(config.repeats));
  std::uint64_t cell = 0;
  for (int n : config.sizes) {
    if (n < 0) throw ValidationError("sizes must be non-negative");
    const int m = n + config.m_offset;
    if (m < 0) throw ValidationError("m_offset makes m negative");
    for (double lambda : config.lambdas) {
      for (int repeat = 0; repeat < config.repeats; ++repeat) {
        BenchRecord record;
        record.generator = bench_generator_name(config.generator);
        record.n = n;
        record.m = m;
        record.lambda = lambda;
        record.repeat = repeat;
        try {
          Rng rng(mix_seed(config.seed, cell));
          std::vector<double> xs, ys;
          if (config.generator == BenchGenerator::kUniform) {
            xs = gen_uniform_raw(n, -20.0, 20.0, rng);
            ys = gen_uniform_raw(m, -40.0, 40.0, rng);
          } else {
            xs = gen_mixture_raw(n, kXMeans, rng, nullptr);
            ys = gen_mixture_raw(m, kYMeans, rng, nullptr);
          }
          SolverConfig solver_config;
          solver_config.lambda = lambda;
          solver_config.cost = config.cost;
          const auto start = std::chrono::steady_clock::now();
          std::sort(xs.begin(), xs.end());
          std::sort(ys.begin(), ys.end());
          const Solution solution =
              solve(SortedSamples(std::move(xs)), SortedSamples(std::move(ys)),
                    solver_config);
          const auto stop = std::chrono::steady_clock::now();
          record.seconds =
              std::chrono::duration<double>(stop - start).count();
          record.value = solution.value;
        } catch (const std::exception& e) {
          record.status = e.what();
        }
        records.push_back(std::move(record));
        ++cell;
      }
    }
  }
  return records;
}

void write_bench_csv(std::ostream& out,
                     const std::vector<BenchRecord>& records) {
  out.precision(17);
  out << "generator,n,m,lambda,repeat,seconds,value,status\n";
  for (const auto& r : records) {
    out << r.generator << ',' << r.n << ',' << r.m << ',' << r.lambda << ','
        << r.repeat << ',' << r.seconds << ',' << r.value << ',' << r.status
        << '\n';
  }
}

double median(std::vector<double> values) {
  if (values.empty()) throw ValidationError("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid]
                                : 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<BenchCell> median_times(const std::vector<BenchRecord>& records) {
  std::map<std::pair<int, double>, std::vector<double>> cells;
  for (const auto& r : records) {
    if (r.status == "ok") cells[{r.n, r.lambda}].push_back(r.seconds);
  }
  std::vector<BenchCell> out;
  out.reserve(cells.size());
  for (auto& [key, times] : cells) {
    out.push_back({key.first, key.second, median(std::move(times))});
  }
  return out;
}

double log_log_slope(const std::vector<double>& xs,
                     const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw ValidationError("slope fit needs at least two matching points");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double lx = std::log(xs[i]);
    const double ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) {
    throw ValidationError("slope fit is degenerate: all x equal");
  }
  return (n * sxy - sx * sy) / denom;
}

}  // namespace sopt
