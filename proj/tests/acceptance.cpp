// Acceptance suite: one self-contained check per criterion, each printing a
// single PASS/FAIL line. Run with no arguments for the whole battery or with
// --criterion N for one entry (the ctest registration does the latter).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "sopt/bench.hpp"
#include "sopt/color.hpp"
#include "sopt/io.hpp"
#include "sopt/oracle.hpp"
#include "sopt/registration.hpp"
#include "sopt/sliced.hpp"
#include "sopt/solver.hpp"
#include "test_util.hpp"

using namespace sopt;
using testutil::close_rel;
using testutil::grid_samples;
using testutil::random_samples;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, v);
  return buf;
}

// ---- shared instance streams -------------------------------------------

struct Instance {
  SortedSamples x, y;
  double lambda = 1.0;
};

// Criterion 1/3 stream: small instances against the enumeration oracle,
// every third one drawn from a coarse grid so duplicates are common.
std::vector<Instance> small_instances(int count) {
  Rng rng(20240817);
  const double lambdas[] = {0.1, 1.0, 10.0};
  std::vector<Instance> out;
  out.reserve(count);
  for (int t = 0; t < count; ++t) {
    Instance inst;
    const int n = rng.uniform_int(13);
    const int m = rng.uniform_int(13);
    if (t % 3 == 0) {
      inst.x = grid_samples(rng, n, 4);
      inst.y = grid_samples(rng, m, 4);
    } else {
      inst.x = random_samples(rng, n, -5, 5);
      inst.y = random_samples(rng, m, -5, 5);
    }
    inst.lambda = lambdas[t % 3];
    out.push_back(std::move(inst));
  }
  return out;
}

// Criterion 2/3 stream: half of the instances stay within the extended
// oracle's n+m <= 200 budget, the rest go up to n, m = 500.
std::vector<Instance> scale_instances(int count) {
  Rng rng(777001);
  const double lambdas[] = {0.1, 1.0, 10.0, 40.0};
  std::vector<Instance> out;
  out.reserve(count);
  for (int t = 0; t < count; ++t) {
    Instance inst;
    int n, m;
    if (t % 2 == 0) {
      n = 1 + rng.uniform_int(100);
      m = 1 + rng.uniform_int(std::max(1, 200 - n));
    } else {
      n = 1 + rng.uniform_int(500);
      m = 1 + rng.uniform_int(500);
    }
    if (t % 5 == 0) {
      inst.x = grid_samples(rng, n, 12, 0.5);
      inst.y = grid_samples(rng, m, 12, 0.5);
    } else {
      inst.x = random_samples(rng, n, -20, 20);
      inst.y = random_samples(rng, m, -40, 40);
    }
    inst.lambda = lambdas[t % 4];
    out.push_back(std::move(inst));
  }
  return out;
}

// Criterion 4/6 fuzz corpus: adversarial duplicate patterns.
std::vector<Instance> fuzz_corpus() {
  Rng rng(55005500);
  std::vector<Instance> out;
  for (int t = 0; t < 100; ++t) {
    Instance inst;
    const int n = 1 + rng.uniform_int(40);
    const int m = 1 + rng.uniform_int(40);
    switch (t % 4) {
      case 0:  // everything equal
        inst.x = SortedSamples(std::vector<double>(n, 1.0));
        inst.y = SortedSamples(std::vector<double>(m, 1.0));
        break;
      case 1:  // two levels
        inst.x = grid_samples(rng, n, 2);
        inst.y = grid_samples(rng, m, 2);
        break;
      case 2:  // coarse grid with a couple of continuous strays
        inst.x = grid_samples(rng, n, 5, 0.25);
        inst.y = grid_samples(rng, m, 5, 0.25);
        break;
      default:
        inst.x = random_samples(rng, n, -2, 2);
        inst.y = grid_samples(rng, m, 3);
        break;
    }
    const double lambdas[] = {0.0, 0.1, 1.0, 25.0};
    inst.lambda = lambdas[t % 4 == 0 ? (t / 4) % 4 : rng.uniform_int(4)];
    out.push_back(std::move(inst));
  }
  return out;
}

// ---- criteria ------------------------------------------------------------

std::string criterion_oracle_equivalence() {
  const auto instances = small_instances(1000);
  double max_gap = 0.0;
  for (std::size_t t = 0; t < instances.size(); ++t) {
    const auto& inst = instances[t];
    SolverConfig config;
    config.lambda = inst.lambda;
    const auto solution = solve(inst.x, inst.y, config);
    const auto reference =
        oracle_enumerate(inst.x, inst.y, inst.lambda, inst.lambda);
    const double scale =
        std::max({1.0, std::abs(solution.value), std::abs(reference.value)});
    max_gap = std::max(max_gap,
                       std::abs(solution.value - reference.value) / scale);
    if (!close_rel(solution.value, reference.value)) {
      throw Failure("value mismatch on instance " + std::to_string(t));
    }
    const double plan_cost =
        eval_plan_cost(inst.x, inst.y, solution.plan, inst.lambda);
    if (!close_rel(plan_cost, reference.value)) {
      throw Failure("plan cost mismatch on instance " + std::to_string(t));
    }
  }
  return "1000 instances, n,m <= 12, max rel gap " + fmt("%.1e", max_gap);
}

std::string criterion_scale_equivalence() {
  const auto instances = scale_instances(200);
  double max_gap = 0.0;
  int extended_checked = 0;
  for (std::size_t t = 0; t < instances.size(); ++t) {
    const auto& inst = instances[t];
    SolverConfig config;
    config.lambda = inst.lambda;
    const auto solution = solve(inst.x, inst.y, config);
    const double dp = oracle_dp(inst.x, inst.y, inst.lambda);
    const double scale = std::max({1.0, std::abs(solution.value), std::abs(dp)});
    max_gap = std::max(max_gap, std::abs(solution.value - dp) / scale);
    if (!close_rel(solution.value, dp)) {
      throw Failure("dp mismatch on instance " + std::to_string(t));
    }
    if (inst.x.size() + inst.y.size() <= 200) {
      const double balanced =
          oracle_extended_balanced(inst.x, inst.y, inst.lambda);
      if (!close_rel(solution.value, balanced)) {
        throw Failure("extended-balanced mismatch on instance " +
                      std::to_string(t));
      }
      ++extended_checked;
    }
  }
  return "200 instances to n,m = 500 (" + std::to_string(extended_checked) +
         " also against the assignment oracle), max rel gap " +
         fmt("%.1e", max_gap);
}

std::string criterion_optimality_conditions() {
  auto instances = small_instances(1000);
  const auto more = scale_instances(200);
  instances.insert(instances.end(), more.begin(), more.end());
  for (std::size_t t = 0; t < instances.size(); ++t) {
    const auto& inst = instances[t];
    SolverConfig config;
    config.lambda = inst.lambda;
    const auto solution = solve(inst.x, inst.y, config);
    const auto report =
        verify_optimality(inst.x, inst.y, solution, inst.lambda, CostSpec(),
                          1e-9);
    if (!report.all_pass()) {
      throw Failure("conditions failed on instance " + std::to_string(t) +
                    ": " + report.summary());
    }
  }
  return std::to_string(instances.size()) +
         " solves pass feasibility, support activity, thresholds, bounds, "
         "2-lambda truncation, co-monotonicity, strong duality at 1e-9";
}

std::string criterion_invariant_instrumentation() {
  const auto corpus = fuzz_corpus();
  for (std::size_t t = 0; t < corpus.size(); ++t) {
    const auto& inst = corpus[t];
    SolverConfig config;
    config.lambda = inst.lambda;
    config.debug_invariants = true;
    try {
      const auto solution = solve(inst.x, inst.y, config);
      if (inst.x.size() <= 12 && inst.y.size() <= 12) {
        const auto reference =
            oracle_enumerate(inst.x, inst.y, inst.lambda, inst.lambda);
        if (!close_rel(solution.value, reference.value)) {
          throw Failure("value mismatch on fuzz instance " +
                        std::to_string(t));
        }
      } else if (!close_rel(solution.value,
                            oracle_dp(inst.x, inst.y, inst.lambda))) {
        throw Failure("dp mismatch on fuzz instance " + std::to_string(t));
      }
    } catch (const std::logic_error& e) {
      throw Failure("invariant violated on fuzz instance " +
                    std::to_string(t) + ": " + e.what());
    }
  }
  return "invariants I-VIII held at every boundary on 100 duplicate-heavy "
         "instances";
}

std::string criterion_pot_mode() {
  Rng rng(424243);
  double max_gap = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int n = rng.uniform_int(301);
    const int m = n + rng.uniform_int(301 - std::min(n, 300));
    SolverConfig config;
    config.lambda = rng.uniform(0.0, 5.0);
    const auto x = t % 4 == 0 ? grid_samples(rng, n, 6)
                              : random_samples(rng, n, -10, 10);
    const auto y = t % 4 == 0 ? grid_samples(rng, m, 6)
                              : random_samples(rng, m, -10, 10);
    const auto solution = solve_pot(x, y, config);
    const double reference = oracle_dp_full(x, y, config.cost, config.lambda);
    const double scale =
        std::max({1.0, std::abs(solution.value), std::abs(reference)});
    max_gap = std::max(max_gap, std::abs(solution.value - reference) / scale);
    if (!close_rel(solution.value, reference)) {
      throw Failure("mismatch on instance " + std::to_string(t));
    }
    if (solution.plan.domain_size() != n) {
      throw Failure("source point left unmatched on instance " +
                    std::to_string(t));
    }
  }
  return "200 no-destruction instances to n <= m <= 300, max rel gap " +
         fmt("%.1e", max_gap);
}

std::string criterion_complexity() {
  // operation-count ceiling on the fuzz corpus
  for (const auto& inst : fuzz_corpus()) {
    SolverConfig config;
    config.lambda = inst.lambda;
    const auto solution = solve(inst.x, inst.y, config);
    const auto n = static_cast<std::int64_t>(inst.x.size());
    const auto m = static_cast<std::int64_t>(inst.y.size());
    if (solution.stats.chain_steps > 10 * n * std::max(n, m)) {
      throw Failure("chain steps " +
                    std::to_string(solution.stats.chain_steps) +
                    " exceed 10*n*max(n,m)");
    }
  }

  // wall-clock slope on the uniform family
  BenchConfig config;
  config.generator = BenchGenerator::kUniform;
  config.sizes = {500, 1000, 2000, 4000, 8000};
  config.lambdas = {20.0, 100.0};
  config.repeats = 10;
  config.m_offset = 1000;
  config.seed = 99;
  const auto records = run_bench(config);
  for (const auto& r : records) {
    if (r.status != "ok") throw Failure("bench run failed: " + r.status);
    if (!(r.seconds > 0.0) || !(r.value >= 0.0) || !std::isfinite(r.value)) {
      throw Failure("bench produced a non-positive time or bad value");
    }
  }
  const auto cells = median_times(records);
  std::string slopes;
  bool slope_ok = true;
  for (double lambda : config.lambdas) {
    std::vector<double> ns, ts;
    for (const auto& cell : cells) {
      if (cell.lambda == lambda) {
        ns.push_back(cell.n);
        ts.push_back(cell.median_seconds);
      }
    }
    const double slope = log_log_slope(ns, ts);
    slope_ok = slope_ok && slope <= 1.5;
    slopes += (slopes.empty() ? "" : ", ") + fmt("%.2f", slope) +
              " at lambda " + fmt("%g", lambda);
  }
  if (!slope_ok) {
    // Honest red: the conflict-chain resolution touches every chain member,
    // and on this family the source points outnumber the local targets once
    // n > 1000, so chains grow with n and the growth is quadratic. The
    // ceiling above holds; the 1.5-slope goal does not.
    throw Failure("chain-step ceiling holds, but log-log time slopes are " +
                  slopes + " (target <= 1.5): dense-source instances keep "
                  "the sweep in a jammed regime with Theta(n) chains");
  }
  return "chain steps within 10*n*max(n,m); log-log time slopes " + slopes;
}

std::string criterion_sliced_metric() {
  Rng rng(31415);
  auto random_cloud = [&](int dim, int count) {
    std::vector<double> data(static_cast<std::size_t>(dim) * count);
    for (double& v : data) v = rng.uniform(-3, 3);
    return PointCloud(dim, std::move(data));
  };

  // symmetry with shared directions, exact to 1e-12
  for (int t = 0; t < 30; ++t) {
    const int dim = t % 2 == 0 ? 2 : 3;
    const auto x = random_cloud(dim, 5 + rng.uniform_int(20));
    const auto y = random_cloud(dim, 5 + rng.uniform_int(20));
    const double lambda = rng.uniform(0.2, 4.0);
    const auto dirs = sample_directions(dim, 16, 1000 + t);
    const double xy = sopt_estimate(x, y, lambda, dirs).value;
    const double yx = sopt_estimate(y, x, lambda, dirs).value;
    if (std::abs(xy - yx) > 1e-12 * (1.0 + std::abs(xy))) {
      throw Failure("asymmetry " + fmt("%.1e", std::abs(xy - yx)));
    }
  }

  // identity of indiscernibles, exactly zero
  for (int t = 0; t < 30; ++t) {
    const auto x = random_cloud(3, 4 + rng.uniform_int(24));
    if (sopt_estimate(x, x, 1.0, 8, 77 + t).value != 0.0) {
      throw Failure("self-distance not exactly zero");
    }
  }

  // sample-level triangle inequality in the square-root metric
  double worst_slack = -1e300;
  for (int t = 0; t < 100; ++t) {
    const auto a = random_cloud(2, 20);
    const auto b = random_cloud(2, 20);
    const auto c = random_cloud(2, 20);
    const auto dirs = sample_directions(2, 12, 5000 + t);
    const double lambda = 1.0;
    const double ac = sopt_estimate(a, c, lambda, dirs).metric(2.0);
    const double ab = sopt_estimate(a, b, lambda, dirs).metric(2.0);
    const double bc = sopt_estimate(b, c, lambda, dirs).metric(2.0);
    worst_slack = std::max(worst_slack, ac - ab - bc);
    if (ac > ab + bc + 1e-9) {
      throw Failure("triangle violated by " + fmt("%.1e", ac - ab - bc));
    }
  }
  return "symmetry <= 1e-12, self-distance 0, triangle slack <= " +
         fmt("%.1e", std::max(worst_slack, 0.0)) + " over 100 triples";
}

std::string criterion_registration() {
  auto run_case = [](bool noisy, int seed) {
    Rng rng(mix_seed(noisy ? 2000 : 1000, seed));
    const int n_clean = 1500;
    const PointCloud clean(3, testutil::shape_cloud_data(rng, n_clean));

    // transform sampled from the experiment ranges: angles in [-pi/3, pi/3],
    // scale in [0, 2], translation in [-2 std, 2 std]
    const double ar = std::numbers::pi / 3.0;
    Transform truth;
    truth.rotation =
        (Eigen::AngleAxisd(rng.uniform(-ar, ar), Eigen::Vector3d::UnitZ()) *
         Eigen::AngleAxisd(rng.uniform(-ar, ar), Eigen::Vector3d::UnitY()) *
         Eigen::AngleAxisd(rng.uniform(-ar, ar), Eigen::Vector3d::UnitX()))
            .toRotationMatrix();
    truth.scale = rng.uniform(0.0, 2.0);
    double var = 0.0;
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (int i = 0; i < n_clean; ++i) {
      mean += Eigen::Vector3d(clean.point(i)[0], clean.point(i)[1],
                              clean.point(i)[2]);
    }
    mean /= n_clean;
    for (int i = 0; i < n_clean; ++i) {
      var += (Eigen::Vector3d(clean.point(i)[0], clean.point(i)[1],
                              clean.point(i)[2]) -
              mean)
                 .squaredNorm();
    }
    const double stddev = std::sqrt(var / n_clean);
    truth.translation =
        Eigen::Vector3d(rng.uniform(-2 * stddev, 2 * stddev),
                        rng.uniform(-2 * stddev, 2 * stddev),
                        rng.uniform(-2 * stddev, 2 * stddev));

    PointCloud source = clean;
    PointCloud target = truth.apply(clean);
    if (noisy) {
      auto append_noise = [&](PointCloud& cloud) {
        double radius = 0.0;
        for (int i = 0; i < cloud.size(); ++i) {
          double acc = 0.0;
          for (double v : cloud.point(i)) acc += v * v;
          radius = std::max(radius, std::sqrt(acc));
        }
        std::vector<double> data = cloud.data();
        for (int i = 0; i < n_clean / 20; ++i) {
          for (int ch = 0; ch < 3; ++ch) {
            data.push_back(rng.uniform(-radius, radius));
          }
        }
        cloud = PointCloud(3, std::move(data));
      };
      append_noise(source);
      append_noise(target);
    }

    RegistrationConfig config;
    config.clean_source_count = n_clean;
    config.iterations = 1500;
    config.seed = mix_seed(9090, seed);
    const auto result = register_clouds(source, target, config);
    return transform_error(result.transform, truth);
  };

  double clean_mean = 0.0, noisy_mean = 0.0;
  for (int seed = 1; seed <= 5; ++seed) clean_mean += run_case(false, seed);
  clean_mean /= 5;
  if (clean_mean > 1e-2) {
    throw Failure("clean mean error " + fmt("%.4f", clean_mean) +
                  " exceeds 1e-2");
  }
  for (int seed = 1; seed <= 5; ++seed) noisy_mean += run_case(true, seed);
  noisy_mean /= 5;
  if (noisy_mean > 0.1) {
    throw Failure("noisy mean error " + fmt("%.4f", noisy_mean) +
                  " exceeds 0.1");
  }
  return "clean mean error " + fmt("%.1e", clean_mean) +
         ", 5% noise mean error " + fmt("%.1e", noisy_mean) +
         " over 5 seeds at n = 1500";
}

std::string criterion_color_pipeline() {
  Rng rng(6464);
  Image img;
  img.width = 32;
  img.height = 32;
  img.pixels.resize(static_cast<std::size_t>(32) * 32 * 3);
  for (double& v : img.pixels) v = rng.uniform_int(256) / 255.0;

  const auto dir = std::filesystem::temp_directory_path() / "sopt_acceptance";
  std::filesystem::create_directories(dir);
  const auto src_path = dir / "identity_src.ppm";
  io::write_ppm(src_path, img);
  const Image src = io::read_ppm(src_path);

  const auto src_palette = kmeans_palette(src, 24, 11, 20);
  const auto tgt_palette = kmeans_palette(src, 24, 11, 20);
  const auto moved = transfer_palette(src_palette, tgt_palette, 10.0, 48, 19);
  const Image out = reconstruct(src, src_palette, moved.centroids);

  double max_delta = 0.0;
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    max_delta = std::max(max_delta, std::abs(out.pixels[i] - src.pixels[i]));
  }
  if (max_delta > 2.0 / 255.0) {
    throw Failure("per-channel deviation " + fmt("%.4f", max_delta) +
                  " exceeds 2/255");
  }
  const auto out_path = dir / "identity_out.ppm";
  io::write_ppm(out_path, out);
  const Image reread = io::read_ppm(out_path);
  validate_image(reread);  // all channels within [0,1]
  if (reread.width != out.width || reread.height != out.height) {
    throw Failure("output image dimensions corrupted by the round trip");
  }
  return "identity transfer off by at most " + fmt("%.5f", max_delta) +
         " (< 2/255) and the output is a valid 8-bit PPM";
}

std::string criterion_lambda_monotonicity() {
  Rng rng(8899);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + rng.uniform_int(60);
    const int m = 1 + rng.uniform_int(60);
    const auto x = t % 3 == 0 ? grid_samples(rng, n, 5)
                              : random_samples(rng, n, -6, 6);
    const auto y = t % 3 == 0 ? grid_samples(rng, m, 5)
                              : random_samples(rng, m, -6, 6);
    double previous = -1.0;
    for (double lambda : {0.5, 1.0, 2.0, 4.0, 8.0}) {
      SolverConfig config;
      config.lambda = lambda;
      const double value = solve(x, y, config).value;
      if (value < previous - 1e-12 * (1.0 + std::abs(value))) {
        throw Failure("value decreased in lambda on instance " +
                      std::to_string(t));
      }
      if (value > lambda * (n + m) + 1e-9) {
        throw Failure("value exceeds lambda*(n+m) on instance " +
                      std::to_string(t));
      }
      previous = value;
    }
  }
  return "100 instances: value non-decreasing over the lambda grid and "
         "bounded by lambda*(n+m)";
}

struct Criterion {
  int id;
  const char* title;
  double time_limit_seconds;
  std::function<std::string()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "solver equals the enumeration oracle", 60.0,
       criterion_oracle_equivalence},
      {2, "solver equals the dp and assignment oracles at scale", 120.0,
       criterion_scale_equivalence},
      {3, "primal-dual optimality conditions hold on every solve", 180.0,
       criterion_optimality_conditions},
      {4, "solver invariants hold under instrumentation", 120.0,
       criterion_invariant_instrumentation},
      {5, "no-destruction mode equals the full-assignment dp", 120.0,
       criterion_pot_mode},
      {6, "operation counts and wall-clock growth stay sub-quadratic", 300.0,
       criterion_complexity},
      {7, "sliced estimate behaves as a metric on shared slices", 120.0,
       criterion_sliced_metric},
      {8, "registration recovers clean and noisy transforms", 300.0,
       criterion_registration},
      {9, "color pipeline is idempotent on identical images", 120.0,
       criterion_color_pipeline},
      {10, "optimal value is monotone in lambda", 120.0,
       criterion_lambda_monotonicity},
  };
  return all;
}

bool run_criterion(const Criterion& criterion) {
  const auto start = std::chrono::steady_clock::now();
  std::string detail;
  bool pass = true;
  try {
    detail = criterion.run();
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (pass && elapsed > criterion.time_limit_seconds) {
    pass = false;
    detail += " BUT exceeded the " +
              fmt("%.0f", criterion.time_limit_seconds) + "s budget";
  }
  std::printf("%s criterion %d: %s (%s) [%.1fs]\n", pass ? "PASS" : "FAIL",
              criterion.id, criterion.title, detail.c_str(), elapsed);
  std::fflush(stdout);
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  int selected = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      selected = std::atoi(argv[i + 1]);
      ++i;
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  bool all_pass = true;
  bool any_run = false;
  for (const auto& criterion : criteria()) {
    if (selected != 0 && criterion.id != selected) continue;
    any_run = true;
    all_pass = run_criterion(criterion) && all_pass;
  }
  if (!any_run) {
    std::fprintf(stderr, "no criterion %d\n", selected);
    return 2;
  }
  return all_pass ? 0 : 1;
}
