#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sopt/bench.hpp"
#include "sopt/color.hpp"
#include "sopt/io.hpp"
#include "sopt/registration.hpp"
#include "sopt/sliced.hpp"
#include "sopt/solver.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitInputError = 2;

struct Opt1dArgs {
  std::string file_x, file_y;
  double lambda = 1.0;
  double exponent = 2.0;
  double tolerance = 1e-12;
  bool verify = false;
  bool pot = false;
  bool debug_invariants = false;
};

int run_opt1d(const Opt1dArgs& args) {
  const auto raw_x = sopt::io::read_point_list(args.file_x);
  const auto raw_y = sopt::io::read_point_list(args.file_y);
  const auto sorted_x = sopt::sort_with_permutation(raw_x);
  const auto sorted_y = sopt::sort_with_permutation(raw_y);

  sopt::SolverConfig config;
  config.lambda = args.lambda;
  config.cost = sopt::CostSpec(args.exponent);
  config.tolerance = args.tolerance;
  config.debug_invariants = args.debug_invariants;
  const sopt::Solution solution =
      args.pot ? sopt::solve_pot(sorted_x.sorted, sorted_y.sorted, config)
               : sopt::solve(sorted_x.sorted, sorted_y.sorted, config);

  // report in the files' original line order
  json matches = json::array();
  json destroyed = json::array();
  for (std::size_t r = 0; r < solution.plan.assignment.size(); ++r) {
    const int q = solution.plan.assignment[r];
    if (q == sopt::kUnassigned) {
      destroyed.push_back(sorted_x.order[r]);
    } else {
      matches.push_back({sorted_x.order[r], sorted_y.order[q]});
    }
  }
  std::vector<double> phi(raw_x.size()), psi(raw_y.size());
  for (std::size_t r = 0; r < raw_x.size(); ++r) {
    phi[static_cast<std::size_t>(sorted_x.order[r])] = solution.duals.phi[r];
  }
  for (std::size_t q = 0; q < raw_y.size(); ++q) {
    psi[static_cast<std::size_t>(sorted_y.order[q])] = solution.duals.psi[q];
  }

  json out;
  out["value"] = solution.value;
  out["matches"] = matches;
  out["destroyed"] = destroyed;
  out["phi"] = phi;
  out["psi"] = psi;
  out["stats"] = {{"main_iterations", solution.stats.main_iterations},
                  {"chain_steps", solution.stats.chain_steps}};

  if (args.verify && !args.pot) {
    const auto report = sopt::verify_optimality(
        sorted_x.sorted, sorted_y.sorted, solution, args.lambda, config.cost);
    out["verified"] = report.all_pass();
    std::cout << out.dump(2) << '\n';
    if (!report.all_pass()) {
      std::cerr << report.summary();
      return kExitVerifyFailed;
    }
    return kExitOk;
  }
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

struct SoptArgs {
  std::string file_x, file_y;
  int dim = 1;
  double lambda = 1.0;
  int directions = 64;
  std::uint64_t seed = 0;
  double exponent = 2.0;
  std::string per_slice_csv;
};

int run_sopt(const SoptArgs& args) {
  const auto x = sopt::io::read_point_cloud(args.file_x, args.dim);
  const auto y = sopt::io::read_point_cloud(args.file_y, args.dim);
  const auto estimate =
      sopt::sopt_estimate(x, y, args.lambda, args.directions, args.seed,
                          sopt::CostSpec(args.exponent));
  json out;
  out["value"] = estimate.value;
  out["metric"] = estimate.metric(args.exponent);
  out["directions"] = args.directions;
  out["per_slice"] = estimate.per_slice;
  std::cout << out.dump(2) << '\n';
  if (!args.per_slice_csv.empty()) {
    std::ofstream csv(args.per_slice_csv);
    if (!csv) {
      throw sopt::ValidationError("cannot write " + args.per_slice_csv);
    }
    csv.precision(17);
    csv << "slice,value\n";
    for (std::size_t l = 0; l < estimate.per_slice.size(); ++l) {
      csv << l << ',' << estimate.per_slice[l] << '\n';
    }
  }
  return kExitOk;
}

struct BenchArgs {
  std::string generator = "uniform";
  std::vector<int> sizes;
  std::vector<double> lambdas;
  int repeats = 10;
  int m_offset = 1000;
  std::uint64_t seed = 0;
  double exponent = 2.0;
  std::string out_path;
};

int run_bench(const BenchArgs& args) {
  sopt::BenchConfig config;
  config.generator = sopt::parse_bench_generator(args.generator);
  config.sizes = args.sizes;
  config.lambdas = args.lambdas;
  config.repeats = args.repeats;
  config.m_offset = args.m_offset;
  config.seed = args.seed;
  config.cost = sopt::CostSpec(args.exponent);
  const auto records = sopt::run_bench(config);
  if (args.out_path.empty()) {
    sopt::write_bench_csv(std::cout, records);
  } else {
    std::ofstream out(args.out_path);
    if (!out) throw sopt::ValidationError("cannot write " + args.out_path);
    sopt::write_bench_csv(out, records);
  }
  return kExitOk;
}

struct RegisterArgs {
  std::string file_x, file_y;
  int n0 = 0;
  int iterations = 0;
  std::uint64_t seed = 0;
  double lambda0 = 0.0;
  double decrease = 0.98;
  double increase = 1.02;
  std::string trace_csv;
  std::string truth_path;
};

sopt::Transform transform_from_json(const json& j) {
  sopt::Transform t;
  const auto r = j.at("rotation").get<std::vector<double>>();
  const auto beta = j.at("translation").get<std::vector<double>>();
  const int d = static_cast<int>(beta.size());
  if (r.size() != static_cast<std::size_t>(d) * d) {
    throw sopt::ValidationError("truth rotation length must be dim*dim");
  }
  t.rotation.resize(d, d);
  for (int row = 0; row < d; ++row) {
    for (int col = 0; col < d; ++col) {
      t.rotation(row, col) = r[static_cast<std::size_t>(row) * d + col];
    }
  }
  t.scale = j.at("scale").get<double>();
  t.translation.resize(d);
  for (int row = 0; row < d; ++row) t.translation(row) = beta[row];
  return t;
}

json transform_to_json(const sopt::Transform& t) {
  std::vector<double> r;
  r.reserve(static_cast<std::size_t>(t.dim()) * t.dim());
  for (int row = 0; row < t.dim(); ++row) {
    for (int col = 0; col < t.dim(); ++col) r.push_back(t.rotation(row, col));
  }
  std::vector<double> beta(t.translation.data(),
                           t.translation.data() + t.dim());
  return {{"rotation", r}, {"scale", t.scale}, {"translation", beta}};
}

int run_register(const RegisterArgs& args) {
  const auto x = sopt::io::read_point_cloud(args.file_x, 3);
  const auto y = sopt::io::read_point_cloud(args.file_y, 3);
  sopt::RegistrationConfig config;
  config.clean_source_count = args.n0;
  config.iterations = args.iterations;
  config.seed = args.seed;
  config.initial_lambda = args.lambda0;
  config.lambda_decrease = args.decrease;
  config.lambda_increase = args.increase;
  const auto result = sopt::register_clouds(x, y, config);

  json out = transform_to_json(result.transform);
  json trace = json::array();
  for (std::size_t l = 0; l < result.trace.size(); ++l) {
    const auto& rec = result.trace[l];
    trace.push_back({{"iteration", l},
                     {"lambda", rec.lambda},
                     {"matched", rec.matched},
                     {"fit_skipped", rec.fit_skipped}});
  }
  out["trace"] = trace;
  if (!args.truth_path.empty()) {
    std::ifstream truth_in(args.truth_path);
    if (!truth_in) {
      throw sopt::ValidationError("cannot open " + args.truth_path);
    }
    json truth_json;
    truth_in >> truth_json;
    out["error"] = sopt::transform_error(result.transform,
                                         transform_from_json(truth_json));
  } else {
    out["error"] = nullptr;
  }
  std::cout << out.dump(2) << '\n';

  if (!args.trace_csv.empty()) {
    std::ofstream csv(args.trace_csv);
    if (!csv) throw sopt::ValidationError("cannot write " + args.trace_csv);
    csv.precision(17);
    csv << "iteration,lambda,matched,fit_skipped\n";
    for (std::size_t l = 0; l < result.trace.size(); ++l) {
      const auto& rec = result.trace[l];
      csv << l << ',' << rec.lambda << ',' << rec.matched << ','
          << (rec.fit_skipped ? 1 : 0) << '\n';
    }
  }
  return kExitOk;
}

struct ColorArgs {
  std::string file_src, file_tgt, out_path;
  double lambda = 10.0;
  int k = 500;
  int slices = 400;
  int kmeans_iters = 25;
  std::uint64_t seed = 0;
};

int run_color(const ColorArgs& args) {
  const auto src = sopt::io::read_ppm(args.file_src);
  const auto tgt = sopt::io::read_ppm(args.file_tgt);
  // one pipeline seed; identical inputs then yield identical palettes
  const auto src_palette =
      sopt::kmeans_palette(src, args.k, args.seed, args.kmeans_iters);
  const auto tgt_palette =
      sopt::kmeans_palette(tgt, args.k, args.seed, args.kmeans_iters);
  const auto moved =
      sopt::transfer_palette(src_palette, tgt_palette, args.lambda,
                             args.slices, sopt::mix_seed(args.seed, 0xC0102));
  const auto out_img = sopt::reconstruct(src, src_palette, moved.centroids);
  sopt::io::write_ppm(args.out_path, out_img);

  int min_matched = args.k;
  for (int count : moved.per_slice_matched) {
    min_matched = std::min(min_matched, count);
  }
  json summary;
  summary["output"] = args.out_path;
  summary["palette_size"] = args.k;
  summary["slices"] = args.slices;
  summary["min_matched_per_slice"] = min_matched;
  std::cout << summary.dump(2) << '\n';
  return kExitOk;
}

struct GenArgs {
  std::string generator = "uniform";
  int n = 0, m = 0;
  std::uint64_t seed = 0;
  std::vector<double> x_range{-20.0, 20.0};
  std::vector<double> y_range{-40.0, 40.0};
  std::string out_x, out_y;
  bool csv = false;
};

int run_gen(const GenArgs& args) {
  sopt::SortedSamples xs, ys;
  if (sopt::parse_bench_generator(args.generator) ==
      sopt::BenchGenerator::kUniform) {
    auto pair = sopt::gen_uniform(args.n, args.m, args.x_range[0],
                                  args.x_range[1], args.y_range[0],
                                  args.y_range[1], args.seed);
    xs = std::move(pair.x);
    ys = std::move(pair.y);
  } else {
    auto pair = sopt::gen_gaussian_mixture(args.n, args.m, args.seed);
    xs = std::move(pair.x);
    ys = std::move(pair.y);
  }
  if (args.csv) {
    sopt::io::write_points_csv(args.out_x, xs.values());
    sopt::io::write_points_csv(args.out_y, ys.values());
  } else {
    sopt::io::write_point_list(args.out_x, xs.values());
    sopt::io::write_point_list(args.out_y, ys.values());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1-D optimal partial transport, sliced distances, and their "
               "applications"};
  app.require_subcommand(1);

  Opt1dArgs opt1d;
  auto* cmd_opt1d = app.add_subcommand(
      "opt1d",
      "solve the 1-D partial transport problem between two point list files");
  cmd_opt1d->add_option("file_x", opt1d.file_x, "source points, one per line")
      ->required();
  cmd_opt1d->add_option("file_y", opt1d.file_y, "target points, one per line")
      ->required();
  cmd_opt1d
      ->add_option("--lambda", opt1d.lambda, "destruction/creation penalty")
      ->required();
  cmd_opt1d->add_option("--p", opt1d.exponent, "cost exponent (> 1)");
  cmd_opt1d->add_option("--tolerance", opt1d.tolerance,
                        "solver comparison tolerance");
  cmd_opt1d->add_flag(
      "--verify", opt1d.verify,
      "audit the optimality conditions; nonzero exit on violation");
  cmd_opt1d->add_flag("--pot", opt1d.pot,
                      "no-destruction mode: every source point transported");
  cmd_opt1d->add_flag("--debug-invariants", opt1d.debug_invariants,
                      "check solver invariants every iteration (slow)");

  SoptArgs sopt_args;
  auto* cmd_sopt = app.add_subcommand(
      "sopt", "Monte-Carlo sliced partial transport between point clouds");
  cmd_sopt->add_option("file_x", sopt_args.file_x, "source cloud")->required();
  cmd_sopt->add_option("file_y", sopt_args.file_y, "target cloud")->required();
  cmd_sopt->add_option("--dim", sopt_args.dim, "point dimension")->required();
  cmd_sopt->add_option("--lambda", sopt_args.lambda, "penalty")->required();
  cmd_sopt->add_option("--directions", sopt_args.directions,
                       "number of random projections");
  cmd_sopt->add_option("--seed", sopt_args.seed, "projection seed")
      ->required();
  cmd_sopt->add_option("--p", sopt_args.exponent, "cost exponent (> 1)");
  cmd_sopt->add_option("--per-slice-csv", sopt_args.per_slice_csv,
                       "write per-slice values to this CSV file");

  BenchArgs bench;
  auto* cmd_bench = app.add_subcommand(
      "bench", "wall-clock sweep over instance sizes, CSV output");
  cmd_bench->add_option("--generator", bench.generator,
                        "uniform or gaussian-mixture");
  cmd_bench->add_option("--sizes", bench.sizes, "source sizes n")
      ->required()
      ->delimiter(',');
  cmd_bench->add_option("--lambdas", bench.lambdas, "penalty values")
      ->required()
      ->delimiter(',');
  cmd_bench->add_option("--repeats", bench.repeats, "repeats per cell");
  cmd_bench->add_option("--m-offset", bench.m_offset, "m = n + offset");
  cmd_bench->add_option("--seed", bench.seed, "sweep seed")->required();
  cmd_bench->add_option("--p", bench.exponent, "cost exponent (> 1)");
  cmd_bench->add_option("--out", bench.out_path, "CSV path (default stdout)");

  RegisterArgs reg;
  auto* cmd_register = app.add_subcommand(
      "register", "rigid+scale registration of two XYZ point clouds");
  cmd_register->add_option("file_x", reg.file_x, "source cloud")->required();
  cmd_register->add_option("file_y", reg.file_y, "target cloud")->required();
  cmd_register->add_option("--n0", reg.n0, "number of clean source points")
      ->required();
  cmd_register
      ->add_option("--iterations", reg.iterations, "projections / iterations")
      ->required();
  cmd_register->add_option("--seed", reg.seed, "projection seed")->required();
  cmd_register->add_option(
      "--lambda0", reg.lambda0,
      "initial penalty (default: squared bbox diagonal of the target)");
  cmd_register->add_option("--decrease", reg.decrease,
                           "lambda factor when too many points match");
  cmd_register->add_option("--increase", reg.increase,
                           "lambda factor when too few points match");
  cmd_register->add_option("--trace-csv", reg.trace_csv,
                           "write the per-iteration trace to this CSV file");
  cmd_register->add_option("--truth", reg.truth_path,
                           "JSON transform to score against");

  ColorArgs color;
  auto* cmd_color = app.add_subcommand(
      "color", "transfer a PPM image's palette onto another image's palette");
  cmd_color->add_option("source", color.file_src, "source PPM")->required();
  cmd_color->add_option("target", color.file_tgt, "target PPM")->required();
  cmd_color->add_option("--lambda", color.lambda, "penalty");
  cmd_color->add_option("--k", color.k, "palette size");
  cmd_color->add_option("--slices", color.slices, "transport iterations");
  cmd_color->add_option("--kmeans-iters", color.kmeans_iters,
                        "Lloyd iterations");
  cmd_color->add_option("--seed", color.seed, "pipeline seed")->required();
  cmd_color->add_option("-o,--out", color.out_path, "output PPM")->required();

  GenArgs gen;
  auto* cmd_gen = app.add_subcommand(
      "gen", "generate synthetic 1-D instances as point list files");
  cmd_gen->add_option("--generator", gen.generator,
                      "uniform or gaussian-mixture");
  cmd_gen->add_option("--n", gen.n, "source size")->required();
  cmd_gen->add_option("--m", gen.m, "target size")->required();
  cmd_gen->add_option("--seed", gen.seed, "draw seed")->required();
  cmd_gen->add_option("--x-range", gen.x_range, "uniform source range")
      ->expected(2);
  cmd_gen->add_option("--y-range", gen.y_range, "uniform target range")
      ->expected(2);
  cmd_gen->add_option("--out-x", gen.out_x, "source output path")->required();
  cmd_gen->add_option("--out-y", gen.out_y, "target output path")->required();
  cmd_gen->add_flag("--csv", gen.csv, "write (index, value) CSV instead");

  try {
    app.parse(argc, argv);
    if (cmd_opt1d->parsed()) return run_opt1d(opt1d);
    if (cmd_sopt->parsed()) return run_sopt(sopt_args);
    if (cmd_bench->parsed()) return run_bench(bench);
    if (cmd_register->parsed()) return run_register(reg);
    if (cmd_color->parsed()) return run_color(color);
    if (cmd_gen->parsed()) return run_gen(gen);
    return kExitInputError;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}
