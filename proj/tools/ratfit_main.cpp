#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ratfit/errors.hpp"
#include "ratfit/io.hpp"
#include "ratfit/multiindex.hpp"
#include "ratfit/problems.hpp"
#include "ratfit/rational.hpp"
#include "ratfit/refine.hpp"
#include "ratfit/skiter.hpp"

namespace {

using namespace ratfit;

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw ParseError("degree list \"" + text + "\"",
                       "cannot parse \"" + cell + "\"");
    }
  }
  return out;
}

struct DegreeArgs {
  std::vector<int> total;        // [m, n] when given
  std::vector<std::string> max;  // ["m1,..,md", "n1,..,nd"] when given
};

std::pair<MultiIndexSet, MultiIndexSet> make_index_sets(const DegreeArgs& spec,
                                                        int dim) {
  if (!spec.total.empty()) {
    return {total_degree_indices(dim, spec.total[0]),
            total_degree_indices(dim, spec.total[1])};
  }
  std::vector<int> m = parse_int_list(spec.max[0]);
  std::vector<int> n = parse_int_list(spec.max[1]);
  if (static_cast<int>(m.size()) != dim || static_cast<int>(n.size()) != dim)
    throw ParseError("degrees", "expected " + std::to_string(dim) +
                                    " entries per list for this data");
  return {max_degree_indices(m), max_degree_indices(n)};
}

FitHistory single_solve_history(const RationalFit& fit,
                                const SolveDiagnostics& diag) {
  FitHistory history;
  IterationRecord rec;
  rec.iteration = 1;
  rec.residual_norm = fit.meta.residual_norm;
  rec.cond = diag.cond;
  rec.a = fit.a;
  rec.b = fit.b;
  history.records.push_back(std::move(rec));
  history.best_iteration = 1;
  history.termination = "direct";
  return history;
}

struct FitArgs {
  std::string input, output, history_path;
  std::string solver = "ssk";
  DegreeArgs degrees;
  int maxiter = 20;
  double tol = 1e-12;
  bool rescale = false;
};

int run_fit(const FitArgs& args) {
  PointSet points = read_points_csv_file(args.input);
  points.validate();
  if (!points.has_responses())
    throw ParseError(args.input, "input has no response column");

  std::optional<DomainMap> map;
  PointSet train = points;
  if (args.rescale) {
    map = DomainMap::from_points(points.X);
    train.X = map->apply(points.X);
  }
  auto [num_idx, den_idx] = make_index_sets(args.degrees, train.dim());

  SolverOptions options;
  options.maxiter = args.maxiter;
  options.convergence_tol = args.tol;

  std::optional<RationalFit> fit;
  FitHistory history;
  if (args.solver == "linearized") {
    SolveDiagnostics diag;
    fit = fit_linearized(train, num_idx, den_idx, &diag);
    history = single_solve_history(*fit, diag);
  } else if (args.solver == "sk") {
    auto [f, h] = fit_sk(train, num_idx, den_idx, options);
    fit = std::move(f);
    history = std::move(h);
  } else {
    auto [f, h] = fit_stabilized_sk(train, num_idx, den_idx, options);
    fit = std::move(f);
    history = std::move(h);
  }

  if (args.solver == "ssk+refine") {
    auto [refined, report] = refine_lsq(*fit, train);
    fit = std::move(refined);
    std::cout << "refinement: " << report.termination << " after "
              << report.iterations << " iterations\n";
  }
  fit->domain_map = map;

  std::ofstream out(args.output);
  if (!out) throw ParseError(args.output, "cannot open file for writing");
  out << save(*fit).dump(2) << '\n';

  if (!args.history_path.empty()) {
    std::ofstream hist_out(args.history_path);
    if (!hist_out)
      throw ParseError(args.history_path, "cannot open file for writing");
    history.write_csv(hist_out);
  }

  const double ynorm = points.y.norm();
  std::cout << "solver=" << args.solver
            << " residual_norm=" << format_float(fit->meta.residual_norm)
            << " relative="
            << format_float(ynorm > 0 ? fit->meta.residual_norm / ynorm : 0.0)
            << " best_iteration=" << fit->meta.iteration
            << " termination=" << history.termination << '\n';
  return history.termination == "breakdown" ? 2 : 0;
}

struct EvalArgs {
  std::string fit_path, grid, input, output;
};

int run_eval(const EvalArgs& args) {
  nlohmann::json doc;
  {
    std::ifstream in(args.fit_path);
    if (!in) throw ParseError(args.fit_path, "cannot open file");
    try {
      in >> doc;
    } catch (const nlohmann::json::parse_error& err) {
      throw ParseError(args.fit_path, err.what());
    }
  }
  const RationalFit fit = load(doc);
  const int dim = fit.num_indices.dim();

  PointSet pts;
  if (!args.grid.empty()) {
    pts.X = tensor_grid(parse_grid_spec(args.grid));
  } else if (!args.input.empty()) {
    pts = read_points_csv_file(args.input);
  } else {
    throw ParseError("eval", "need --grid or --input");
  }
  if (pts.dim() != dim)
    throw ParseError("eval", "point dimension " + std::to_string(pts.dim()) +
                                 " does not match fit dimension " +
                                 std::to_string(dim));

  EvalInfo info;
  const Eigen::VectorXcd r = evaluate(fit, pts.X, &info);
  const Eigen::VectorXcd den = denominator_values(fit, pts.X);

  std::ofstream out(args.output);
  if (!out) throw ParseError(args.output, "cannot open file for writing");
  const bool complex_points =
      pts.X.imag().cwiseAbs().maxCoeff() != 0.0;
  for (int j = 1; j <= dim; ++j) {
    if (j > 1) out << ',';
    if (complex_points)
      out << 'x' << j << "_re,x" << j << "_im";
    else
      out << 'x' << j;
  }
  out << ",r_re,r_im,den_re,den_im";
  if (pts.has_responses()) out << ",abs_error";
  out << '\n';
  for (Eigen::Index i = 0; i < pts.count(); ++i) {
    for (int j = 0; j < dim; ++j) {
      if (j > 0) out << ',';
      out << format_float(pts.X(i, j).real());
      if (complex_points) out << ',' << format_float(pts.X(i, j).imag());
    }
    out << ',' << format_float(r(i).real()) << ',' << format_float(r(i).imag())
        << ',' << format_float(den(i).real()) << ','
        << format_float(den(i).imag());
    if (pts.has_responses())
      out << ',' << format_float(std::abs(pts.y(i) - r(i)));
    out << '\n';
  }

  std::cout << "evaluated " << pts.count() << " points, " << info.pole_hits.size()
            << " pole hits\n";
  if (pts.has_responses()) {
    std::size_t excluded = 0;
    const double res = residual_norm(fit, pts, &excluded);
    const double ynorm = pts.y.norm();
    std::cout << "residual_norm=" << format_float(res) << " relative="
              << format_float(ynorm > 0 ? res / ynorm : 0.0) << '\n';
  }
  return 0;
}

struct BenchmarkArgs {
  std::string suite, output = "benchmark.csv";
  bool full = false;
  int maxiter = 20;
};

struct BenchmarkCase {
  std::string degree_label;
  MultiIndexSet num_indices;
  MultiIndexSet den_indices;
};

int run_benchmark(const BenchmarkArgs& args) {
  PointSet points;
  std::vector<BenchmarkCase> cases;
  auto total_case = [&](int m, int n, int dim) {
    cases.push_back({"total:" + std::to_string(m) + "/" + std::to_string(n),
                     total_degree_indices(dim, m),
                     total_degree_indices(dim, n)});
  };
  auto max_case = [&](const std::vector<int>& m, const std::vector<int>& n) {
    std::string label = "max:";
    for (std::size_t i = 0; i < m.size(); ++i)
      label += (i ? "," : "") + std::to_string(m[i]);
    label += "/";
    for (std::size_t i = 0; i < n.size(); ++i)
      label += (i ? "," : "") + std::to_string(n[i]);
    cases.push_back({label, max_degree_indices(m), max_degree_indices(n)});
  };

  if (args.suite == "abs") {
    points = gen_abs(args.full ? 200000 : 20000);
    for (int m : {2, 3, 4, 5, 6, 7, 8, 9, 10}) total_case(m, m, 1);
  } else if (args.suite == "exp") {
    points = gen_exp(2000);
    for (int m : {2, 4, 6, 8, 10}) total_case(m, m, 1);
  } else if (args.suite == "tan") {
    points = gen_tan(1000);
    for (int m : {4, 8, 12, 16, 20}) total_case(m, m, 1);
  } else if (args.suite == "exp2d") {
    points = gen_exp2d(1000, 20240817);
    for (int m : {4, 8, 12, 16, 20}) total_case(m, m, 2);
  } else if (args.suite == "penzl1") {
    points = gen_penzl1(100, 30);
    for (int m : {2, 4, 6, 8}) max_case({m, m}, {m, m});
  } else if (args.suite == "penzl2") {
    points = gen_penzl2(100, 10, 10);
    max_case({4, 2, 2}, {4, 2, 2});
    max_case({8, 4, 4}, {8, 4, 4});
  } else {
    throw ParseError("benchmark", "unknown suite \"" + args.suite + "\"");
  }

  const double ynorm = points.y.norm();
  std::ofstream out(args.output);
  if (!out) throw ParseError(args.output, "cannot open file for writing");
  out << "suite,solver,degrees,num_basis,den_basis,residual_norm,"
         "relative_residual,best_iteration,seconds\n";
  std::cout << std::left << std::setw(14) << "solver" << std::setw(16)
            << "degrees" << std::setw(14) << "relative" << std::setw(8)
            << "iter" << "seconds\n";

  SolverOptions options;
  options.maxiter = args.maxiter;
  for (const BenchmarkCase& bc : cases) {
    for (const std::string& solver :
         {std::string("linearized"), std::string("sk"), std::string("ssk"),
          std::string("ssk+refine")}) {
      const auto start = std::chrono::steady_clock::now();
      double residual = std::numeric_limits<double>::quiet_NaN();
      int best_iteration = 0;
      std::string note;
      try {
        if (solver == "linearized") {
          RationalFit fit =
              fit_linearized(points, bc.num_indices, bc.den_indices);
          residual = fit.meta.residual_norm;
          best_iteration = 1;
        } else if (solver == "sk") {
          auto [fit, history] =
              fit_sk(points, bc.num_indices, bc.den_indices, options);
          residual = fit.meta.residual_norm;
          best_iteration = history.best_iteration;
        } else {
          auto [fit, history] =
              fit_stabilized_sk(points, bc.num_indices, bc.den_indices, options);
          residual = fit.meta.residual_norm;
          best_iteration = history.best_iteration;
          if (solver == "ssk+refine") {
            auto [refined, report] = refine_lsq(fit, points);
            residual = refined.meta.residual_norm;
          }
        }
      } catch (const BreakdownError& err) {
        note = err.what();
      }
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        start)
              .count();
      const double relative = ynorm > 0 ? residual / ynorm : residual;
      out << args.suite << ',' << solver << ',' << bc.degree_label << ','
          << bc.num_indices.size() << ',' << bc.den_indices.size() << ','
          << format_float(residual) << ',' << format_float(relative) << ','
          << best_iteration << ',' << format_float(seconds) << '\n';
      std::cout << std::left << std::setw(14) << solver << std::setw(16)
                << bc.degree_label << std::setw(14)
                << (note.empty() ? format_float(relative).substr(0, 12) : note)
                << std::setw(8) << best_iteration << std::fixed
                << std::setprecision(2) << seconds << std::defaultfloat
                << '\n';
    }
  }
  std::cout << "wrote " << args.output << '\n';
  return 0;
}

struct GenArgs {
  std::string problem, output;
  Eigen::Index count = 1000;
  std::uint64_t seed = 1;
  Eigen::Index freq_count = 100, t_count = 30, u_count = 10;
};

int run_gen(const GenArgs& args) {
  PointSet points;
  std::vector<std::string> comments;
  if (args.problem == "abs") {
    points = gen_abs(args.count);
    comments = {"generator: abs(count=" + std::to_string(args.count) + ")"};
  } else if (args.problem == "exp") {
    points = gen_exp(args.count);
    comments = {"generator: exp(count=" + std::to_string(args.count) + ")"};
  } else if (args.problem == "tan") {
    points = gen_tan(args.count);
    comments = {"generator: tan(count=" + std::to_string(args.count) + ")"};
  } else if (args.problem == "exp2d") {
    points = gen_exp2d(args.count, args.seed);
    comments = {"generator: exp2d(count=" + std::to_string(args.count) +
                ", seed=" + std::to_string(args.seed) + ", rng=splitmix64)"};
  } else if (args.problem == "penzl1") {
    points = gen_penzl1(args.freq_count, args.t_count);
    comments = {"generator: penzl1(freq_count=" +
                std::to_string(args.freq_count) +
                ", t_count=" + std::to_string(args.t_count) + ")",
                "coordinates: (omega, t), responses H(i*omega, t)"};
  } else if (args.problem == "penzl2") {
    points = gen_penzl2(args.freq_count, args.t_count, args.u_count);
    comments = {"generator: penzl2(freq_count=" +
                std::to_string(args.freq_count) +
                ", t_count=" + std::to_string(args.t_count) +
                ", u_count=" + std::to_string(args.u_count) + ")",
                "coordinates: (omega, t, u), responses H(i*omega, t, u)"};
  } else {
    throw ParseError("gen", "unknown problem \"" + args.problem + "\"");
  }
  write_points_csv_file(args.output, points, comments);
  std::cout << "wrote " << points.count() << " points to " << args.output
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Rational approximation on scattered data via the stabilized "
      "Sanathanan-Koerner iteration"};
  app.require_subcommand(1);

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand("fit", "Fit a rational function to CSV data");
  fit->add_option("--input", fit_args.input, "Input CSV")->required();
  fit->add_option("--output", fit_args.output, "Output fit JSON")->required();
  fit->add_option("--history", fit_args.history_path,
                  "Iteration history CSV path");
  fit->add_option("--solver", fit_args.solver, "Solver")
      ->check(CLI::IsMember({"linearized", "sk", "ssk", "ssk+refine"}));
  CLI::Option* total = fit->add_option("--degree-total", fit_args.degrees.total,
                                       "Total degrees: num den")
                           ->expected(2);
  fit->add_option("--degree-max", fit_args.degrees.max,
                  "Max degrees: m1,..,md n1,..,nd")
      ->expected(2)
      ->excludes(total);
  fit->add_option("--maxiter", fit_args.maxiter, "Iteration cap");
  fit->add_option("--tol", fit_args.tol, "Convergence tolerance on step norm");
  fit->add_flag("--rescale", fit_args.rescale,
                "Map coordinates into [-1,1]^d before fitting");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a saved fit");
  eval->add_option("--fit", eval_args.fit_path, "Fit JSON")->required();
  eval->add_option("--grid", eval_args.grid, "Tensor grid lo:hi:n[,lo:hi:n]...");
  eval->add_option("--input", eval_args.input, "Points CSV");
  eval->add_option("--output", eval_args.output, "Output CSV")->required();

  BenchmarkArgs bench_args;
  CLI::App* bench = app.add_subcommand("benchmark", "Run a benchmark suite");
  bench->add_option("--suite", bench_args.suite, "Suite name")
      ->required()
      ->check(CLI::IsMember({"abs", "exp", "tan", "exp2d", "penzl1", "penzl2"}));
  bench->add_option("--output", bench_args.output, "Results CSV");
  bench->add_flag("--full", bench_args.full,
                  "Full-size point set (abs: 200000 points)");
  bench->add_option("--maxiter", bench_args.maxiter, "Iteration cap");

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "Generate a test problem CSV");
  gen->add_option("--problem", gen_args.problem, "Problem name")
      ->required()
      ->check(CLI::IsMember({"abs", "exp", "tan", "exp2d", "penzl1", "penzl2"}));
  gen->add_option("--output", gen_args.output, "Output CSV")->required();
  gen->add_option("--count", gen_args.count, "Point count");
  gen->add_option("--seed", gen_args.seed, "Seed (exp2d)");
  gen->add_option("--freq-count", gen_args.freq_count, "Frequency count (penzl)");
  gen->add_option("--t-count", gen_args.t_count, "t count (penzl)");
  gen->add_option("--u-count", gen_args.u_count, "u count (penzl2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*fit) return run_fit(fit_args);
    if (*eval) return run_eval(eval_args);
    if (*bench) return run_benchmark(bench_args);
    if (*gen) return run_gen(gen_args);
  } catch (const BreakdownError& err) {
    std::cerr << "error: " << err.what() << " (no usable iterate)\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 0;
}
