#include "cdd/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <random>

#include "cdd/error.hpp"
#include "cdd/expr.hpp"
#include "cdd/linalg.hpp"
#include "cdd/oracle.hpp"
#include "cdd/spline.hpp"
#include "cdd/stagnation.hpp"

namespace cdd::cli {
namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Tab-separated row.
template <typename... T>
void row(std::ostream& out, const T&... cells) {
  bool first = true;
  ((out << (first ? "" : "\t") << cells, first = false), ...);
  out << '\n';
}

double abs_err(double got, double want) { return std::fabs(got - want); }

// Relative to the oracle; absolute when the oracle value is zero.
double rel_err(double got, double want) {
  return want == 0.0 ? std::fabs(got) : std::fabs(got - want) / std::fabs(want);
}

struct Options {
  std::string expr;
  std::vector<double> x;
  std::vector<double> s;
  double sweep_hi = 1e-1;
  double sweep_lo = 1e-20;
  std::size_t points = 20;
  std::size_t dim = 2;
  double cond = 1e4;
  std::string method = "sd";
  std::size_t max_iters = 1'000'000;
  std::string spline;
  std::string matrix;
  std::uint64_t seed = 1;
  std::string output;
};

int exit_code(Errc code) {
  switch (code) {
    case Errc::overflow:
    case Errc::numerical:
    case Errc::state:
    case Errc::degenerate_model:
      return kExitNumerical;
    default:
      return kExitInput;
  }
}

Expr parse_with_arity(const Options& o) {
  if (o.expr.empty()) throw Error(Errc::invalid_input, "-e EXPR is required");
  return parse(o.expr, o.x.size());
}

void require_same_length(const Options& o) {
  if (o.s.size() != o.x.size()) {
    throw Error(Errc::shape, "-x has " + std::to_string(o.x.size()) + " values but -s has " +
                                 std::to_string(o.s.size()));
  }
}

std::vector<double> endpoint(std::span<const double> x, std::span<const double> s) {
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + s[i];
  return y;
}

int cmd_eval(const Options& o, std::ostream& out) {
  const Expr e = parse_with_arity(o);
  const double value = eval_plain(e, o.x);
  const double oracle = oracle_value(e, o.x);
  row(out, "# value", "oracle");
  row(out, num(value), num(oracle));
  return kExitOk;
}

int cmd_delta(const Options& o, std::ostream& out) {
  const Expr e = parse_with_arity(o);
  require_same_length(o);
  const double naive = eval_plain(e, endpoint(o.x, o.s)) - eval_plain(e, o.x);
  const double cdd = eval_delta(e, o.x, o.s).delta();
  const double oracle = oracle_delta(e, o.x, o.s);
  row(out, "# naive", "cdd", "oracle", "naive_abs_err", "naive_rel_err", "cdd_abs_err",
      "cdd_rel_err");
  row(out, num(naive), num(cdd), num(oracle), num(abs_err(naive, oracle)),
      num(rel_err(naive, oracle)), num(abs_err(cdd, oracle)), num(rel_err(cdd, oracle)));
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const Expr e = parse_with_arity(o);
  if (!(o.sweep_hi > 0.0) || !(o.sweep_lo > 0.0) || !(o.sweep_lo < o.sweep_hi)) {
    throw Error(Errc::invalid_input, "sweep bounds must satisfy 0 < --sweep-lo < --sweep-hi");
  }
  if (o.points < 2) throw Error(Errc::invalid_input, "--points must be at least 2");
  // Direction: -s if given, else a seeded random unit direction.
  std::vector<double> dir = o.s;
  if (dir.empty()) {
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    dir.resize(o.x.size());
    for (double& d : dir) d = u(rng);
    if (dir.size() == 1) dir[0] = 1.0;
  }
  if (dir.size() != o.x.size()) throw Error(Errc::shape, "-s must match the length of -x");
  const double norm = norm_inf(dir);
  if (!(norm > 0.0)) throw Error(Errc::invalid_input, "sweep direction must be nonzero");
  for (double& d : dir) d /= norm;

  row(out, "# s", "naive_rel_err", "cdd_rel_err", "taylor_rel_err");
  const double ratio = std::log10(o.sweep_lo / o.sweep_hi) / static_cast<double>(o.points - 1);
  for (std::size_t k = 0; k < o.points; ++k) {
    const double m = k + 1 == o.points ? o.sweep_lo
                                       : o.sweep_hi * std::pow(10.0, ratio * static_cast<double>(k));
    std::vector<double> s(dir.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = dir[i] * m;
    const double oracle = oracle_delta(e, o.x, s);
    const double naive = eval_plain(e, endpoint(o.x, s)) - eval_plain(e, o.x);
    const double cdd = eval_delta(e, o.x, s).delta();
    const double taylor = oracle_directional_derivative(e, o.x, s);
    row(out, num(m), num(rel_err(naive, oracle)), num(rel_err(cdd, oracle)),
        num(rel_err(taylor, oracle)));
  }
  return kExitOk;
}

int cmd_spline_demo(const Options& o, std::ostream& out) {
  if (o.spline.empty()) throw Error(Errc::invalid_input, "--spline FILE is required");
  const CubicSpline sp = read_spline_file(o.spline);
  require_same_length(o);
  if (o.x.empty()) throw Error(Errc::invalid_input, "-x and -s are required");
  row(out, "# x", "dx", "cdd", "oracle", "abs_err", "rel_err", "lower_interval",
      "upper_interval");
  for (std::size_t i = 0; i < o.x.size(); ++i) {
    SplineDeltaTrace trace;
    const double cdd = spline_eval_delta(sp, seed_input(o.x[i], o.s[i]), &trace).delta();
    const double oracle = oracle_spline_delta(sp, o.x[i], o.s[i]);
    row(out, num(o.x[i]), num(o.s[i]), num(cdd), num(oracle), num(abs_err(cdd, oracle)),
        num(rel_err(cdd, oracle)), trace.lower_interval, trace.upper_interval);
  }
  return kExitOk;
}

int cmd_solve_demo(const Options& o, std::ostream& out) {
  if (o.matrix.empty()) throw Error(Errc::invalid_input, "--matrix FILE is required");
  const DeltaMatrix a = read_perturbed_matrix_file(o.matrix);
  const std::vector<double> b = o.x.empty() ? std::vector<double>(a.size(), 1.0) : o.x;
  const std::vector<double> db = o.s.empty() ? std::vector<double>(b.size(), 0.0) : o.s;
  if (b.size() != a.size() || db.size() != a.size()) {
    throw Error(Errc::shape, "-x (b) and -s (db) must have " + std::to_string(a.size()) +
                                 " values");
  }
  SolveReport report;
  const DeltaVector bv(b, db);
  const DeltaVector x = solve_delta(a, bv, &report);
  const std::vector<double> want = oracle_solve_delta(a, bv);
  out << "# branch=" << (report.branch == SolveBranch::series ? "series" : "direct")
      << " perturbation_norm=" << num(report.perturbation_norm)
      << " series_terms=" << report.series_terms << '\n';
  row(out, "# i", "x", "dx_cdd", "dx_oracle", "abs_err", "rel_err");
  for (std::size_t i = 0; i < x.size(); ++i) {
    row(out, i, num(x.values()[i]), num(x.deltas()[i]), num(want[i]),
        num(abs_err(x.deltas()[i], want[i])), num(rel_err(x.deltas()[i], want[i])));
  }
  return kExitOk;
}

int cmd_stagnation_demo(const Options& o, std::ostream& out, std::ostream& err) {
  if (!(o.cond > 0.0) || !std::isfinite(o.cond)) {
    throw Error(Errc::invalid_input, "--cond must be positive");
  }
  if (o.dim == 0) throw Error(Errc::invalid_input, "--dim must be positive");
  // M = diag(cond^(i/(n−1))), d drawn from [−1.5, −0.5], start at 0.
  Matrix m(o.dim, o.dim);
  for (std::size_t i = 0; i < o.dim; ++i) {
    m(i, i) = o.dim == 1 ? 1.0
                         : std::pow(o.cond, static_cast<double>(i) / static_cast<double>(o.dim - 1));
  }
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> u(-1.5, -0.5);
  std::vector<double> d(o.dim);
  for (double& v : d) v = u(rng);
  const QuadraticObjective q(m, d);

  ExperimentConfig config;
  config.method = o.method == "newton" ? DescentMethod::newton : DescentMethod::steepest_descent;
  config.max_iters = o.max_iters;
  const ExperimentReport r = run_quadratic_experiment(q, std::vector<double>(o.dim, 0.0), config);

  out << "# dim=" << o.dim << " cond=" << num(o.cond) << " method=" << to_string(config.method)
      << " seed=" << o.seed << '\n';
  row(out, "# rule", "iterations", "final_rel_error", "stop");
  row(out, "objective", r.objective_rule.iterations, num(r.objective_rule.final_error),
      to_string(r.objective_rule.reason));
  row(out, "divided_difference", r.delta_rule.iterations, num(r.delta_rule.final_error),
      to_string(r.delta_rule.reason));
  row(out, "# error_ratio", num(r.error_ratio));
  if (r.delta_rule.final_error > r.objective_rule.final_error) {
    err << "cdd: divided-difference run ended less accurate than the objective run\n";
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Accurate f(x+s) - f(x) by computational divided differencing", "cdd"};
  app.require_subcommand(1);
  Options o;

  auto add_expr = [&](CLI::App* c) {
    c->add_option("-e,--expr", o.expr, "Expression over x0..x9")->required();
  };
  auto add_x = [&](CLI::App* c, const char* help) {
    c->add_option("-x", o.x, help)->delimiter(',')->allow_extra_args(false);
  };
  auto add_s = [&](CLI::App* c, const char* help) {
    c->add_option("-s", o.s, help)->delimiter(',')->allow_extra_args(false);
  };
  auto add_output = [&](CLI::App* c) {
    c->add_option("-o,--output", o.output, "Write results to FILE instead of stdout");
  };

  CLI::App* eval = app.add_subcommand("eval", "Evaluate an expression");
  add_expr(eval);
  add_x(eval, "Point, comma separated");
  add_output(eval);

  CLI::App* delta = app.add_subcommand("delta", "Naive, divided-difference and oracle deltas");
  add_expr(delta);
  add_x(delta, "Point, comma separated");
  add_s(delta, "Step, comma separated");
  add_output(delta);

  CLI::App* sweep = app.add_subcommand("sweep", "Errors over a log grid of step sizes");
  add_expr(sweep);
  add_x(sweep, "Point, comma separated");
  add_s(sweep, "Step direction (default: random from --seed)");
  sweep->add_option("--sweep-hi", o.sweep_hi, "Largest step")->capture_default_str();
  sweep->add_option("--sweep-lo", o.sweep_lo, "Smallest step")->capture_default_str();
  sweep->add_option("--points", o.points, "Grid points")->capture_default_str();
  sweep->add_option("--seed", o.seed, "Seed for the step direction")->capture_default_str();
  add_output(sweep);

  CLI::App* spline = app.add_subcommand("spline-demo", "Spline deltas against the oracle");
  spline->add_option("--spline", o.spline, "Spline file")->required();
  add_x(spline, "Points, comma separated");
  add_s(spline, "Steps, comma separated");
  add_output(spline);

  CLI::App* solve = app.add_subcommand("solve-demo", "Linear-solve deltas against the oracle");
  solve->add_option("--matrix", o.matrix, "Matrix file (A, optionally followed by dA)")
      ->required();
  add_x(solve, "Right-hand side b (default all ones)");
  add_s(solve, "Right-hand side perturbation db (default zero)");
  add_output(solve);

  CLI::App* stag = app.add_subcommand("stagnation-demo",
                                      "Objective-value vs divided-difference termination");
  stag->add_option("--dim", o.dim, "Dimension")->capture_default_str();
  stag->add_option("--cond", o.cond, "Condition number of the diagonal Hessian")
      ->capture_default_str();
  stag->add_option("--method", o.method, "Descent method")
      ->check(CLI::IsMember({"sd", "newton"}))
      ->capture_default_str();
  stag->add_option("--max-iters", o.max_iters, "Iteration cap per run")->capture_default_str();
  stag->add_option("--seed", o.seed, "Seed for the linear term")->capture_default_str();
  add_output(stag);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  std::ofstream file;
  if (!o.output.empty()) {
    file.open(o.output);
    if (!file) {
      err << "cdd: cannot open '" << o.output << "' for writing\n";
      return kExitInput;
    }
  }
  std::ostream& sink = o.output.empty() ? out : file;

  try {
    if (eval->parsed()) return cmd_eval(o, sink);
    if (delta->parsed()) return cmd_delta(o, sink);
    if (sweep->parsed()) return cmd_sweep(o, sink);
    if (spline->parsed()) return cmd_spline_demo(o, sink);
    if (solve->parsed()) return cmd_solve_demo(o, sink);
    return cmd_stagnation_demo(o, sink, err);
  } catch (const Error& e) {
    err << "cdd: " << e.what() << '\n';
    return exit_code(e.code());
  }
}

}  // namespace cdd::cli
