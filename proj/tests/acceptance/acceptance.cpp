// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cdd/branch.hpp"
#include "cdd/error.hpp"
#include "cdd/expr.hpp"
#include "cdd/kernels.hpp"
#include "cdd/linalg.hpp"
#include "cdd/optim.hpp"
#include "cdd/oracle.hpp"
#include "cdd/spline.hpp"
#include "cdd/stagnation.hpp"
#include "generators.hpp"
#include "numeric.hpp"
#include "reference.hpp"

#ifdef CDD_HAVE_CLI
#include "cdd/cli.hpp"
#endif

using namespace cdd;
namespace t = cdd::testing;

namespace {

constexpr double u = kUnitRoundoff;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

// First few offending cases of a criterion go to stderr.
int noted = 0;
void note(const std::string& what) {
  if (noted++ < 5) std::fprintf(stderr, "    %s\n", what.c_str());
}

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  noted = 0;
  Outcome r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > limit_s) {
    r.pass = false;
    r.detail += fmt("; over time limit %.0f s", limit_s);
  }
  if (!r.pass) ++failures;
  std::printf("%s  %2d  %-34s %s (%.2f s)\n", r.pass ? "PASS" : "FAIL", id, name, r.detail.c_str(),
              secs);
  std::fflush(stdout);
}

Matrix scaled(const Matrix& m, double c) {
  Matrix r = m;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) *= c;
  return r;
}

Matrix diagonal(const std::vector<double>& d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

// σ·g(x): every coefficient times a power of two, so both forms still agree
// exactly.
CubicSpline scale_values(const CubicSpline& g, double sigma) {
  auto times = [sigma](std::span<const CubicPiece> ps) {
    std::vector<CubicPiece> out(ps.begin(), ps.end());
    for (CubicPiece& p : out) {
      p.c3 *= sigma;
      p.c2 *= sigma;
      p.c1 *= sigma;
      p.c0 *= sigma;
    }
    return out;
  };
  return CubicSpline({g.knots().begin(), g.knots().end()}, times(g.left()), times(g.right()));
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

// 1. x² at 1 with s = 1e-18.
Outcome motivating() {
  const Expr e = parse("x0^2", 1);
  const std::vector<double> x{1.0}, s{1e-18}, y{x[0] + s[0]};
  const double naive = eval_plain(e, y) - eval_plain(e, x);
  const double got = eval_delta(e, x, s).delta();
  const double want = oracle_delta(e, x, s);
  const double rel = t::relative_error(got, want);
  return {naive == 0.0 && got == 2e-18 && rel <= 1e-15,
          fmt("naive=%.17g cdd=%.17g oracle=%.17g rel=%.3g", naive, got, want, rel)};
}

// 2. Small steps over random trees.
Outcome small_steps() {
  t::Rng rng(20240101);
  const auto mags = t::log_sweep(1e-1, 1e-20, 20);
  std::size_t cases = 0, over = 0, over10 = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Expr e = t::random_expr(rng, 3, 8);
    const auto x = t::random_point(rng, 3, 0.5, 2.0);
    for (double m : mags) {
      const auto s = t::random_step(rng, 3, m);
      const double got = eval_delta(e, x, s).delta();
      const double want = oracle_delta(e, x, s);
      const double ratio = std::fabs(got - want) / t::step_bound(m, want);
      ++cases;
      worst = std::max(worst, ratio);
      if (ratio > 1) ++over;
      if (ratio > 10) ++over10;
    }
  }
  const double within = 1.0 - static_cast<double>(over) / static_cast<double>(cases);
  return {within >= 0.999 && over10 == 0,
          fmt("%zu cases, %.4f%% within bound, %zu over 10x, worst %.3g x bound", cases,
              100 * within, over10, worst)};
}

// 3. Steps of size >= 1 against plain subtraction.
Outcome large_steps() {
  t::Rng rng(31337);
  std::size_t cases = 0, skipped = 0, fails = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Expr e = t::random_expr(rng, 3, 8);
    auto x = t::random_point(rng, 3, 0.5, 1.5);
    auto s = t::random_step(rng, 3, t::uniform(rng, 1.0, 3.0), true);
    t::snap_step(x, s);
    std::vector<double> y(3);
    for (std::size_t i = 0; i < 3; ++i) y[i] = x[i] + s[i];
    const double f0 = eval_plain(e, x), f1 = eval_plain(e, y);
    // Plain subtraction is only a meaningful target where plain evaluation
    // is itself accurate at both endpoints.
    const double r0 = oracle_value(e, x), r1 = oracle_value(e, y);
    if (std::fabs(f0 - r0) > 4 * u * std::fabs(r0) || std::fabs(f1 - r1) > 4 * u * std::fabs(r1)) {
      ++skipped;
      continue;
    }
    ++cases;
    const double got = eval_delta(e, x, s).delta();
    const double ratio =
        std::fabs(got - (f1 - f0)) / (32 * u * (std::fabs(f1) + std::fabs(f0)));
    worst = std::max(worst, ratio);
    if (ratio > 1) {
      ++fails;
      note(fmt("%s x=(%.17g, %.17g, %.17g) s=(%.17g, %.17g, %.17g) got=%.17g plain=%.17g",
               format(e).c_str(), x[0], x[1], x[2], s[0], s[1], s[2], got, f1 - f0));
    }
  }
  return {fails == 0 && cases >= 500,
          fmt("%zu cases (%zu with inaccurate plain evaluation skipped), %zu over bound, worst "
              "%.3g x bound",
              cases, skipped, fails, worst)};
}

// 4. The 17-term exp(d) - 1 kernel.
Outcome expm1_kernel() {
  t::Rng rng(4);
  std::uint64_t worst = 0;
  std::size_t over = 0;
  for (int i = 0; i < 100000; ++i) {
    double d = t::uniform(rng, -1.0, 1.0);
    if (i % 4 == 0) d = std::ldexp(d, -static_cast<int>(rng() % 64));
    const std::uint64_t dist = t::ulp_distance(expm1_taylor(d), oracle_expm1(d));
    worst = std::max(worst, dist);
    if (dist > 2) ++over;
  }
  return {over == 0, fmt("100000 draws, worst %llu ulps", static_cast<unsigned long long>(worst))};
}

// 5. Penalty max(0, x)² across signs and scales.
Outcome penalty() {
  t::Rng rng(5);
  std::size_t cases = 0, fails = 0, squaring = 0, subtraction = 0, straddle = 0;
  for (int e10 = 0; e10 >= -30; --e10) {
    const double mag = std::pow(10.0, e10);
    for (int trial = 0; trial < 200; ++trial) {
      const double x = (rng() & 1 ? 1 : -1) * mag * t::uniform(rng, 0.0, 2.0);
      double dx = (rng() & 1 ? 1 : -1) * mag * t::uniform(rng, 0.0, 2.0);
      if (trial % 5 == 0) dx *= std::pow(10.0, -t::uniform(rng, 0, 10));
      const DeltaScalar a = seed_input(x, dx);
      (penalty_branch(a) == PenaltyBranch::squaring ? squaring : subtraction) += 1;
      if ((x < 0) != (x + dx < 0)) ++straddle;
      const double got = penalty_delta(a).delta();
      const double want = oracle_penalty_delta(x, dx);
      ++cases;
      if (std::fabs(got - want) > t::step_bound(std::fabs(dx), want)) ++fails;
    }
  }
  return {fails == 0 && squaring > 0 && subtraction > 0 && straddle > 0,
          fmt("%zu cases, %zu over bound; branches squaring=%zu subtraction=%zu, %zu straddle "
              "zero",
              cases, fails, squaring, subtraction, straddle)};
}

// 6. Splines: steps crossing 1 to 5 knots, and exact antisymmetry.
//
// random_spline(scale) is g(x/scale) with O(10) values. The scored family is
// scale·g(x/scale), which shrinks x and f together and keeps the slopes O(10)
// at every magnitude. The family that shrinks only x has slopes up to
// 10/scale; there the bound becomes pure relative accuracy, which cancelling
// telescoped pieces cannot always meet, so it is reported but not scored.
Outcome spline() {
  t::Rng rng(6);
  std::size_t cases = 0, fails = 0, wrong_span = 0, anti_checked = 0, anti_fails = 0;
  std::size_t steep_fails = 0;
  double smallest = INFINITY, steep_worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double scale = std::ldexp(1.0, -static_cast<int>(rng() % 61));
    const CubicSpline steep = t::random_spline(rng, 9, scale);
    const CubicSpline sp = scale_values(steep, scale);
    const auto knots = sp.knots();
    for (std::size_t span = 1; span <= 5; ++span) {
      for (int rep = 0; rep < 4; ++rep) {
        const std::size_t from = rng() % 3;
        const double f1 = t::uniform(rng, 0.05, 0.95), f2 = t::uniform(rng, 0.05, 0.95);
        const double x = knots[from] + f1 * scale;
        const double y = knots[from + span] + f2 * scale;
        const double dx = y - x;
        // Alternate directions; the negative step starts at the far end.
        const bool back = rep % 2 == 1;
        const double xs = back ? x + dx : x, ds = back ? -dx : dx;
        SplineDeltaTrace tr;
        const double got = spline_eval_delta(sp, seed_input(xs, ds), &tr).delta();
        const double want = oracle_spline_delta(sp, xs, ds);
        if (tr.upper_interval - tr.lower_interval != span) ++wrong_span;
        ++cases;
        smallest = std::min(smallest, std::fabs(ds));
        if (std::fabs(got - want) > t::step_bound(std::fabs(ds), want)) {
          ++fails;
          note(fmt("scale=%.17g x=%.17g dx=%.17g got=%.17g oracle=%.17g", scale, xs, ds, got, want));
        }
        const double sg = spline_eval_delta(steep, seed_input(xs, ds)).delta();
        const double sw = oracle_spline_delta(steep, xs, ds);
        const double ratio = std::fabs(sg - sw) / t::step_bound(std::fabs(ds), sw);
        steep_worst = std::max(steep_worst, ratio);
        if (ratio > 1) ++steep_fails;
      }
    }
    // Antisymmetry on endpoints that are exactly representable.
    for (int rep = 0; rep < 20; ++rep) {
      const double lo = knots.front() - scale, hi = knots.back();
      const double x =
          lo + std::ldexp(std::floor(t::uniform(rng, 0, 4096)), -12) * (hi - lo);
      const double dx = std::ldexp(static_cast<double>(static_cast<int>(rng() % 129) - 64),
                                   -static_cast<int>(rng() % 20)) *
                        scale;
      if (dx == 0.0 || !t::exact_sum(x, dx)) continue;
      for (const CubicSpline* c : {&sp, &steep}) {
        ++anti_checked;
        const double fwd = spline_eval_delta(*c, seed_input(x, dx)).delta();
        const double bwd = spline_eval_delta(*c, seed_input(x + dx, -dx)).delta();
        if (std::bit_cast<std::uint64_t>(fwd) != std::bit_cast<std::uint64_t>(-bwd + 0.0)) {
          ++anti_fails;
        }
      }
    }
  }
  return {fails == 0 && wrong_span == 0 && anti_fails == 0 && anti_checked >= 1000 &&
              smallest <= 1e-17,
          fmt("%zu cases (smallest |dx| %.3g), %zu over bound, %zu wrong span; antisymmetry "
              "%zu/%zu exact; x-only scaling (unscored): %zu over bound, worst %.3g x bound",
              cases, smallest, fails, wrong_span, anti_checked - anti_fails, anti_checked,
              steep_fails, steep_worst)};
}

// 7. Perturbed linear solves, both branches.
Outcome solve() {
  t::Rng rng(7);
  const auto hs = t::log_sweep(1e-2, 1e-20, 19);
  std::size_t cases = 0, fails = 0, series = 0, direct = 0, skipped = 0;
  double worst = 0.0;
  for (std::size_t n : {2u, 4u, 8u}) {
    for (int trial = 0; trial < 30; ++trial) {
      // The overall size of A is free; small A makes ΔA·A⁻¹ large enough at
      // the top of the sweep to need the direct branch.
      const double size = std::pow(10.0, -static_cast<double>(trial % 4));
      const Matrix a = scaled(t::random_conditioned_matrix(rng, n, 100), size);
      const Matrix da = t::random_matrix(rng, n);
      const auto b = t::random_point(rng, n, -1, 1);
      const auto db = t::random_point(rng, n, -1, 1);
      for (double h : hs) {
        const DeltaMatrix am(a, scaled(da, h));
        std::vector<double> dbh(n);
        for (std::size_t i = 0; i < n; ++i) dbh[i] = db[i] * h;
        const DeltaVector bh(b, dbh);
        // The perturbed system must also be a condition <= 100 system.
        Matrix a1 = a;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) a1(i, j) += am.deltas()(i, j);
        double cond1 = INFINITY;
        try {
          cond1 = norm_inf(a1) * norm_inf(LuFactorization(a1).inverse());
        } catch (const Error&) {
        }
        if (cond1 > 100.0 * static_cast<double>(n)) {
          ++skipped;
          continue;
        }
        SolveReport rep;
        const DeltaVector x = solve_delta(am, bh, &rep);
        (rep.branch == SolveBranch::series ? series : direct) += 1;
        const auto want = oracle_solve_delta(am, bh);
        const double scale = std::max(h * norm_inf(x.values()), norm_inf(want));
        const double ratio = max_abs_diff(x.deltas(), want) / (1000 * u * scale);
        worst = std::max(worst, ratio);
        ++cases;
        if (ratio > 1) ++fails;
      }
    }
  }
  return {fails == 0 && series > 0 && direct > 0,
          fmt("%zu cases (%zu ill-conditioned perturbed systems skipped), %zu over bound, worst "
              "%.3g x bound; branches series=%zu direct=%zu",
              cases, skipped, fails, worst, series, direct)};
}

// 8. Trust-region ratio of a quadratic against itself.
Outcome trust_region() {
  t::Rng rng(8);
  std::size_t cases = 0, fails = 0, tiny = 0, naive_zero = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 6;
    std::vector<double> diag(n);
    for (double& v : diag) v = t::uniform(rng, 0.5, 100);
    const QuadraticObjective q(diagonal(diag), t::random_point(rng, n, 0.5, 1.0));
    // Positive x and d keep f(x) well away from zero, so the plain
    // difference at the smallest steps is below half an ulp of f.
    const auto x = t::random_point(rng, n, 1.0, 2.0);
    const auto g = q.gradient(x);
    const DeltaObjective obj = q.as_objective();
    for (double h : t::log_sweep(1e-2, 1e-18, 17)) {
      // A descent step with ‖s‖∞ = h.
      std::vector<double> s(n), y(n);
      for (std::size_t i = 0; i < n; ++i) s[i] = -std::copysign(h * t::uniform(rng, 0.1, 1.0), g[i]);
      const std::size_t top = rng() % n;
      s[top] = -std::copysign(h, g[top]);
      for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + s[i];
      const double model = oracle_quadratic_delta(q, x, s);
      const double rho = trust_region_rho(obj, model, x, s);
      const double err = std::fabs(rho - 1.0);
      worst = std::max(worst, err / u);
      ++cases;
      if (err > 100 * u) ++fails;
      if (h == 1e-18) {
        ++tiny;
        if ((q.value(y) - q.value(x)) / model == 0.0) ++naive_zero;
      }
    }
  }
  return {fails == 0 && naive_zero == tiny,
          fmt("%zu cases, %zu off by more than 100u (worst %.3g u); naive ratio 0 in %zu/%zu "
              "cases at |s| = 1e-18",
              cases, fails, worst, naive_zero, tiny)};
}

// 9. L against R for windows of descent iterates far from the minimizer.
Outcome stagnation_identity() {
  t::Rng rng(9);
  std::size_t windows = 0, fails = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 5;
    const double cond = std::pow(10.0, t::uniform(rng, 0, 4));
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i)
      diag[i] = std::pow(cond, static_cast<double>(i) / static_cast<double>(n - 1));
    const QuadraticObjective q(diagonal(diag), t::random_point(rng, n, -1.5, -0.5));
    const DeltaObjective obj = q.as_objective();
    const auto xs = q.minimizer();
    const double xs_norm = std::sqrt(std::inner_product(xs.begin(), xs.end(), xs.begin(), 0.0));
    std::vector<double> x = t::random_point(rng, n, -2, 2);
    StagnationWindow w;
    for (int k = 0; k < 200; ++k) {
      double dist = 0.0;
      for (std::size_t i = 0; i < n; ++i) dist += (x[i] - xs[i]) * (x[i] - xs[i]);
      if (std::sqrt(dist) <= 1e-3 * xs_norm) break;
      w = push(w, obj, x);
      if (w.iterates().size() == w.capacity()) {
        const StagnationCheck c = check_stagnation(w, obj);
        const double ratio = std::fabs(c.end_to_end - c.telescoped) / std::fabs(c.telescoped);
        worst = std::max(worst, ratio);
        ++windows;
        if (ratio > 1e-12) ++fails;
      }
      // Steepest descent with exact line search.
      const auto g = q.gradient(x);
      double gg = 0.0, gmg = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        gg += g[i] * g[i];
        gmg += g[i] * diag[i] * g[i];
      }
      if (gg == 0.0) break;
      for (std::size_t i = 0; i < n; ++i) x[i] -= gg / gmg * g[i];
    }
  }
  return {fails == 0 && windows >= 1000,
          fmt("%zu windows, %zu with |L-R| > 1e-12|R|, worst %.3g", windows, fails, worst)};
}

// 10. Objective-value stopping against divided-difference stopping.
Outcome gap() {
  double obj_err = NAN, dd_err = NAN;
#ifdef CDD_HAVE_CLI
  std::ostringstream out, err;
  const int code = cli::run({"stagnation-demo", "--dim", "2", "--cond", "1e4", "--method", "sd"},
                            out, err);
  if (code != 0) return {false, fmt("exit %d: %s", code, err.str().c_str())};
  std::istringstream in(out.str());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream cells(line);
    std::string name, iters, error;
    std::getline(cells, name, '\t');
    std::getline(cells, iters, '\t');
    std::getline(cells, error, '\t');
    (name == "objective" ? obj_err : dd_err) = std::stod(error);
  }
#else
  const QuadraticObjective q(diagonal({1, 1e4}), {-1, -1});
  const auto r = run_quadratic_experiment(q, std::vector<double>{0, 0});
  obj_err = r.objective_rule.final_error;
  dd_err = r.delta_rule.final_error;
#endif
  const double ratio = obj_err / dd_err;
  return {obj_err >= 1e-11 && obj_err <= 1e-5 && dd_err <= 1e-12 && ratio >= 1e4,
          fmt("objective rule error %.3g, divided-difference rule error %.3g, ratio %.3g", obj_err,
              dd_err, ratio)};
}

// 11. s = 0 gives +0 for every rule and every expression.
Outcome zero_step() {
  std::size_t checked = 0, fails = 0;
  auto check = [&](double d, const std::string& what = "") {
    ++checked;
    if (!t::positive_zero(d)) {
      ++fails;
      note(fmt("%s gave %.17g", what.c_str(), d));
    }
  };
  const DeltaScalar a = seed_input(1.75, 0.0), b = seed_input(-0.5, 0.0);
  for (const DeltaScalar& r :
       {add(a, b), sub(a, a), sub(a, b), neg(a), mul(a, b), mul(b, b), reciprocal(b), div(a, b),
        square(b), sqrt(a), exp(b), log(a), pow(a, lift_parameter(2.25)), pow(a, lift_parameter(2)),
        pow(a, lift_parameter(0.5)), pow(b, lift_parameter(-1)), pow(a, seed_input(1.25, 0)),
        penalty_delta(a), penalty_delta(b), lift_parameter(3.0)}) {
    check(r.delta(), "rule");
  }
  check(expm1_taylor(0.0));
  for (const char* src : {"x0+x1", "x0-x1", "-x0", "x0*x1", "x0/x1", "x0^2", "x0^0.5", "x1^-1",
                          "x0^x1", "exp(x1)", "log(x0)", "sqrt(x0)", "sq(x1)", "recip(x1)",
                          "penalty(x0)", "penalty(x1)", "3"}) {
    check(eval_delta(parse(src, 2), std::vector<double>{1.75, -0.5}, std::vector<double>{0, 0})
              .delta(), src);
  }
  const CubicSpline cube = read_spline_file(CDD_TEST_DATA_DIR "/cube.spline");
  for (double x : {-3.0, 0.0, 0.5, 1.0, 7.0}) check(spline_eval_delta(cube, seed_input(x, 0)).delta(), "spline");
  const DeltaMatrix m = DeltaMatrix::parameters(Matrix::from_rows({{4, 1}, {2, 3}}));
  const DeltaVector v = DeltaVector::parameters({1, -2});
  const DeltaVector solved = solve_delta(m, v), product = matvec_delta(m, v);
  for (double d : solved.deltas()) check(d, "solve");
  for (double d : product.deltas()) check(d, "matvec");
  check(dot_delta(v, v).delta());
  const QuadraticObjective q(Matrix::from_rows({{2, 1}, {1, 3}}), {1, -1});
  check(quadratic_delta(q, v).delta());

  t::Rng rng(11);
  std::size_t evaluated = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Expr e = t::random_unrestricted_expr(rng, 3, 8);
    const auto x = t::random_point(rng, 3, -3, 3);
    try {
      const double d = eval_delta(e, x, std::vector<double>(3, 0.0)).delta();
      check(d, format(e));
      ++evaluated;
    } catch (const Error& err) {
      // Only points outside the expression's domain may throw.
      if (err.code() != Errc::domain && err.code() != Errc::overflow) ++fails;
    }
  }
  return {fails == 0 && evaluated >= 200,
          fmt("%zu results checked (%zu random expressions evaluated), %zu not +0", checked,
              evaluated, fails)};
}

}  // namespace

int main() {
  criterion(1, "motivating example", 1, motivating);
  criterion(2, "small-step accuracy", 120, small_steps);
  criterion(3, "large-step consistency", 60, large_steps);
  criterion(4, "exp kernel", 30, expm1_kernel);
  criterion(5, "penalty rule", 60, penalty);
  criterion(6, "spline telescoping", 60, spline);
  criterion(7, "perturbed linear solve", 60, solve);
  criterion(8, "trust-region ratio", 60, trust_region);
  criterion(9, "stagnation identity", 60, stagnation_identity);
  criterion(10, "objective vs divided-difference stop", 30, gap);
  criterion(11, "zero-step identity", 60, zero_step);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
