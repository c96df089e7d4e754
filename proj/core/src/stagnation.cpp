#include "cdd/stagnation.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "cdd/error.hpp"

namespace cdd {
namespace {

std::vector<double> difference(std::span<const double> a, std::span<const double> b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

double norm2(std::span<const double> v) {
  double scale = 0.0, ssq = 1.0;
  for (double x : v) {
    if (x == 0.0) continue;
    const double ax = std::fabs(x);
    if (scale < ax) {
      ssq = 1.0 + ssq * (scale / ax) * (scale / ax);
      scale = ax;
    } else {
      ssq += (ax / scale) * (ax / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

double relative_error(std::span<const double> x, std::span<const double> xstar) {
  const double ref = norm2(xstar);
  const double err = norm2(difference(x, xstar));
  return ref > 0.0 ? err / ref : err;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// One descent step; returns false when no step is possible (zero gradient).
bool descent_step(const QuadraticObjective& q, DescentMethod method, std::vector<double>& x) {
  const auto g = q.gradient(x);
  bool zero = true;
  for (double v : g) zero = zero && v == 0.0;
  if (zero) return false;

  if (method == DescentMethod::newton) {
    const auto p = q.solve(g);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= p[i];
    return true;
  }
  // Exact line search along −g: α = gᵀg / gᵀMg.
  const auto mg = q.hessian() * std::span<const double>(g);
  const double curvature = dot(g, mg);
  if (!(curvature > 0.0)) return false;
  const double alpha = dot(g, g) / curvature;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] -= alpha * g[i];
  return true;
}

// `stop(x_new)` decides termination after each accepted step.
RunResult run_loop(const QuadraticObjective& q, std::span<const double> x0,
                   std::span<const double> xstar, const ExperimentConfig& config,
                   const std::function<bool(const std::vector<double>&)>& stop) {
  RunResult r;
  r.x.assign(x0.begin(), x0.end());
  const double start_error = relative_error(r.x, xstar);
  r.final_error = start_error;

  while (r.iterations < config.max_iters) {
    std::vector<double> next = r.x;
    if (!descent_step(q, config.method, next) || next == r.x) {
      r.reason = StopReason::zero_step;
      break;
    }
    for (double v : next) {
      if (!std::isfinite(v)) throw Error(Errc::numerical, "descent produced a non-finite iterate");
    }
    r.x = std::move(next);
    ++r.iterations;
    r.final_error = relative_error(r.x, xstar);
    if (r.final_error > 10.0 * start_error && r.final_error > 0.0) {
      throw Error(Errc::numerical, "descent diverged at iteration " +
                                       std::to_string(r.iterations));
    }
    if (stop(r.x)) {
      r.reason = StopReason::stagnation;
      break;
    }
  }
  return r;
}

}  // namespace

StagnationWindow::StagnationWindow(std::size_t capacity, double trigger_factor)
    : capacity_(capacity), trigger_factor_(trigger_factor) {
  if (capacity_ < 3) throw Error(Errc::invalid_input, "stagnation window needs capacity >= 3");
  if (!(trigger_factor_ > 1.0) || !std::isfinite(trigger_factor_)) {
    throw Error(Errc::invalid_input, "trigger factor must be a finite number > 1");
  }
}

StagnationWindow push(const StagnationWindow& w, const DeltaObjective& obj,
                      std::span<const double> x_new) {
  if (x_new.size() != obj.arity()) {
    throw Error(Errc::shape, "iterate has length " + std::to_string(x_new.size()) +
                                 ", objective arity is " + std::to_string(obj.arity()));
  }
  for (double v : x_new) {
    if (!std::isfinite(v)) throw Error(Errc::invalid_input, "iterate must be finite");
  }
  StagnationWindow out = w;
  if (!out.iterates_.empty()) {
    const auto& prev = out.iterates_.back();
    out.pair_deltas_.push_back(obj.evaluate(prev, difference(x_new, prev)).delta());
  }
  out.iterates_.emplace_back(x_new.begin(), x_new.end());
  if (out.iterates_.size() > out.capacity_) {
    out.iterates_.erase(out.iterates_.begin());
    out.pair_deltas_.erase(out.pair_deltas_.begin());
  }
  return out;
}

bool stagnation_rule(double end_to_end, double telescoped, double trigger_factor) noexcept {
  if (!(telescoped < 0.0)) return false;
  return std::fabs(end_to_end) < std::fabs(telescoped) / trigger_factor;
}

StagnationCheck check_stagnation(const StagnationWindow& w, const DeltaObjective& obj) {
  const auto& it = w.iterates();
  if (it.size() < 3) {
    throw Error(Errc::state, "stagnation test needs 3 iterates, window holds " +
                                 std::to_string(it.size()));
  }
  StagnationCheck c;
  c.end_to_end = obj.evaluate(it.front(), difference(it.back(), it.front())).delta();
  for (double d : w.pair_deltas()) c.telescoped += d;
  c.stagnant = stagnation_rule(c.end_to_end, c.telescoped, w.trigger_factor());
  return c;
}

bool is_stagnant(const StagnationWindow& w, const DeltaObjective& obj) {
  return check_stagnation(w, obj).stagnant;
}

ExperimentReport run_quadratic_experiment(const QuadraticObjective& q,
                                          std::span<const double> x0,
                                          const ExperimentConfig& config) {
  if (x0.size() != q.size()) throw Error(Errc::shape, "x0 has the wrong length");
  for (double v : x0) {
    if (!std::isfinite(v)) throw Error(Errc::invalid_input, "x0 must be finite");
  }
  ExperimentReport report;
  report.minimizer = q.minimizer();

  std::size_t quiet = 0;
  double f_prev = q.value(x0);
  report.objective_rule =
      run_loop(q, x0, report.minimizer, config, [&](const std::vector<double>& x) {
        const double f = q.value(x);
        const double decrease = f_prev - f;
        quiet = decrease > config.objective_tolerance * std::fabs(f_prev) ? 0 : quiet + 1;
        f_prev = f;
        return quiet >= config.objective_patience;
      });

  const DeltaObjective obj = q.as_objective();
  StagnationWindow window(config.window, config.trigger_factor);
  window = push(window, obj, x0);
  report.delta_rule =
      run_loop(q, x0, report.minimizer, config, [&](const std::vector<double>& x) {
        window = push(window, obj, x);
        return window.iterates().size() >= 3 && is_stagnant(window, obj);
      });

  const double a = report.objective_rule.final_error;
  const double b = report.delta_rule.final_error;
  if (a == 0.0 && b == 0.0) {
    report.error_ratio = 1.0;
  } else {
    report.error_ratio = a / b;  // +inf when only the delta run is exact
  }
  return report;
}

std::string_view to_string(DescentMethod m) noexcept {
  return m == DescentMethod::newton ? "newton" : "sd";
}

std::string_view to_string(StopReason r) noexcept {
  switch (r) {
    case StopReason::max_iters: return "max_iters";
    case StopReason::stagnation: return "stagnation";
    case StopReason::zero_step: return "zero_step";
  }
  return "?";
}

}  // namespace cdd
