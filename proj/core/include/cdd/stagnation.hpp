#pragma once

// Stagnation detection from the telescoping identity
//   D_f(x1, x3 − x1) = D_f(x1, x2 − x1) + D_f(x2, x3 − x2)
// and a quadratic experiment comparing it with an objective-value rule.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "cdd/optim.hpp"

namespace cdd {

/// Pairs are stored forward, D_f(x_i, x_{i+1} − x_i), so a descending method
/// produces negative deltas.
class StagnationWindow {
 public:
  /// capacity >= 3 and trigger_factor > 1, else Errc::invalid_input.
  explicit StagnationWindow(std::size_t capacity = 3, double trigger_factor = 2.0);

  std::size_t capacity() const noexcept { return capacity_; }
  double trigger_factor() const noexcept { return trigger_factor_; }
  const std::vector<std::vector<double>>& iterates() const noexcept { return iterates_; }
  const std::vector<double>& pair_deltas() const noexcept { return pair_deltas_; }

 private:
  friend StagnationWindow push(const StagnationWindow&, const DeltaObjective&,
                               std::span<const double>);

  std::size_t capacity_;
  double trigger_factor_;
  std::vector<std::vector<double>> iterates_;
  std::vector<double> pair_deltas_;
};

/// Returns a new window with x_new appended and the oldest iterate evicted
/// beyond capacity. Throws Errc::shape / Errc::invalid_input on bad x_new.
StagnationWindow push(const StagnationWindow& w, const DeltaObjective& obj,
                      std::span<const double> x_new);

struct StagnationCheck {
  double end_to_end = 0.0;  // L = D_f(x_oldest, x_newest − x_oldest)
  double telescoped = 0.0;  // R = Σ pair deltas
  bool stagnant = false;
};

/// |L| < |R| / factor with R < 0.
bool stagnation_rule(double end_to_end, double telescoped, double trigger_factor) noexcept;

/// Throws Errc::state when the window holds fewer than 3 iterates.
StagnationCheck check_stagnation(const StagnationWindow& w, const DeltaObjective& obj);
bool is_stagnant(const StagnationWindow& w, const DeltaObjective& obj);

enum class DescentMethod { steepest_descent, newton };

enum class StopReason { max_iters, stagnation, zero_step };

struct ExperimentConfig {
  DescentMethod method = DescentMethod::steepest_descent;
  std::size_t max_iters = 1'000'000;
  std::size_t window = 3;
  double trigger_factor = 2.0;
  double objective_tolerance = 1e-15;  // relative decrease
  std::size_t objective_patience = 3;
};

struct RunResult {
  std::size_t iterations = 0;
  double final_error = 0.0;  // ‖x − x*‖₂ / ‖x*‖₂ (absolute when x* = 0)
  StopReason reason = StopReason::max_iters;
  std::vector<double> x;
};

struct ExperimentReport {
  std::vector<double> minimizer;
  RunResult objective_rule;
  RunResult delta_rule;
  /// objective_rule.final_error / delta_rule.final_error; 1 when both are 0.
  double error_ratio = 1.0;
};

/// Runs the descent loop twice from x0, once stopping on the objective-value
/// rule and once on is_stagnant with quadratic_delta. Throws Errc::numerical
/// if either run's error grows past 10× its starting error.
ExperimentReport run_quadratic_experiment(const QuadraticObjective& q,
                                          std::span<const double> x0,
                                          const ExperimentConfig& config = {});

std::string_view to_string(DescentMethod m) noexcept;
std::string_view to_string(StopReason r) noexcept;

}  // namespace cdd
