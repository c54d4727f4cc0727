#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "hydrolab/flux.hpp"

namespace hydrolab {

struct RiemannProblem {
  double left = 0.0;    // lambda
  double right = 0.0;   // rho
  double center = 0.0;  // u
  std::shared_ptr<const FluxTable> flux;
};

/// G(v) together with the extremiser interval [h(v-), h(v+)] in profile order.
struct VariationalResult {
  double value = 0.0;
  double h_minus = 0.0;
  double h_plus = 0.0;
  bool near_tie = false;
};

/**
 * Variational solution of a Riemann problem. Precomputes f on a grid over
 * [min(lambda, rho), max(lambda, rho)] with rho_c inserted as a node.
 */
class RiemannSolver {
 public:
  explicit RiemannSolver(RiemannProblem problem, std::size_t grid_points = 4096);

  const RiemannProblem& problem() const noexcept { return problem_; }
  bool increasing() const noexcept { return problem_.left <= problem_.right; }

  VariationalResult variational(double v) const;
  /// h(v+) at v = (x - u) / t.
  double profile(double x, double t) const;
  /// Speeds in [v_lo, v_hi] where the extremiser jumps by more than jump_tol.
  std::vector<double> shock_speeds(double v_lo, double v_hi, double jump_tol = 1e-3) const;

 private:
  double objective(double r, double v) const;
  double refine(std::size_t idx, double v, double& best_value) const;

  RiemannProblem problem_;
  std::vector<double> grid_;
  std::vector<double> flux_;
};

VariationalResult variational_G(const RiemannProblem& problem, double v);
double riemann_profile(const RiemannProblem& problem, double x, double t);

/// Upper concave envelope of (x_i, y_i), evaluated at every x_i.
std::vector<double> concave_envelope(const std::vector<double>& x, const std::vector<double>& y);

/// Piecewise constant profile: values[0] left of breaks[0], values[i] on [breaks[i-1], breaks[i]).
struct PiecewiseConstant {
  std::vector<double> breaks;
  std::vector<double> values;

  double operator()(double x) const;
  /// Exact average over [a, b].
  double average(double a, double b) const;
};

struct GodunovOptions {
  double x_min = -2.0;
  double x_max = 2.0;
  double dx = 1.0 / 400.0;
  double cfl = 0.5;
  /// 1: first-order upwind; 2: limited linear reconstruction with Heun steps.
  int order = 2;
};

struct GodunovResult {
  std::vector<double> centers;
  std::vector<double> density;
  double mass_initial = 0.0;
  double mass_final = 0.0;
  double boundary_inflow = 0.0;
  std::size_t steps = 0;
};

/// Upwind finite volumes for d_t rho + d_x f(rho) = 0 on a padded window.
GodunovResult godunov_solve(const FluxTable& flux, const PiecewiseConstant& initial, double horizon,
                            const GodunovOptions& opts = {});

}  // namespace hydrolab
