#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hydrolab/disorder.hpp"
#include "hydrolab/rates.hpp"

namespace hydrolab {

/// Averaged density R-bar(beta) = integral of R(beta / a) dQ0(a), beta in [0, c].
/// Returns +infinity when the integral diverges.
double averaged_density(const JumpRateSpec& g, const DisorderLaw& q0, double beta);
/// d R-bar / d beta, +infinity when divergent.
double averaged_density_derivative(const JumpRateSpec& g, const DisorderLaw& q0, double beta);
/// rho_c = R-bar(c), possibly +infinity.
double critical_density(const JumpRateSpec& g, const DisorderLaw& q0);

struct FluxModel {
  JumpRateSpec rate;
  DisorderLaw disorder;
  double p = 1.0;

  double q() const noexcept { return 1.0 - p; }
  double drift() const noexcept { return p - q(); }
};

struct FluxTableOptions {
  std::size_t grid_points = 4096;
  /// Upper end of the density grid; default max(2 rho_c, 8).
  std::optional<double> max_density;
};

/**
 * Tabulated macroscopic flux. Either backed by a FluxModel, in which case
 * off-grid values are exact, or by raw samples with linear interpolation.
 */
class FluxTable {
 public:
  static FluxTable from_model(const FluxModel& model, const FluxTableOptions& opts = {});
  /// Samples of f on an increasing grid ending at rho_c; f is constant beyond.
  static FluxTable from_samples(std::vector<double> densities, std::vector<double> flux,
                                double drift = 1.0);

  std::span<const double> densities() const noexcept { return rho_; }
  std::span<const double> fugacities() const noexcept { return beta_; }
  std::span<const double> averaged() const noexcept { return rbar_; }
  std::span<const double> values() const noexcept { return flux_; }

  double critical_density() const noexcept { return rho_c_; }
  bool critical_density_finite() const noexcept;
  double floor() const noexcept { return c_; }
  double p() const noexcept { return p_; }
  double q() const noexcept { return 1.0 - p_; }
  double drift() const noexcept { return 2.0 * p_ - 1.0; }
  double plateau() const noexcept { return plateau_; }
  double max_density() const noexcept { return rho_.back(); }
  const std::optional<FluxModel>& model() const noexcept { return model_; }

  /// Left derivative of f at rho_c, zero when it vanishes.
  double critical_left_derivative() const noexcept { return left_derivative_; }

  /// R-bar inverse on [0, rho_c); requires a model.
  double fugacity(double rho) const;
  /// Exact f(rho); throws "outside flux table" past a finite grid with infinite rho_c.
  double value(double rho) const;
  /// Piecewise linear interpolation of the tabulated flux.
  double interpolate(double rho) const;
  /// Second differences of the tabulated flux are <= tol.
  bool tabulated_concave(double tol = 1e-9) const;

 private:
  std::vector<double> rho_;
  std::vector<double> beta_;
  std::vector<double> rbar_;
  std::vector<double> flux_;
  double rho_c_ = 0.0;
  double c_ = 0.0;
  double p_ = 1.0;
  double plateau_ = 0.0;
  double left_derivative_ = 0.0;
  double beta_top_ = 0.0;
  std::optional<FluxModel> model_;
};

double flux_value(const FluxTable& table, double rho);
/// v_c(rho) = inf over r in [rho, rho_c) of the chord slope to rho_c.
double critical_speed(const FluxTable& table, double rho = 0.0);

}  // namespace hydrolab
