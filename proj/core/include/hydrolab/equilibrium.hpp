#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "hydrolab/environment.hpp"
#include "hydrolab/flux.hpp"
#include "hydrolab/lattice.hpp"

namespace hydrolab {

enum class EquilibriumMode {
  stationary,  // xi(x) ~ theta at R-bar^{-1}(rho) / alpha(x); needs rho < rho_c
  pseudo,      // xi(x) ~ theta at R^{-1}(rho), ignoring alpha
  completed,   // stationary at rho_c - delta plus pseudo for the excess
};

/**
 * Monotone family rho -> xi^rho built from shared site uniforms V^x (and W^x
 * for the pseudo excess), so xi^rho <= xi^rho' whenever rho <= rho'.
 * The uniforms depend only on (seed, x).
 */
class EquilibriumSampler {
 public:
  /// delta defaults to 0.05 rho_c when rho_c is finite.
  EquilibriumSampler(std::shared_ptr<const Environment> env, std::shared_ptr<const FluxTable> flux,
                     EquilibriumMode mode, std::uint64_t seed, std::optional<double> delta = std::nullopt);

  Occupancy site(std::int64_t x, double rho) const;
  LatticeState sample(double rho, Window window) const;
  LatticeState sample(double rho) const { return sample(rho, env_->window()); }

  EquilibriumMode mode() const noexcept { return mode_; }
  double delta() const noexcept { return delta_; }

 private:
  Occupancy stationary_site(std::int64_t x, double beta_bar) const;
  Occupancy pseudo_site(std::int64_t x, double beta) const;

  std::shared_ptr<const Environment> env_;
  std::shared_ptr<const FluxTable> flux_;
  EquilibriumMode mode_;
  std::uint64_t seed_;
  double delta_ = 0.0;
};

LatticeState sample_equilibrium(std::shared_ptr<const Environment> env, std::shared_ptr<const FluxTable> flux,
                                double rho, EquilibriumMode mode, std::uint64_t seed,
                                std::optional<double> delta = std::nullopt);

/// xi^lambda on x <= floor(u t) and xi^rho beyond, from one sampler.
LatticeState riemann_initial(const EquilibriumSampler& sampler, double lambda, double rho, double u, double t,
                             Window window);

/// Reservoirs on x <= y, empty beyond, with an absorbing left exterior.
LatticeState source_config(Window window, std::int64_t y);

/// Lattice window covering [a t, b t] plus margin ceil(speed * horizon) on each side.
Window padded_window(double a, double b, double t, double horizon, double speed = 3.0);

}  // namespace hydrolab
