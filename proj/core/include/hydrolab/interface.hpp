#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hydrolab/equilibrium.hpp"
#include "hydrolab/simulation.hpp"

namespace hydrolab {

class InterfaceInvariantError : public std::logic_error {
 public:
  explicit InterfaceInvariantError(const std::string& what)
      : std::logic_error("interface invariant violated: " + what) {}
};

struct InterfaceOptions {
  std::size_t grid_size = 64;
  /// Full sandwich sweep period in events; 0 means the window size.
  std::uint64_t check_every = 0;
  /// Tolerances of the rescaled-profile comparison.
  double epsilon = 0.05;
  double delta = 0.1;
};

struct InterfaceSnapshot {
  double time = 0.0;
  std::vector<std::int64_t> positions;
};

/// Step profile read off interface positions: R^-(x) and R^+(x).
struct InverseProfile {
  std::vector<double> levels;
  std::vector<std::int64_t> positions;

  double minus(double x) const;
  double plus(double x) const;
};

struct RescaledProfile {
  double s = 0.0;
  double t_scale = 1.0;
  double center = 0.0;
  std::vector<double> levels;
  std::vector<double> x;  // X_r / t
  InverseProfile inverse;

  double rho_minus(double y) const { return inverse.minus(y * t_scale); }
  double rho_plus(double y) const { return inverse.plus(y * t_scale); }
};

/**
 * Interfaces X_r between a Riemann copy eta and equilibria xi^r, r on a grid
 * running from lambda to rho. Copy 0 of the ensemble is eta and copy k + 1
 * is xi^{r_k}. Positions are nondecreasing in k.
 */
class InterfaceFamily : public EventObserver {
 public:
  InterfaceFamily(std::vector<double> levels, double u, double t_scale, bool increasing,
                  InterfaceOptions opts = {});

  void before_event(const HarrisEvent& ev, const CoupledEnsemble& ens) override;
  void after_event(const HarrisEvent& ev, const CoupledEnsemble& ens) override;

  const std::vector<double>& levels() const noexcept { return levels_; }
  const std::vector<std::int64_t>& positions() const noexcept { return pos_; }
  std::int64_t origin() const noexcept { return origin_; }
  double t_scale() const noexcept { return t_scale_; }
  bool increasing() const noexcept { return increasing_; }
  std::int64_t upper_counter() const noexcept { return upper_ - origin_; }
  std::int64_t lower_counter() const noexcept { return origin_ - lower_; }
  std::uint64_t moves() const noexcept { return moves_; }
  std::uint64_t checks() const noexcept { return checks_; }
  const InterfaceOptions& options() const noexcept { return opts_; }

  /// Sandwich and ordering over the whole window; throws on breach.
  void verify(const CoupledEnsemble& ens) const;

  InverseProfile inverse_profile() const { return InverseProfile{levels_, pos_}; }
  void record(double time);
  const std::vector<InterfaceSnapshot>& snapshots() const noexcept { return history_; }
  /// Snapshot at micro time s * t_scale; throws "horizon exceeded" past the record.
  RescaledProfile rescaled(double s_macro) const;

 private:
  void check_sites(const CoupledEnsemble& ens, std::int64_t a, std::int64_t b) const;

  std::vector<double> levels_;
  std::vector<std::int64_t> pos_;
  std::vector<int> pending_;
  std::int64_t origin_ = 0;
  double u_ = 0.0;
  double t_scale_ = 1.0;
  bool increasing_ = true;
  InterfaceOptions opts_;
  std::int64_t upper_ = 0;
  std::int64_t lower_ = 0;
  std::uint64_t moves_ = 0;
  mutable std::uint64_t checks_ = 0;
  std::uint64_t seen_ = 0;
  std::vector<InterfaceSnapshot> history_;
};

/// Evenly spaced levels from lambda to rho inclusive.
std::vector<double> interface_levels(double lambda, double rho, std::size_t grid_size);

/// Ensemble with copy 0 the Riemann datum and copies 1..K the equilibria at the levels.
struct InterfaceSetup {
  std::unique_ptr<CoupledEnsemble> ensemble;
  std::unique_ptr<InterfaceFamily> family;
};

InterfaceSetup init_family(const EquilibriumSampler& sampler, std::shared_ptr<const Environment> env,
                           Dynamics dynamics, double lambda, double rho, double u, double t_scale,
                           Window window, std::uint64_t seed, InterfaceOptions opts = {},
                           std::vector<double> levels = {});

/// Ordered-copy invariant used by the property suites.
bool interface_ordered(const InterfaceFamily& family);

}  // namespace hydrolab
