#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "hydrolab/environment.hpp"
#include "hydrolab/equilibrium.hpp"
#include "hydrolab/flux.hpp"
#include "hydrolab/lattice.hpp"
#include "hydrolab/riemann.hpp"
#include "hydrolab/simulation.hpp"

namespace hydrolab {

/// alpha = 1 everywhere with Q0 = delta_1.
struct HomogeneousEnv {};

struct IidEnv {
  DisorderLaw law;
  std::uint64_t seed = 1;
  std::optional<double> floor;
};

using EnvironmentSource = std::variant<HomogeneousEnv, DeterministicEnvSpec, IidEnv>;

/// Law Q0 (with floor c) that the source realises.
DisorderLaw source_law(const EnvironmentSource& src);
Environment realise(const EnvironmentSource& src, Window window);

struct ExperimentConfig {
  EnvironmentSource environment = HomogeneousEnv{};
  JumpRateSpec rate;
  double p = 1.0;
  FluxTableOptions flux;

  double lambda = 0.0;
  double rho = 0.0;
  double u = 0.0;

  std::vector<std::int64_t> scales{500, 1000, 2000, 4000};
  double horizon = 1.0;
  double window_lo = -2.0;
  double window_hi = 2.0;
  /// Block half-width l; unset means floor(sqrt(N)).
  std::optional<std::int64_t> block;
  int replicas = 1;
  std::uint64_t seed = 1;
  EquilibriumMode mode = EquilibriumMode::completed;
  std::optional<double> delta;

  /// Observer speed v for current experiments.
  double observer_speed = 0.0;
  /// Lattice margin beyond [A, B] N, in units of N T.
  double margin_speed = 3.0;
  double front_tolerance = 0.05;
  /// Worker threads; 0 picks hardware concurrency.
  unsigned threads = 0;

  /// Throws std::invalid_argument on a broken invariant.
  void validate() const;
  std::int64_t block_for(std::int64_t n) const;
  Window lattice_window(std::int64_t n) const;
  std::shared_ptr<const FluxTable> flux_table() const;
};

/// Replica seed, a pure function of the base seed, the scale and the replica index.
std::uint64_t replica_seed(std::uint64_t seed, std::int64_t n, int replica);

/// Block grid tiling [A N, B N] with blocks of 2l + 1 sites.
struct BlockGrid {
  std::int64_t half_width = 0;
  std::vector<std::int64_t> centers;
};
BlockGrid block_grid(double a, double b, std::int64_t n, std::int64_t l);

struct BoundaryReport {
  std::int64_t left_influence = 0;
  std::int64_t right_influence = 0;
  /// True when no boundary influence reached the observation region.
  bool clear = true;
};

struct ReplicaOutcome {
  std::vector<double> blocks;
  double l1 = 0.0;
  double l1_shock = 0.0;
  double current = 0.0;
  std::optional<double> front;
  BoundaryReport boundary;
  std::uint64_t events = 0;
  std::uint64_t digest = 0;
};

struct ScaleReport {
  std::int64_t n = 0;
  std::int64_t block = 0;
  std::vector<double> centers;      // macroscopic block centers x / N
  std::vector<double> reference;    // entropy solution at the centers, time T
  std::vector<bool> shock_cell;     // reference jumps inside the block
  std::vector<double> mean_blocks;  // replica mean of the block densities
  std::vector<ReplicaOutcome> replicas;
  /// Mean over replicas of the per-replica L1 distance, shock cells excluded.
  double l1 = 0.0;
  /// L1 distance of the replica-mean profile, shock cells excluded.
  double l1_of_mean = 0.0;
  /// L1 mass on the shock cells, reported separately.
  double l1_shock = 0.0;
  bool boundary_clear = true;
};

struct ProfileReport {
  std::uint64_t seed = 0;
  std::string config_digest;
  std::vector<ScaleReport> scales;
  std::vector<double> shock_speeds;
  nlohmann::json to_json() const;
};

struct CurrentScale {
  std::int64_t n = 0;
  double time = 0.0;
  std::vector<double> per_replica;  // Gamma / t
  double mean = 0.0;
  bool boundary_clear = true;
};

struct CurrentReport {
  std::uint64_t seed = 0;
  std::string config_digest;
  double observer_speed = 0.0;
  VariationalResult reference;
  std::vector<CurrentScale> scales;
  nlohmann::json to_json() const;
};

struct FrontScale {
  std::int64_t n = 0;
  std::vector<double> speeds;
  double mean_speed = 0.0;
  /// Replica mean block density on (u, u + 0.2 v_max T) scaled back to macroscopic units.
  double plateau = 0.0;
  bool boundary_clear = true;
};

struct FrontReport {
  std::uint64_t seed = 0;
  std::string config_digest;
  double critical_density = 0.0;
  double critical_speed = 0.0;
  std::vector<FrontScale> scales;
  nlohmann::json to_json() const;
};

/// Runs tasks 0..count-1 on a pool of worker threads; exceptions propagate.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task);

ProfileReport run_profile_experiment(const ExperimentConfig& cfg);
CurrentReport run_current_experiment(const ExperimentConfig& cfg);
FrontReport run_front_experiment(const ExperimentConfig& cfg);

}  // namespace hydrolab
