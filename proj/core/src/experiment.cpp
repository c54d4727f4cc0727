#include "hydrolab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "hydrolab/config.hpp"
#include "hydrolab/random.hpp"

namespace hydrolab {

DisorderLaw source_law(const EnvironmentSource& src) {
  if (std::holds_alternative<HomogeneousEnv>(src)) return DisorderLaw::dirac(1.0);
  if (const auto* d = std::get_if<DeterministicEnvSpec>(&src)) return d->law;
  const auto& iid = std::get<IidEnv>(src);
  return iid.floor ? iid.law.with_floor(*iid.floor) : iid.law;
}

Environment realise(const EnvironmentSource& src, Window window) {
  if (std::holds_alternative<HomogeneousEnv>(src)) {
    return Environment(window, std::vector<double>(static_cast<std::size_t>(window.size()), 1.0),
                       DisorderLaw::dirac(1.0), {}, {{"kind", "homogeneous"}});
  }
  if (const auto* d = std::get_if<DeterministicEnvSpec>(&src)) return build_deterministic(*d, window);
  const auto& iid = std::get<IidEnv>(src);
  return sample_iid(iid.law, iid.seed, window, iid.floor);
}

void ExperimentConfig::validate() const {
  if (scales.empty()) throw std::invalid_argument("experiment needs at least one scale");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (scales[i] <= 0) throw std::invalid_argument("scales must be positive");
    if (i > 0 && scales[i] <= scales[i - 1]) throw std::invalid_argument("scales must be increasing");
  }
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (!(window_lo < window_hi)) throw std::invalid_argument("observation window must satisfy A < B");
  if (u < window_lo || u > window_hi) throw std::invalid_argument("center u outside the observation window");
  if (replicas < 1) throw std::invalid_argument("replicas must be at least 1");
  if (!(p >= 0.5 && p <= 1.0)) throw std::invalid_argument("drift needs p in [1/2, 1]");
  if (!(lambda >= 0.0 && rho >= 0.0)) throw std::invalid_argument("densities must be nonnegative");
  if (block && *block < 0) throw std::invalid_argument("block half-width must be nonnegative");
  if (!(margin_speed >= 0.0)) throw std::invalid_argument("margin speed must be nonnegative");
  if (!(front_tolerance > 0.0)) throw std::invalid_argument("front tolerance must be positive");
  if (delta && !(*delta >= 0.0)) throw std::invalid_argument("delta must be nonnegative");
}

std::int64_t ExperimentConfig::block_for(std::int64_t n) const {
  if (block) return *block;
  return static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(n))));
}

Window ExperimentConfig::lattice_window(std::int64_t n) const {
  const double nd = static_cast<double>(n);
  const auto margin = static_cast<std::int64_t>(std::ceil(margin_speed * nd * horizon)) + block_for(n) + 2;
  return Window{static_cast<std::int64_t>(std::floor(window_lo * nd)) - margin,
                static_cast<std::int64_t>(std::ceil(window_hi * nd)) + margin};
}

std::shared_ptr<const FluxTable> ExperimentConfig::flux_table() const {
  return std::make_shared<const FluxTable>(FluxTable::from_model(FluxModel{rate, source_law(environment), p}, flux));
}

std::uint64_t replica_seed(std::uint64_t seed, std::int64_t n, int replica) {
  return derive_seed(seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(replica));
}

BlockGrid block_grid(double a, double b, std::int64_t n, std::int64_t l) {
  BlockGrid grid;
  grid.half_width = l;
  const double nd = static_cast<double>(n);
  const auto lo = static_cast<std::int64_t>(std::ceil(a * nd));
  const auto hi = static_cast<std::int64_t>(std::floor(b * nd));
  for (std::int64_t c = lo + l; c + l <= hi; c += 2 * l + 1) grid.centers.push_back(c);
  return grid;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

namespace {

struct ScaleSetup {
  std::int64_t n = 0;
  Window window;
  std::shared_ptr<const Environment> env;
  BlockGrid grid;
  std::vector<double> reference;
  std::vector<bool> shock_cell;
};

struct Run {
  const ExperimentConfig& cfg;
  std::shared_ptr<const FluxTable> flux;
  RiemannSolver solver;
  std::vector<double> shocks;
  std::vector<ScaleSetup> setups;

  explicit Run(const ExperimentConfig& c)
      : cfg(c), flux(c.flux_table()), solver(RiemannProblem{c.lambda, c.rho, c.u, flux}) {
    cfg.validate();
    const double reach = std::max(std::abs(cfg.window_lo - cfg.u), std::abs(cfg.window_hi - cfg.u)) / cfg.horizon;
    if (cfg.lambda != cfg.rho) shocks = solver.shock_speeds(-reach - 1.0, reach + 1.0);
    for (std::int64_t n : cfg.scales) {
      ScaleSetup s;
      s.n = n;
      s.window = cfg.lattice_window(n);
      s.env = std::make_shared<const Environment>(realise(cfg.environment, s.window));
      s.grid = block_grid(cfg.window_lo, cfg.window_hi, n, cfg.block_for(n));
      const double nd = static_cast<double>(n);
      const auto l = s.grid.half_width;
      for (std::int64_t c : s.grid.centers) {
        s.reference.push_back(solver.profile(static_cast<double>(c) / nd, cfg.horizon));
        const double a = static_cast<double>(c - l) / nd;
        const double b = static_cast<double>(c + l + 1) / nd;
        bool shock = false;
        for (double v : shocks) {
          const double x = cfg.u + v * cfg.horizon;
          shock = shock || (x >= a && x <= b);
        }
        s.shock_cell.push_back(shock);
      }
      setups.push_back(std::move(s));
    }
  }

  ReplicaOutcome replica(std::size_t scale, int r, const std::optional<double>& observer) const {
    const ScaleSetup& s = setups[scale];
    const std::uint64_t rs = replica_seed(cfg.seed, s.n, r);
    EquilibriumSampler sampler(s.env, flux, cfg.mode, derive_seed(rs, 1), cfg.delta);
    const double nd = static_cast<double>(s.n);
    Simulation sim(s.env, Dynamics{cfg.rate, cfg.p},
                   riemann_initial(sampler, cfg.lambda, cfg.rho, cfg.u, nd, s.window), derive_seed(rs, 2));
    std::optional<std::size_t> tracker;
    if (observer) tracker = sim.track_current(PathSpec::scaled(cfg.u, *observer, nd));
    const double t = nd * cfg.horizon;
    sim.evolve(t);

    ReplicaOutcome out;
    const auto l = s.grid.half_width;
    const double cell = static_cast<double>(2 * l + 1) / nd;
    for (std::size_t i = 0; i < s.grid.centers.size(); ++i) {
      const double b = block_density(sim.state(), s.grid.centers[i], l);
      out.blocks.push_back(b);
      const double e = std::abs(b - s.reference[i]) * cell;
      (s.shock_cell[i] ? out.l1_shock : out.l1) += e;
    }
    if (tracker) out.current = static_cast<double>(sim.current(*tracker)) / t;
    const double threshold = flux->critical_density() - cfg.front_tolerance;
    for (std::size_t i = s.grid.centers.size(); i-- > 0;) {
      if (out.blocks[i] >= threshold) {
        out.front = static_cast<double>(s.grid.centers[i]) / nd;
        break;
      }
    }
    out.boundary.left_influence = sim.left_influence();
    out.boundary.right_influence = sim.right_influence();
    const std::int64_t first = s.grid.centers.empty() ? 0 : s.grid.centers.front() - l;
    const std::int64_t last = s.grid.centers.empty() ? 0 : s.grid.centers.back() + l;
    std::int64_t lo = first;
    std::int64_t hi = last;
    if (tracker) {
      lo = std::min(lo, PathSpec::scaled(cfg.u, *observer, nd).position(0.0));
      hi = std::max(hi, sim.path_position(*tracker) + 1);
    }
    out.boundary.clear = out.boundary.left_influence < lo && out.boundary.right_influence > hi;
    out.events = sim.events();
    out.digest = sim.event_digest();
    return out;
  }

  std::vector<std::vector<ReplicaOutcome>> run_all(const std::optional<double>& observer) const {
    std::vector<std::vector<ReplicaOutcome>> results(setups.size(),
                                                     std::vector<ReplicaOutcome>(static_cast<std::size_t>(cfg.replicas)));
    const auto per = static_cast<std::size_t>(cfg.replicas);
    parallel_for(setups.size() * per, cfg.threads, [&](std::size_t task) {
      const std::size_t scale = task / per;
      const int r = static_cast<int>(task % per);
      results[scale][static_cast<std::size_t>(r)] = replica(scale, r, observer);
    });
    return results;
  }
};

nlohmann::json boundary_json(const std::vector<ReplicaOutcome>& reps) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reps)
    arr.push_back({{"left_influence", r.boundary.left_influence},
                   {"right_influence", r.boundary.right_influence},
                   {"clear", r.boundary.clear},
                   {"events", r.events},
                   {"event_digest", r.digest}});
  return arr;
}

}  // namespace

ProfileReport run_profile_experiment(const ExperimentConfig& cfg) {
  const Run run(cfg);
  const auto results = run.run_all(std::nullopt);
  ProfileReport rep;
  rep.seed = cfg.seed;
  rep.config_digest = config_digest(to_json(cfg));
  rep.shock_speeds = run.shocks;
  for (std::size_t k = 0; k < run.setups.size(); ++k) {
    const ScaleSetup& s = run.setups[k];
    ScaleReport sr;
    sr.n = s.n;
    sr.block = s.grid.half_width;
    const double nd = static_cast<double>(s.n);
    for (std::int64_t c : s.grid.centers) sr.centers.push_back(static_cast<double>(c) / nd);
    sr.reference = s.reference;
    sr.shock_cell = s.shock_cell;
    sr.replicas = results[k];
    sr.mean_blocks.assign(s.grid.centers.size(), 0.0);
    const double reps = static_cast<double>(cfg.replicas);
    for (const auto& r : sr.replicas) {
      sr.l1 += r.l1 / reps;
      sr.l1_shock += r.l1_shock / reps;
      sr.boundary_clear = sr.boundary_clear && r.boundary.clear;
      for (std::size_t i = 0; i < r.blocks.size(); ++i) sr.mean_blocks[i] += r.blocks[i] / reps;
    }
    const double cell = static_cast<double>(2 * sr.block + 1) / nd;
    for (std::size_t i = 0; i < sr.mean_blocks.size(); ++i)
      if (!sr.shock_cell[i]) sr.l1_of_mean += std::abs(sr.mean_blocks[i] - sr.reference[i]) * cell;
    rep.scales.push_back(std::move(sr));
  }
  return rep;
}

CurrentReport run_current_experiment(const ExperimentConfig& cfg) {
  if (!(cfg.observer_speed < 1.0)) throw std::invalid_argument("observer speed must satisfy v < 1");
  const double reach_lo = cfg.u + std::min(0.0, cfg.observer_speed) * cfg.horizon;
  const double reach_hi = cfg.u + std::max(0.0, cfg.observer_speed) * cfg.horizon;
  if (reach_lo < cfg.window_lo || reach_hi > cfg.window_hi)
    throw std::invalid_argument("observer path leaves the observation window");
  const Run run(cfg);
  const auto results = run.run_all(cfg.observer_speed);
  CurrentReport rep;
  rep.seed = cfg.seed;
  rep.config_digest = config_digest(to_json(cfg));
  rep.observer_speed = cfg.observer_speed;
  rep.reference = run.solver.variational(cfg.observer_speed);
  for (std::size_t k = 0; k < run.setups.size(); ++k) {
    CurrentScale cs;
    cs.n = run.setups[k].n;
    cs.time = static_cast<double>(cs.n) * cfg.horizon;
    for (const auto& r : results[k]) {
      cs.per_replica.push_back(r.current);
      cs.mean += r.current / static_cast<double>(cfg.replicas);
      cs.boundary_clear = cs.boundary_clear && r.boundary.clear;
    }
    rep.scales.push_back(std::move(cs));
  }
  return rep;
}

FrontReport run_front_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto flux = cfg.flux_table();
  const double rc = flux->critical_density();
  if (!std::isfinite(rc) || cfg.lambda < rc || cfg.rho > rc)
    throw std::domain_error("plateau absent: front experiment needs lambda >= rho_c >= rho");
  const Run run(cfg);
  const auto results = run.run_all(std::nullopt);
  FrontReport rep;
  rep.seed = cfg.seed;
  rep.config_digest = config_digest(to_json(cfg));
  rep.critical_density = rc;
  rep.critical_speed = cfg.rho < rc ? critical_speed(*flux, cfg.rho) : 0.0;
  for (std::size_t k = 0; k < run.setups.size(); ++k) {
    const ScaleSetup& s = run.setups[k];
    FrontScale fs;
    fs.n = s.n;
    const double nd = static_cast<double>(s.n);
    double plateau_sum = 0.0;
    std::size_t plateau_count = 0;
    for (const auto& r : results[k]) {
      if (!r.front) throw std::domain_error("plateau absent: no block reaches rho_c - tolerance");
      const double speed = (*r.front - cfg.u) / cfg.horizon;
      fs.speeds.push_back(speed);
      fs.mean_speed += speed / static_cast<double>(cfg.replicas);
      fs.boundary_clear = fs.boundary_clear && r.boundary.clear;
      for (std::size_t i = 0; i < s.grid.centers.size(); ++i) {
        const double x = static_cast<double>(s.grid.centers[i]) / nd;
        if (x > cfg.u && x < cfg.u + 0.2 * cfg.horizon) {
          plateau_sum += r.blocks[i];
          ++plateau_count;
        }
      }
    }
    fs.plateau = plateau_count ? plateau_sum / static_cast<double>(plateau_count) : 0.0;
    rep.scales.push_back(std::move(fs));
  }
  return rep;
}

nlohmann::json ProfileReport::to_json() const {
  nlohmann::json scales_json = nlohmann::json::array();
  for (const auto& s : scales) {
    nlohmann::json l1s = nlohmann::json::array();
    for (const auto& r : s.replicas) l1s.push_back(r.l1);
    scales_json.push_back({{"n", s.n},
                           {"block", s.block},
                           {"l1", s.l1},
                           {"l1_of_mean", s.l1_of_mean},
                           {"l1_shock", s.l1_shock},
                           {"l1_per_replica", l1s},
                           {"boundary_clear", s.boundary_clear},
                           {"replicas", boundary_json(s.replicas)}});
  }
  return {{"kind", "profile"},
          {"seed", seed},
          {"config_digest", config_digest},
          {"shock_speeds", shock_speeds},
          {"scales", scales_json}};
}

nlohmann::json CurrentReport::to_json() const {
  nlohmann::json scales_json = nlohmann::json::array();
  for (const auto& s : scales)
    scales_json.push_back({{"n", s.n},
                           {"time", s.time},
                           {"current_per_time", s.mean},
                           {"per_replica", s.per_replica},
                           {"deviation", s.mean - reference.value},
                           {"boundary_clear", s.boundary_clear}});
  return {{"kind", "current"},
          {"seed", seed},
          {"config_digest", config_digest},
          {"observer_speed", observer_speed},
          {"reference_G", reference.value},
          {"extremisers", {reference.h_minus, reference.h_plus}},
          {"scales", scales_json}};
}

nlohmann::json FrontReport::to_json() const {
  nlohmann::json scales_json = nlohmann::json::array();
  for (const auto& s : scales)
    scales_json.push_back({{"n", s.n},
                           {"mean_speed", s.mean_speed},
                           {"speeds", s.speeds},
                           {"plateau", s.plateau},
                           {"boundary_clear", s.boundary_clear}});
  return {{"kind", "front"},
          {"seed", seed},
          {"config_digest", config_digest},
          {"critical_density", critical_density},
          {"critical_speed", critical_speed},
          {"scales", scales_json}};
}

}  // namespace hydrolab
