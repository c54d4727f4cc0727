#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "hydrolab/environment.hpp"
#include "hydrolab/lattice.hpp"
#include "hydrolab/random.hpp"
#include "hydrolab/rates.hpp"

namespace hydrolab {

/// Harris construction event: site x rings at time t with mark u and direction z.
struct HarrisEvent {
  double time = 0.0;
  std::int64_t site = 0;
  double mark = 0.0;
  int direction = 1;
};

struct Dynamics {
  JumpRateSpec rate;
  double p = 1.0;
};

/// Path s -> floor(origin + speed * (s - start)).
struct PathSpec {
  double origin = 0.0;
  double speed = 0.0;
  double start = 0.0;

  static PathSpec fixed(std::int64_t site, double start = 0.0);
  /// floor(u * t + v * (s - start)).
  static PathSpec scaled(double u, double v, double t, double start = 0.0);
  std::int64_t position(double s) const;
};

class CoupledEnsemble;

class EventObserver {
 public:
  virtual ~EventObserver() = default;
  virtual void before_event(const HarrisEvent&, const CoupledEnsemble&) {}
  virtual void after_event(const HarrisEvent&, const CoupledEnsemble&) {}
};

struct EnsembleOptions {
  /// Count accepted jumps without applying them.
  bool frozen = false;
};

struct CopyCounters {
  std::uint64_t accepted = 0;
  std::uint64_t suppressed = 0;
  std::uint64_t absorbed = 0;
};

/**
 * Copies of the process driven by one Harris event stream on a common window.
 *
 * Events arrive at total rate |window|, each at a uniform site. A copy jumps
 * from x to x + z iff mark <= alpha(x) g(eta(x)). Paths registered with
 * track_current move before events at equal times.
 */
class CoupledEnsemble {
 public:
  CoupledEnsemble(std::shared_ptr<const Environment> env, Dynamics dynamics,
                  std::vector<LatticeState> copies, std::uint64_t seed, EnsembleOptions opts = {});
  virtual ~CoupledEnsemble() = default;

  void evolve(double duration) { evolve_until(time_ + duration); }
  void evolve_until(double t);

  double time() const noexcept { return time_; }
  std::size_t copies() const noexcept { return states_.size(); }
  const LatticeState& state(std::size_t k) const { return states_.at(k); }
  const std::vector<LatticeState>& states() const noexcept { return states_; }
  const Environment& environment() const noexcept { return *env_; }
  const Dynamics& dynamics() const noexcept { return dyn_; }
  const Window& window() const noexcept { return window_; }
  std::uint64_t seed() const noexcept { return seed_; }

  double rate_at(std::int64_t x, Occupancy n) const noexcept {
    return env_->operator()(x) * g(n);
  }

  /// Registers the current across a path from the present time on copy k.
  std::size_t track_current(const PathSpec& path, std::size_t copy = 0);
  std::int64_t current(std::size_t tracker) const { return trackers_.at(tracker).count; }
  std::int64_t path_position(std::size_t tracker) const { return trackers_.at(tracker).position; }

  void add_observer(EventObserver* obs);
  void remove_observer(EventObserver* obs);

  std::uint64_t events() const noexcept { return events_; }
  std::uint64_t event_digest() const noexcept { return digest_; }
  const CopyCounters& counters(std::size_t k) const { return counters_.at(k); }
  /// Rightmost site reachable by influence from the left edge, and leftmost from the right.
  std::int64_t left_influence() const noexcept { return left_front_; }
  std::int64_t right_influence() const noexcept { return right_front_; }

 protected:
  LatticeState& mutable_state(std::size_t k) { return states_.at(k); }

 private:
  struct Tracker {
    PathSpec path;
    std::size_t copy = 0;
    std::int64_t position = 0;
    std::int64_t count = 0;
    double next_jump = 0.0;
  };

  double g(Occupancy n) const noexcept {
    if (n == kInfiniteOccupancy) return 1.0;
    return static_cast<std::size_t>(n) < gtab_.size() ? gtab_[static_cast<std::size_t>(n)] : 1.0;
  }
  void advance_paths(double t);
  void schedule(Tracker& tr) const;
  void apply(const HarrisEvent& ev);

  std::shared_ptr<const Environment> env_;
  Dynamics dyn_;
  std::vector<LatticeState> states_;
  Window window_;
  std::vector<double> gtab_;
  std::uint64_t seed_;
  EnsembleOptions opts_;
  Rng rng_;
  double time_ = 0.0;
  double next_time_ = 0.0;
  std::uint64_t events_ = 0;
  std::uint64_t digest_ = 0xcbf29ce484222325ULL;
  std::vector<CopyCounters> counters_;
  std::vector<Tracker> trackers_;
  std::vector<EventObserver*> observers_;
  std::int64_t left_front_ = 0;
  std::int64_t right_front_ = 0;
};

/// A single copy of the process.
class Simulation : public CoupledEnsemble {
 public:
  Simulation(std::shared_ptr<const Environment> env, Dynamics dynamics, LatticeState initial,
             std::uint64_t seed, EnsembleOptions opts = {});
  const LatticeState& state() const { return CoupledEnsemble::state(0); }
};

CoupledEnsemble couple(std::vector<LatticeState> states, std::shared_ptr<const Environment> env,
                       Dynamics dynamics, std::uint64_t seed);

/// Evolves until t1 and returns the current across path accumulated from the present time.
std::int64_t current(CoupledEnsemble& sim, const PathSpec& path, double t1, std::size_t copy = 0);

/// Sum over x > path position of eta(x), for the mass identity.
std::int64_t mass_right_of(const LatticeState& state, std::int64_t position);

}  // namespace hydrolab
