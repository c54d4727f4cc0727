#include "hydrolab/simulation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hydrolab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// FNV-1a over 64-bit words.
inline std::uint64_t fnv_mix(std::uint64_t h, std::uint64_t v) noexcept {
  h ^= v;
  h *= 0x100000001b3ULL;
  return h ^ (h >> 29);
}

}  // namespace

PathSpec PathSpec::fixed(std::int64_t site, double start) {
  return PathSpec{static_cast<double>(site), 0.0, start};
}

PathSpec PathSpec::scaled(double u, double v, double t, double start) {
  return PathSpec{u * t, v, start};
}

std::int64_t PathSpec::position(double s) const {
  return static_cast<std::int64_t>(std::floor(origin + speed * (s - start)));
}

CoupledEnsemble::CoupledEnsemble(std::shared_ptr<const Environment> env, Dynamics dynamics,
                                 std::vector<LatticeState> copies, std::uint64_t seed, EnsembleOptions opts)
    : env_(std::move(env)), dyn_(std::move(dynamics)), states_(std::move(copies)), seed_(seed),
      opts_(opts), rng_(seed) {
  if (!env_) throw std::invalid_argument("ensemble needs an environment");
  if (states_.empty()) throw std::invalid_argument("ensemble needs at least one copy");
  if (!(dyn_.p >= 0.0 && dyn_.p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  window_ = states_.front().window();
  for (const auto& s : states_)
    if (!(s.window() == window_)) throw std::invalid_argument("copies on different windows");
  if (!env_->contains(window_.lo) || !env_->contains(window_.hi))
    throw std::invalid_argument("environment does not cover the lattice window");
  gtab_.push_back(0.0);
  for (double v : dyn_.rate.prefix()) gtab_.push_back(v);
  counters_.resize(states_.size());
  left_front_ = window_.lo;
  right_front_ = window_.hi;
  next_time_ = rng_.exponential(static_cast<double>(window_.size()));
}

void CoupledEnsemble::add_observer(EventObserver* obs) {
  if (obs) observers_.push_back(obs);
}

void CoupledEnsemble::remove_observer(EventObserver* obs) {
  observers_.erase(std::remove(observers_.begin(), observers_.end(), obs), observers_.end());
}

std::size_t CoupledEnsemble::track_current(const PathSpec& path, std::size_t copy) {
  if (copy >= states_.size()) throw std::out_of_range("no such copy");
  Tracker tr;
  tr.path = path;
  tr.copy = copy;
  tr.position = path.position(time_);
  if (tr.position < window_.lo - 1 || tr.position > window_.hi)
    throw std::out_of_range("path outside lattice window");
  schedule(tr);
  trackers_.push_back(tr);
  return trackers_.size() - 1;
}

void CoupledEnsemble::schedule(Tracker& tr) const {
  const PathSpec& p = tr.path;
  if (p.speed > 0.0) {
    tr.next_jump = p.start + (static_cast<double>(tr.position + 1) - p.origin) / p.speed;
  } else if (p.speed < 0.0) {
    tr.next_jump = p.start + (static_cast<double>(tr.position) - p.origin) / p.speed;
  } else {
    tr.next_jump = kInf;
  }
  tr.next_jump = std::max(tr.next_jump, time_);
}

void CoupledEnsemble::advance_paths(double t) {
  for (auto& tr : trackers_) {
    while (tr.next_jump <= t) {
      const LatticeState& s = states_[tr.copy];
      if (tr.path.speed > 0.0) {
        const std::int64_t y = tr.position + 1;
        if (!s.contains(y)) throw std::out_of_range("path left the lattice window");
        if (s[y] == kInfiniteOccupancy) throw std::domain_error("path crosses an infinite site");
        tr.count -= s[y];
        tr.position = y;
      } else {
        const std::int64_t y = tr.position;
        if (!s.contains(y)) throw std::out_of_range("path left the lattice window");
        if (s[y] == kInfiniteOccupancy) throw std::domain_error("path crosses an infinite site");
        tr.count += s[y];
        tr.position = y - 1;
      }
      const double now = tr.next_jump;
      const PathSpec& p = tr.path;
      tr.next_jump = p.speed > 0.0
                         ? p.start + (static_cast<double>(tr.position + 1) - p.origin) / p.speed
                         : p.start + (static_cast<double>(tr.position) - p.origin) / p.speed;
      tr.next_jump = std::max(tr.next_jump, std::nextafter(now, kInf));
    }
  }
}

void CoupledEnsemble::evolve_until(double t) {
  if (t < time_) throw std::domain_error("cannot evolve backwards");
  const auto w = static_cast<std::uint64_t>(window_.size());
  const double total_rate = static_cast<double>(w);
  while (next_time_ <= t) {
    if (!trackers_.empty()) advance_paths(next_time_);
    HarrisEvent ev;
    ev.time = next_time_;
    ev.site = window_.lo + static_cast<std::int64_t>(rng_.below(w));
    ev.mark = rng_.uniform();
    ev.direction = rng_.uniform() < dyn_.p ? 1 : -1;
    time_ = ev.time;
    for (auto* o : observers_) o->before_event(ev, *this);
    apply(ev);
    for (auto* o : observers_) o->after_event(ev, *this);
    ++events_;
    digest_ = fnv_mix(digest_, std::bit_cast<std::uint64_t>(ev.time));
    digest_ = fnv_mix(digest_, static_cast<std::uint64_t>(ev.site));
    digest_ = fnv_mix(digest_, std::bit_cast<std::uint64_t>(ev.mark));
    digest_ = fnv_mix(digest_, static_cast<std::uint64_t>(ev.direction));
    next_time_ += rng_.exponential(total_rate);
  }
  if (!trackers_.empty()) advance_paths(t);
  time_ = t;
}

void CoupledEnsemble::apply(const HarrisEvent& ev) {
  const std::int64_t x = ev.site;
  const std::int64_t y = x + ev.direction;
  if (x == left_front_ && ev.direction > 0 && left_front_ < window_.hi) ++left_front_;
  if (x == right_front_ && ev.direction < 0 && right_front_ > window_.lo) --right_front_;
  const double a = (*env_)(x);
  const bool inside = window_.contains(y);
  for (std::size_t k = 0; k < states_.size(); ++k) {
    LatticeState& s = states_[k];
    const Occupancy n = s[x];
    if (n == 0) continue;
    if (ev.mark > a * g(n)) continue;
    CopyCounters& c = counters_[k];
    ++c.accepted;
    if (opts_.frozen) continue;
    if (inside) {
      s.transfer(x, y);
    } else if (y < window_.lo && s.boundary() == BoundaryMode::left_source) {
      s.remove(x);
      ++c.absorbed;
    } else {
      ++c.suppressed;
      continue;
    }
    for (auto& tr : trackers_) {
      if (tr.copy != k) continue;
      if (x == tr.position && y == tr.position + 1) ++tr.count;
      else if (x == tr.position + 1 && y == tr.position) --tr.count;
    }
  }
}

Simulation::Simulation(std::shared_ptr<const Environment> env, Dynamics dynamics, LatticeState initial,
                       std::uint64_t seed, EnsembleOptions opts)
    : CoupledEnsemble(std::move(env), std::move(dynamics), std::vector<LatticeState>{std::move(initial)}, seed,
                      opts) {}

CoupledEnsemble couple(std::vector<LatticeState> states, std::shared_ptr<const Environment> env,
                       Dynamics dynamics, std::uint64_t seed) {
  return CoupledEnsemble(std::move(env), std::move(dynamics), std::move(states), seed);
}

std::int64_t current(CoupledEnsemble& sim, const PathSpec& path, double t1, std::size_t copy) {
  const std::size_t id = sim.track_current(path, copy);
  sim.evolve_until(t1);
  return sim.current(id);
}

std::int64_t mass_right_of(const LatticeState& state, std::int64_t position) {
  std::int64_t s = 0;
  for (std::int64_t x = std::max(position + 1, state.x_min()); x <= state.x_max(); ++x) {
    if (state[x] == kInfiniteOccupancy) throw std::domain_error("infinite mass right of path");
    s += state[x];
  }
  return s;
}

}  // namespace hydrolab
