#include "hydrolab/interface.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hydrolab {

double InverseProfile::minus(double x) const {
  const auto it = std::lower_bound(positions.begin(), positions.end(), x,
                                   [](std::int64_t p, double v) { return static_cast<double>(p) < v; });
  const auto m = static_cast<std::size_t>(it - positions.begin());
  return m == 0 ? levels.front() : levels[m - 1];
}

double InverseProfile::plus(double x) const {
  const auto it = std::upper_bound(positions.begin(), positions.end(), x,
                                   [](double v, std::int64_t p) { return v < static_cast<double>(p); });
  const auto m = static_cast<std::size_t>(it - positions.begin());
  return m == positions.size() ? levels.back() : levels[m];
}

InterfaceFamily::InterfaceFamily(std::vector<double> levels, double u, double t_scale, bool increasing,
                                 InterfaceOptions opts)
    : levels_(std::move(levels)), u_(u), t_scale_(t_scale), increasing_(increasing), opts_(opts) {
  if (levels_.empty()) throw std::invalid_argument("interface family needs levels");
  if (!(t_scale_ > 0.0)) throw std::invalid_argument("interface family needs a positive time scale");
  origin_ = static_cast<std::int64_t>(std::floor(u_ * t_scale_));
  pos_.assign(levels_.size(), origin_);
  pending_.assign(levels_.size(), 0);
  upper_ = origin_;
  lower_ = origin_;
}

void InterfaceFamily::before_event(const HarrisEvent& ev, const CoupledEnsemble& ens) {
  const std::int64_t w = ev.site;
  const int z = ev.direction;
  const std::int64_t anchor = z > 0 ? w : w - 1;
  const std::int64_t nb = w + z;
  if (!ens.window().contains(nb)) return;
  const auto [first, last] = std::equal_range(pos_.begin(), pos_.end(), anchor);
  if (first == last) return;
  const LatticeState& eta = ens.state(0);
  for (auto it = first; it != last; ++it) {
    const auto k = static_cast<std::size_t>(it - pos_.begin());
    const LatticeState& xi = ens.state(k + 1);
    const LatticeState& a = increasing_ ? eta : xi;
    const LatticeState& b = increasing_ ? xi : eta;
    if (a[nb] != b[nb]) continue;
    const double ra = ens.rate_at(w, a[w]);
    const double rb = ens.rate_at(w, b[w]);
    if (z > 0 && ra < ev.mark && ev.mark <= rb) pending_[k] = 1;
    if (z < 0 && rb < ev.mark && ev.mark <= ra) pending_[k] = -1;
  }
}

void InterfaceFamily::after_event(const HarrisEvent& ev, const CoupledEnsemble& ens) {
  const std::int64_t w = ev.site;
  const int z = ev.direction;
  if (z > 0 && w == upper_) ++upper_;
  if (z < 0 && w == lower_ + 1) --lower_;

  const std::int64_t anchor = z > 0 ? w : w - 1;
  const auto [first, last] = std::equal_range(pos_.begin(), pos_.end(), anchor);
  for (auto it = first; it != last; ++it) {
    const auto k = static_cast<std::size_t>(it - pos_.begin());
    if (pending_[k] == 0) continue;
    *it += pending_[k];
    pending_[k] = 0;
    ++moves_;
  }
  for (auto it = first; it != last; ++it) {
    const auto k = static_cast<std::size_t>(it - pos_.begin());
    if ((k > 0 && pos_[k - 1] > pos_[k]) || (k + 1 < pos_.size() && pos_[k] > pos_[k + 1])) {
      std::ostringstream os;
      os << "ordering broken at level " << levels_[k] << " time " << ev.time;
      throw InterfaceInvariantError(os.str());
    }
    if (pos_[k] < lower_ || pos_[k] > upper_) {
      std::ostringstream os;
      os << "Poisson bound broken at level " << levels_[k] << " time " << ev.time;
      throw InterfaceInvariantError(os.str());
    }
  }

  const std::int64_t lo = std::max(std::min(w, w + z), ens.window().lo);
  const std::int64_t hi = std::min(std::max(w, w + z), ens.window().hi);
  check_sites(ens, lo, hi);
  const std::uint64_t period = opts_.check_every ? opts_.check_every : static_cast<std::uint64_t>(ens.window().size());
  if (++seen_ % period == 0) verify(ens);
}

void InterfaceFamily::check_sites(const CoupledEnsemble& ens, std::int64_t a, std::int64_t b) const {
  const LatticeState& eta = ens.state(0);
  for (std::size_t k = 0; k < pos_.size(); ++k) {
    const LatticeState& xi = ens.state(k + 1);
    const LatticeState& lo = increasing_ ? eta : xi;
    const LatticeState& hi = increasing_ ? xi : eta;
    for (std::int64_t y = a; y <= b; ++y) {
      const bool ok = y <= pos_[k] ? lo[y] <= hi[y] : lo[y] >= hi[y];
      if (!ok) {
        std::ostringstream os;
        os << "sandwich broken at site " << y << " level " << levels_[k] << " interface " << pos_[k];
        throw InterfaceInvariantError(os.str());
      }
    }
  }
}

void InterfaceFamily::verify(const CoupledEnsemble& ens) const {
  if (ens.copies() != pos_.size() + 1) throw std::invalid_argument("ensemble does not match interface family");
  for (std::size_t k = 1; k < pos_.size(); ++k)
    if (pos_[k - 1] > pos_[k]) throw InterfaceInvariantError("ordering broken");
  check_sites(ens, ens.window().lo, ens.window().hi);
  ++checks_;
}

void InterfaceFamily::record(double time) { history_.push_back({time, pos_}); }

RescaledProfile InterfaceFamily::rescaled(double s_macro) const {
  const double target = s_macro * t_scale_;
  if (history_.empty() || target > history_.back().time + 1e-9 * std::max(1.0, target))
    throw std::domain_error("horizon exceeded");
  const InterfaceSnapshot* snap = &history_.front();
  for (const auto& h : history_)
    if (h.time <= target + 1e-9 * std::max(1.0, target)) snap = &h;
  RescaledProfile out;
  out.s = snap->time / t_scale_;
  out.t_scale = t_scale_;
  out.center = u_;
  out.levels = levels_;
  for (std::int64_t p : snap->positions) out.x.push_back(static_cast<double>(p) / t_scale_);
  out.inverse = InverseProfile{levels_, snap->positions};
  return out;
}

std::vector<double> interface_levels(double lambda, double rho, std::size_t grid_size) {
  if (grid_size < 2) return {lambda};
  std::vector<double> out(grid_size);
  for (std::size_t k = 0; k < grid_size; ++k)
    out[k] = lambda + (rho - lambda) * static_cast<double>(k) / static_cast<double>(grid_size - 1);
  out.back() = rho;
  return out;
}

InterfaceSetup init_family(const EquilibriumSampler& sampler, std::shared_ptr<const Environment> env,
                           Dynamics dynamics, double lambda, double rho, double u, double t_scale, Window window,
                           std::uint64_t seed, InterfaceOptions opts, std::vector<double> levels) {
  if (levels.empty()) levels = interface_levels(lambda, rho, opts.grid_size);
  const double lo = std::min(lambda, rho);
  const double hi = std::max(lambda, rho);
  const bool increasing = lambda <= rho;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (levels[k] < lo || levels[k] > hi) throw std::invalid_argument("interface levels outside [lambda, rho]");
    if (k > 0 && (increasing ? levels[k] < levels[k - 1] : levels[k] > levels[k - 1]))
      throw std::invalid_argument("interface levels must run from lambda to rho");
  }
  std::vector<LatticeState> copies;
  copies.push_back(riemann_initial(sampler, lambda, rho, u, t_scale, window));
  for (double r : levels) copies.push_back(sampler.sample(r, window));
  InterfaceSetup setup;
  setup.ensemble = std::make_unique<CoupledEnsemble>(std::move(env), std::move(dynamics), std::move(copies), seed);
  setup.family = std::make_unique<InterfaceFamily>(std::move(levels), u, t_scale, increasing, opts);
  setup.family->verify(*setup.ensemble);
  setup.ensemble->add_observer(setup.family.get());
  setup.family->record(0.0);
  return setup;
}

bool interface_ordered(const InterfaceFamily& family) {
  return std::is_sorted(family.positions().begin(), family.positions().end());
}

}  // namespace hydrolab
