#include "hydrolab/equilibrium.hpp"

#include <cmath>
#include <stdexcept>

#include "hydrolab/random.hpp"

namespace hydrolab {

namespace {

constexpr std::uint64_t kStreamV = 0x56ULL;
constexpr std::uint64_t kStreamW = 0x57ULL;

struct Plan {
  double beta_bar = 0.0;   // stationary part, divided by alpha(x) per site
  double beta_hom = 0.0;   // homogeneous part
};

}  // namespace

EquilibriumSampler::EquilibriumSampler(std::shared_ptr<const Environment> env,
                                       std::shared_ptr<const FluxTable> flux, EquilibriumMode mode,
                                       std::uint64_t seed, std::optional<double> delta)
    : env_(std::move(env)), flux_(std::move(flux)), mode_(mode), seed_(seed) {
  if (!env_ || !flux_) throw std::invalid_argument("sampler needs an environment and a flux table");
  if (!flux_->model()) throw std::invalid_argument("sampler needs a model-backed flux table");
  const double rc = flux_->critical_density();
  delta_ = delta.value_or(std::isfinite(rc) ? 0.05 * rc : 0.0);
  if (!(delta_ >= 0.0) || (std::isfinite(rc) && delta_ > rc)) throw std::invalid_argument("delta outside [0, rho_c]");
}

Occupancy EquilibriumSampler::stationary_site(std::int64_t x, double beta_bar) const {
  if (beta_bar == 0.0) return 0;
  const double v = to_unit(derive_seed(seed_, kStreamV, static_cast<std::uint64_t>(x)));
  return occupancy_quantile(flux_->model()->rate, beta_bar / (*env_)(x), v);
}

Occupancy EquilibriumSampler::pseudo_site(std::int64_t x, double beta) const {
  if (beta == 0.0) return 0;
  const std::uint64_t stream = mode_ == EquilibriumMode::pseudo ? kStreamV : kStreamW;
  const double v = to_unit(derive_seed(seed_, stream, static_cast<std::uint64_t>(x)));
  return occupancy_quantile(flux_->model()->rate, beta, v);
}

namespace {

Plan make_plan(const FluxTable& flux, EquilibriumMode mode, double delta, double rho) {
  if (!(rho >= 0.0)) throw std::domain_error("negative density");
  const JumpRateSpec& g = flux.model()->rate;
  const double rc = flux.critical_density();
  Plan plan;
  switch (mode) {
    case EquilibriumMode::pseudo:
      plan.beta_hom = inverse_mean_density(g, rho);
      break;
    case EquilibriumMode::stationary:
      if (rho >= rc) throw std::domain_error("no supercritical equilibrium");
      plan.beta_bar = flux.fugacity(rho);
      break;
    case EquilibriumMode::completed:
      if (!std::isfinite(rc) || rho <= rc - delta) {
        plan.beta_bar = flux.fugacity(rho);
      } else {
        plan.beta_bar = flux.fugacity(rc - delta);
        plan.beta_hom = inverse_mean_density(g, rho - rc + delta);
      }
      break;
  }
  return plan;
}

}  // namespace

Occupancy EquilibriumSampler::site(std::int64_t x, double rho) const {
  const Plan plan = make_plan(*flux_, mode_, delta_, rho);
  return stationary_site(x, plan.beta_bar) + pseudo_site(x, plan.beta_hom);
}

LatticeState EquilibriumSampler::sample(double rho, Window window) const {
  if (!env_->contains(window.lo) || !env_->contains(window.hi))
    throw std::out_of_range("window outside environment");
  const Plan plan = make_plan(*flux_, mode_, delta_, rho);
  std::vector<Occupancy> occ(static_cast<std::size_t>(window.size()));
  for (std::int64_t x = window.lo; x <= window.hi; ++x)
    occ[static_cast<std::size_t>(x - window.lo)] = stationary_site(x, plan.beta_bar) + pseudo_site(x, plan.beta_hom);
  return LatticeState(window, std::move(occ));
}

LatticeState sample_equilibrium(std::shared_ptr<const Environment> env, std::shared_ptr<const FluxTable> flux,
                                double rho, EquilibriumMode mode, std::uint64_t seed, std::optional<double> delta) {
  EquilibriumSampler sampler(std::move(env), std::move(flux), mode, seed, delta);
  return sampler.sample(rho);
}

LatticeState riemann_initial(const EquilibriumSampler& sampler, double lambda, double rho, double u, double t,
                             Window window) {
  const auto cut = static_cast<std::int64_t>(std::floor(u * t));
  if (!window.contains(cut) || !window.contains(cut + 1)) throw std::out_of_range("window does not cover the cut");
  const LatticeState left = sampler.sample(lambda, Window{window.lo, cut});
  const LatticeState right = sampler.sample(rho, Window{cut + 1, window.hi});
  std::vector<Occupancy> occ(left.occupancies().begin(), left.occupancies().end());
  occ.insert(occ.end(), right.occupancies().begin(), right.occupancies().end());
  return LatticeState(window, std::move(occ));
}

LatticeState source_config(Window window, std::int64_t y) {
  LatticeState s = LatticeState::empty(window, BoundaryMode::left_source);
  for (std::int64_t x = window.lo; x <= std::min(y, window.hi); ++x) s.set(x, kInfiniteOccupancy);
  return s;
}

Window padded_window(double a, double b, double t, double horizon, double speed) {
  const auto margin = static_cast<std::int64_t>(std::ceil(speed * horizon));
  return Window{static_cast<std::int64_t>(std::floor(a * t)) - margin,
                static_cast<std::int64_t>(std::ceil(b * t)) + margin};
}

}  // namespace hydrolab
