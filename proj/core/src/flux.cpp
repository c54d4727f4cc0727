#include "hydrolab/flux.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "quadrature.hpp"

namespace hydrolab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Moment { density, derivative };

double site_term(const JumpRateSpec& g, double beta, double a, double a_minus_beta, Moment m) {
  if (a_minus_beta <= 0.0) return kInf;
  const double x = beta / a;
  const double omx = a_minus_beta / a;
  if (m == Moment::density) return mean_density_unchecked(g, x, omx);
  return mean_density_derivative_unchecked(g, x, omx) / a;
}

double averaged_moment(const JumpRateSpec& g, const DisorderLaw& q0, double beta, Moment m) {
  if (!(beta >= 0.0)) throw std::domain_error("negative fugacity");
  if (beta > q0.floor() * (1.0 + 1e-15)) throw std::domain_error("fugacity above environment floor");
  if (beta == 0.0 && m == Moment::density) return 0.0;
  double total = 0.0;
  for (const auto& atom : q0.atoms()) {
    if (atom.weight <= 0.0) continue;
    if (atom.location == 0.0) {
      // Only reachable with beta = 0, where beta / a is taken as 0.
      if (m == Moment::derivative) return kInf;
      continue;
    }
    total += atom.weight * site_term(g, beta, atom.location, atom.location - beta, m);
    if (!std::isfinite(total)) return kInf;
  }
  for (const auto& piece : q0.pieces()) {
    if (piece.mass <= 0.0) continue;
    const double gap = std::max(piece.lo - beta, 0.0);
    const double width = piece.hi - piece.lo;
    const double power = 1.0 / (piece.exponent + 1.0);
    // Substitute a = lo + width * s^power so that dQ0 becomes mass * ds.
    auto integrand = [&](double s) {
      const double d = gap + width * std::pow(s, power);
      return site_term(g, beta, beta + d, d, m);
    };
    const double val = detail::integrate_unit_interval(integrand, gap == 0.0);
    if (!std::isfinite(val)) return kInf;
    total += piece.mass * val;
  }
  return total;
}

// Safeguarded Newton on R(beta) = rho inside the bracket [lo, hi].
double invert_averaged(const FluxModel& model, double rho, double lo, double hi, double guess = -1.0) {
  double beta = guess > lo && guess < hi ? guess : 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double r = averaged_density(model.rate, model.disorder, beta);
    if (r == rho) return beta;
    if (r < rho) lo = beta; else hi = beta;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    const double d = averaged_density_derivative(model.rate, model.disorder, beta);
    double next = std::isfinite(d) && d > 0.0 ? beta - (r - rho) / d : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - beta) <= 2.0 * std::numeric_limits<double>::epsilon() * beta) return next;
    beta = next;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double averaged_density(const JumpRateSpec& g, const DisorderLaw& q0, double beta) {
  return averaged_moment(g, q0, beta, Moment::density);
}

double averaged_density_derivative(const JumpRateSpec& g, const DisorderLaw& q0, double beta) {
  return averaged_moment(g, q0, beta, Moment::derivative);
}

double critical_density(const JumpRateSpec& g, const DisorderLaw& q0) {
  if (q0.floor() == 0.0) return 0.0;
  return averaged_density(g, q0, q0.floor());
}

bool FluxTable::critical_density_finite() const noexcept { return std::isfinite(rho_c_); }

FluxTable FluxTable::from_model(const FluxModel& model, const FluxTableOptions& opts) {
  if (!(model.p >= 0.5 && model.p <= 1.0)) throw std::invalid_argument("drift needs p in [1/2, 1]");
  if (opts.grid_points < 2) throw std::invalid_argument("flux grid needs at least two points");
  FluxTable t;
  t.model_ = model;
  t.p_ = model.p;
  t.c_ = model.disorder.floor();
  t.plateau_ = model.drift() * t.c_;
  t.rho_c_ = hydrolab::critical_density(model.rate, model.disorder);
  const bool finite = std::isfinite(t.rho_c_);
  const double top = opts.max_density.value_or(finite ? std::max(2.0 * t.rho_c_, 8.0) : 8.0);
  if (!(top > 0.0)) throw std::invalid_argument("flux grid needs a positive upper density");

  const std::size_t n = opts.grid_points;
  for (std::size_t i = 0; i < n; ++i) t.rho_.push_back(top * static_cast<double>(i) / static_cast<double>(n - 1));
  if (finite && t.rho_c_ > 0.0 && t.rho_c_ < top) {
    auto it = std::lower_bound(t.rho_.begin(), t.rho_.end(), t.rho_c_);
    if (*it != t.rho_c_) t.rho_.insert(it, t.rho_c_);
  }

  t.beta_top_ = t.c_;
  if (!finite) {
    double gap = 0.5;
    while (averaged_density(model.rate, model.disorder, t.c_ * (1.0 - gap)) < top) {
      gap *= 0.5;
      if (gap < 1e-300) throw std::domain_error("averaged density does not reach the grid top");
    }
    t.beta_top_ = t.c_ * (1.0 - gap);
  }

  double lo = 0.0;
  double slope = 0.0;
  double prev_rho = 0.0;
  for (double rho : t.rho_) {
    double beta = t.c_;
    double rbar = t.rho_c_;
    if (rho < t.rho_c_) {
      const double guess = lo + slope * (rho - prev_rho);
      beta = rho == 0.0 ? 0.0 : invert_averaged(model, rho, lo, t.beta_top_, guess);
      if (rho > 0.0) slope = (beta - lo) / (rho - prev_rho);
      rbar = rho;
      lo = beta;
      prev_rho = rho;
    }
    t.beta_.push_back(beta);
    t.rbar_.push_back(rbar);
    t.flux_.push_back(model.drift() * beta);
  }

  if (finite && t.rho_c_ > 0.0) {
    const double d = averaged_density_derivative(model.rate, model.disorder, t.c_);
    t.left_derivative_ = std::isfinite(d) ? model.drift() / d : 0.0;
  }
  return t;
}

FluxTable FluxTable::from_samples(std::vector<double> densities, std::vector<double> flux, double drift) {
  if (densities.size() != flux.size() || densities.size() < 2)
    throw std::invalid_argument("flux samples need matching grids of length >= 2");
  if (!(drift > 0.0 && drift <= 1.0)) throw std::invalid_argument("drift must lie in (0, 1]");
  for (std::size_t i = 1; i < densities.size(); ++i)
    if (!(densities[i] > densities[i - 1])) throw std::invalid_argument("grid not sorted");
  FluxTable t;
  t.p_ = 0.5 * (1.0 + drift);
  t.rho_c_ = densities.back();
  t.plateau_ = flux.back();
  t.c_ = t.plateau_ / drift;
  t.beta_top_ = t.c_;
  const std::size_t n = densities.size();
  t.left_derivative_ = (flux[n - 1] - flux[n - 2]) / (densities[n - 1] - densities[n - 2]);
  for (double f : flux) t.beta_.push_back(f / drift);
  t.rbar_ = densities;
  t.rho_ = std::move(densities);
  t.flux_ = std::move(flux);
  return t;
}

double FluxTable::fugacity(double rho) const {
  if (!(rho >= 0.0)) throw std::domain_error("negative density");
  if (rho >= rho_c_) return c_;
  if (!model_) return interpolate(rho) / drift();
  if (rho > rho_.back()) throw std::domain_error("outside flux table");
  auto it = std::upper_bound(rho_.begin(), rho_.end(), rho);
  const std::size_t i = static_cast<std::size_t>(it - rho_.begin());
  const double lo = beta_[i - 1];
  const double hi = i < rho_.size() ? beta_[i] : beta_top_;
  if (rho_[i - 1] == rho) return lo;
  return invert_averaged(*model_, rho, lo, hi);
}

double FluxTable::value(double rho) const {
  if (!(rho >= 0.0)) throw std::domain_error("negative density");
  if (rho >= rho_c_) return plateau_;
  if (rho > rho_.back()) throw std::domain_error("outside flux table");
  if (!model_) return interpolate(rho);
  return model_->drift() * fugacity(rho);
}

double FluxTable::interpolate(double rho) const {
  if (!(rho >= 0.0)) throw std::domain_error("negative density");
  if (rho >= rho_c_) return plateau_;
  if (rho > rho_.back()) throw std::domain_error("outside flux table");
  auto it = std::upper_bound(rho_.begin(), rho_.end(), rho);
  if (it == rho_.end()) return flux_.back();
  const std::size_t i = static_cast<std::size_t>(it - rho_.begin());
  const double w = (rho - rho_[i - 1]) / (rho_[i] - rho_[i - 1]);
  return flux_[i - 1] + w * (flux_[i] - flux_[i - 1]);
}

bool FluxTable::tabulated_concave(double tol) const {
  double prev = kInf;
  for (std::size_t i = 0; i + 1 < rho_.size(); ++i) {
    const double s = (flux_[i + 1] - flux_[i]) / (rho_[i + 1] - rho_[i]);
    if (s > prev + tol) return false;
    prev = s;
  }
  return true;
}

double flux_value(const FluxTable& table, double rho) { return table.value(rho); }

double critical_speed(const FluxTable& table, double rho) {
  const double rc = table.critical_density();
  if (!std::isfinite(rc)) throw std::domain_error("no critical front");
  if (!(rho >= 0.0) || rho > rc) throw std::domain_error("critical speed needs 0 <= rho <= rho_c");
  if (rho == rc) return kInf;
  const double top = table.plateau();
  double best = table.critical_left_derivative();
  best = std::min(best, (top - table.value(rho)) / (rc - rho));
  const auto rs = table.densities();
  const auto fs = table.values();
  for (std::size_t i = 0; i < rs.size() && rs[i] < rc; ++i) {
    if (rs[i] < rho) continue;
    best = std::min(best, (top - fs[i]) / (rc - rs[i]));
  }
  return std::max(best, 0.0);
}

}  // namespace hydrolab
