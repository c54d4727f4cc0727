#include "hydrolab/rates.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hydrolab {

namespace {

constexpr double kFugacityCeiling = 1.0 - 1e-9;

void check_fugacity(double beta) {
  if (!(beta >= 0.0)) throw std::domain_error("negative fugacity");
  if (beta >= kFugacityCeiling) throw std::domain_error("fugacity too close to 1");
}

}  // namespace

JumpRateSpec::JumpRateSpec(std::vector<double> prefix) : prefix_(std::move(prefix)) {
  double prev = 0.0;
  for (double v : prefix_) {
    if (!(v > 0.0) || v > 1.0) throw std::invalid_argument("jump rate values must lie in (0, 1]");
    if (v < prev) throw std::invalid_argument("jump rate must be nondecreasing");
    prev = v;
  }
  while (!prefix_.empty() && prefix_.back() == 1.0) prefix_.pop_back();
}

JumpRateSpec JumpRateSpec::mm1() { return JumpRateSpec{}; }

JumpRateSpec JumpRateSpec::k_server(int k) {
  if (k < 1) throw std::invalid_argument("k_server needs k >= 1");
  std::vector<double> v;
  for (int n = 1; n < k; ++n) v.push_back(static_cast<double>(n) / k);
  return JumpRateSpec(std::move(v));
}

bool JumpRateSpec::has_concave_increments() const noexcept {
  double prev_inc = std::numeric_limits<double>::infinity();
  const auto K = static_cast<Occupancy>(prefix_.size());
  for (Occupancy n = 0; n <= K; ++n) {
    double inc = (*this)(n + 1) - (*this)(n);
    if (inc > prev_inc + 1e-15) return false;
    prev_inc = inc;
  }
  return true;
}

SiteMoments site_moments(const JumpRateSpec& g, double x, double omx) {
  SiteMoments s;
  if (x == 0.0) return s;
  const std::size_t K = g.prefix_length();
  double term = 1.0;
  for (std::size_t n = 1; n <= K; ++n) {
    term *= x / g(static_cast<Occupancy>(n));
    const double dn = static_cast<double>(n);
    s.z += term;
    s.m1 += dn * term;
    s.m2 += dn * dn * term;
  }
  // g = 1 beyond K, so the remainder is a geometric series in x.
  const double k = static_cast<double>(K);
  const double s0 = x / omx;
  const double s1 = x / (omx * omx);
  const double s2 = x * (1.0 + x) / (omx * omx * omx);
  s.z += term * s0;
  s.m1 += term * (k * s0 + s1);
  s.m2 += term * (k * k * s0 + 2.0 * k * s1 + s2);
  return s;
}

double mean_density_unchecked(const JumpRateSpec& g, double x, double omx) {
  if (x == 0.0) return 0.0;
  if (omx <= 0.0) return std::numeric_limits<double>::infinity();
  const SiteMoments s = site_moments(g, x, omx);
  return s.m1 / s.z;
}

double mean_density_derivative_unchecked(const JumpRateSpec& g, double x, double omx) {
  if (x == 0.0) return 1.0 / g(1);
  if (omx <= 0.0) return std::numeric_limits<double>::infinity();
  const SiteMoments s = site_moments(g, x, omx);
  const double r = s.m1 / s.z;
  return (s.m2 / s.z - r * r) / x;
}

double partition_function(const JumpRateSpec& g, double beta) {
  check_fugacity(beta);
  return site_moments(g, beta, 1.0 - beta).z;
}

double mean_density(const JumpRateSpec& g, double beta) {
  check_fugacity(beta);
  return mean_density_unchecked(g, beta, 1.0 - beta);
}

double occupancy_variance(const JumpRateSpec& g, double beta) {
  check_fugacity(beta);
  if (beta == 0.0) return 0.0;
  const SiteMoments s = site_moments(g, beta, 1.0 - beta);
  const double r = s.m1 / s.z;
  return s.m2 / s.z - r * r;
}

double mean_density_derivative(const JumpRateSpec& g, double beta) {
  check_fugacity(beta);
  return mean_density_derivative_unchecked(g, beta, 1.0 - beta);
}

double inverse_mean_density(const JumpRateSpec& g, double rho) {
  if (!(rho >= 0.0)) throw std::domain_error("negative density");
  if (rho == 0.0) return 0.0;
  double lo = 0.0;
  double hi = 0.5;
  while (mean_density_unchecked(g, hi, 1.0 - hi) < rho) {
    lo = hi;
    hi = 1.0 - 0.5 * (1.0 - hi);
    if (hi >= kFugacityCeiling) throw std::domain_error("density beyond fugacity range");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (mean_density_unchecked(g, mid, 1.0 - mid) < rho) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

Occupancy occupancy_quantile(const JumpRateSpec& g, double beta, double v) {
  if (!(beta >= 0.0) || beta >= 1.0) throw std::domain_error("fugacity outside [0, 1)");
  if (beta == 0.0 || v <= 0.0) return 0;
  const double z = site_moments(g, beta, 1.0 - beta).z;
  double p = 1.0 / z;
  double cum = p;
  Occupancy n = 0;
  constexpr Occupancy kCap = 100000000;
  while (cum < v && n < kCap) {
    ++n;
    p *= beta / g(n);
    if (p == 0.0) break;
    cum += p;
  }
  return n;
}

}  // namespace hydrolab
