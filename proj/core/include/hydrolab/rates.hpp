#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hydrolab {

/// Site occupancy. The maximum value marks an infinite reservoir.
using Occupancy = std::int32_t;
inline constexpr Occupancy kInfiniteOccupancy = 2147483647;

/**
 * Jump rate g on occupancies.
 *
 * Stored as an explicit prefix g(1), ..., g(K) followed by the constant
 * tail g(n) = 1 for n > K. g(0) = 0 and g(infinity) = 1.
 */
class JumpRateSpec {
 public:
  JumpRateSpec() = default;
  explicit JumpRateSpec(std::vector<double> prefix);

  /// g(n) = min(n, 1).
  static JumpRateSpec mm1();
  /// g(n) = min(n, k) / k.
  static JumpRateSpec k_server(int k);

  double operator()(Occupancy n) const noexcept {
    if (n <= 0) return 0.0;
    if (static_cast<std::size_t>(n) <= prefix_.size()) return prefix_[n - 1];
    return 1.0;
  }

  std::span<const double> prefix() const noexcept { return prefix_; }
  std::size_t prefix_length() const noexcept { return prefix_.size(); }

  /// True when g(n+1) - g(n) is nonincreasing in n >= 0.
  bool has_concave_increments() const noexcept;

  friend bool operator==(const JumpRateSpec&, const JumpRateSpec&) = default;

 private:
  std::vector<double> prefix_;
};

/// Unnormalised moments of the single-site law: sum of n^k beta^n / g(n)!.
struct SiteMoments {
  double z = 1.0;
  double m1 = 0.0;
  double m2 = 0.0;
};

/**
 * Series moments at fugacity x, given 1 - x separately so the geometric
 * tail keeps full precision when x is close to 1. No range guard.
 */
SiteMoments site_moments(const JumpRateSpec& g, double x, double one_minus_x);

/// Z(beta). Throws std::domain_error for beta outside [0, 1 - 1e-9).
double partition_function(const JumpRateSpec& g, double beta);
/// R(beta), the mean occupancy under theta_beta.
double mean_density(const JumpRateSpec& g, double beta);
/// Variance of the occupancy under theta_beta.
double occupancy_variance(const JumpRateSpec& g, double beta);
/// dR/dbeta, equal to V(beta)/beta.
double mean_density_derivative(const JumpRateSpec& g, double beta);
/// Inverse of R on [0, infinity).
double inverse_mean_density(const JumpRateSpec& g, double rho);

/// Unguarded R and R' evaluated from (x, 1 - x).
double mean_density_unchecked(const JumpRateSpec& g, double x, double one_minus_x);
double mean_density_derivative_unchecked(const JumpRateSpec& g, double x, double one_minus_x);

/// Smallest n with P_beta(N <= n) >= v, for v in (0, 1).
Occupancy occupancy_quantile(const JumpRateSpec& g, double beta, double v);

}  // namespace hydrolab
