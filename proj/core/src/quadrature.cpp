#include "quadrature.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace hydrolab::detail {

namespace {

constexpr int kNodes = 24;

struct Rule {
  std::array<double, kNodes> x{};
  std::array<double, kNodes> w{};
};

Rule make_rule() {
  Rule r;
  for (int i = 0; i < kNodes; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (kNodes + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = z;
      for (int n = 2; n <= kNodes; ++n) {
        const double p2 = ((2.0 * n - 1.0) * z * p1 - (n - 1.0) * p0) / n;
        p0 = p1;
        p1 = p2;
      }
      dp = kNodes * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    r.x[i] = z;
    r.w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return r;
}

const Rule& rule() {
  static const Rule r = make_rule();
  return r;
}

}  // namespace

double gauss_legendre(const std::function<double(double)>& f, double a, double b) {
  const Rule& r = rule();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int i = 0; i < kNodes; ++i) sum += r.w[i] * f(mid + half * r.x[i]);
  return half * sum;
}

double integrate_unit_interval(const std::function<double(double)>& f, bool may_diverge) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  double prev_inc = 0.0;
  double prev_ratio = 0.0;
  int flat_run = 0;
  double hi = 1.0;
  for (int k = 0; k < 1060; ++k) {
    const double lo = 0.5 * hi;
    const double inc = gauss_legendre(f, lo, hi);
    if (!std::isfinite(inc)) return kInf;
    sum += inc;
    if (!std::isfinite(sum)) return kInf;
    hi = lo;
    if (inc == 0.0) return sum;
    if (k >= 4 && prev_inc > 0.0) {
      const double ratio = inc / prev_inc;
      if (ratio >= 0.9999) {
        if (may_diverge && ++flat_run >= 24) return kInf;
      } else {
        flat_run = 0;
        const double tail = inc * ratio / (1.0 - ratio);
        if (tail <= 1e-16 * sum) return sum + tail;
        if (std::abs(ratio - prev_ratio) < 1e-12 * ratio) return sum + tail;
      }
      prev_ratio = ratio;
    }
    prev_inc = inc;
  }
  return sum;
}

}  // namespace hydrolab::detail
