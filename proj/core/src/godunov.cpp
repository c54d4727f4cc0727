#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hydrolab/riemann.hpp"

namespace hydrolab {

double PiecewiseConstant::operator()(double x) const {
  auto it = std::upper_bound(breaks.begin(), breaks.end(), x);
  return values[static_cast<std::size_t>(it - breaks.begin())];
}

double PiecewiseConstant::average(double a, double b) const {
  if (!(b > a)) return (*this)(a);
  double total = 0.0;
  double left = a;
  auto it = std::upper_bound(breaks.begin(), breaks.end(), a);
  std::size_t idx = static_cast<std::size_t>(it - breaks.begin());
  while (left < b) {
    const double right = idx < breaks.size() ? std::min(breaks[idx], b) : b;
    total += values[idx] * (right - left);
    left = right;
    ++idx;
  }
  return total / (b - a);
}

namespace {

void validate(const PiecewiseConstant& init, double horizon, const GodunovOptions& opts) {
  bool ok = init.values.size() == init.breaks.size() + 1;
  for (std::size_t i = 1; ok && i < init.breaks.size(); ++i) ok = init.breaks[i] > init.breaks[i - 1];
  for (double v : init.values) ok = ok && std::isfinite(v) && v >= 0.0;
  ok = ok && opts.dx > 0.0 && opts.cfl > 0.0 && opts.cfl <= 1.0 && opts.x_max > opts.x_min &&
       horizon >= 0.0 && (opts.order == 1 || opts.order == 2);
  if (!ok) throw std::invalid_argument("invalid profile");
}

double limited_slope(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  const double c = 0.5 * (a + b);
  const double m = std::min({2.0 * std::abs(a), 2.0 * std::abs(b), std::abs(c)});
  return std::copysign(m, c);
}

// Interface fluxes: face[i] is the flux through the right edge of cell i.
// The scheme is upwind since f is nondecreasing; cells 0 and n - 1 carry no slope.
// Slopes act on densities capped at rho_c, where the flux stops depending on rho.
void face_fluxes(const FluxTable& flux, const std::vector<double>& rho, int order, std::vector<double>& face) {
  const std::size_t n = rho.size();
  const double cap = flux.critical_density();
  auto capped = [&](std::size_t i) { return std::min(rho[i], cap); };
  for (std::size_t i = 0; i < n; ++i) {
    double left = capped(i);
    if (order == 2 && i > 0 && i + 1 < n) left += 0.5 * limited_slope(left - capped(i - 1), capped(i + 1) - left);
    face[i] = flux.interpolate(std::max(left, 0.0));
  }
}

}  // namespace

GodunovResult godunov_solve(const FluxTable& flux, const PiecewiseConstant& initial, double horizon,
                            const GodunovOptions& opts) {
  validate(initial, horizon, opts);
  const double speed = std::max(flux.drift(), 1e-12);
  const auto pad = static_cast<std::size_t>(std::ceil(speed * horizon / opts.dx)) + 2;
  const auto core = static_cast<std::size_t>(std::llround((opts.x_max - opts.x_min) / opts.dx));
  const std::size_t n = core + 2 * pad;
  const double x0 = opts.x_min - static_cast<double>(pad) * opts.dx;

  std::vector<double> rho(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = x0 + static_cast<double>(i) * opts.dx;
    rho[i] = initial.average(a, a + opts.dx);
  }

  GodunovResult res;
  for (double r : rho) res.mass_initial += r * opts.dx;

  const double dt_max = opts.cfl * opts.dx / speed;
  const auto steps = horizon > 0.0 ? static_cast<std::size_t>(std::ceil(horizon / dt_max)) : 0;
  const double dt = steps ? horizon / static_cast<double>(steps) : 0.0;
  const double ratio = dt / opts.dx;

  std::vector<double> face(n);
  std::vector<double> stage(n);
  auto advance = [&](const std::vector<double>& from, std::vector<double>& to, double weight) {
    face_fluxes(flux, from, opts.order, face);
    res.boundary_inflow += weight * dt * (face.front() - face.back());
    to[0] = from[0];
    for (std::size_t i = 1; i < n; ++i) to[i] = from[i] - ratio * (face[i] - face[i - 1]);
  };
  for (std::size_t s = 0; s < steps; ++s) {
    if (opts.order == 1) {
      advance(rho, stage, 1.0);
      rho.swap(stage);
      continue;
    }
    advance(rho, stage, 0.5);
    std::vector<double> next(n);
    advance(stage, next, 0.5);
    for (std::size_t i = 0; i < n; ++i) rho[i] = 0.5 * (rho[i] + next[i]);
  }
  res.steps = steps;

  for (double r : rho) res.mass_final += r * opts.dx;
  for (std::size_t i = pad; i < pad + core; ++i) {
    res.centers.push_back(x0 + (static_cast<double>(i) + 0.5) * opts.dx);
    res.density.push_back(rho[i]);
  }
  return res;
}

}  // namespace hydrolab
