#include "hydrolab/riemann.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hydrolab {

namespace {

constexpr double kTieGap = 1e-8;
constexpr int kRefineRounds = 3;
constexpr int kRefineFactor = 8;

}  // namespace

RiemannSolver::RiemannSolver(RiemannProblem problem, std::size_t grid_points)
    : problem_(std::move(problem)) {
  if (!problem_.flux) throw std::invalid_argument("Riemann problem needs a flux table");
  if (!(problem_.left >= 0.0) || !(problem_.right >= 0.0))
    throw std::invalid_argument("Riemann data must be nonnegative");
  const double lo = std::min(problem_.left, problem_.right);
  const double hi = std::max(problem_.left, problem_.right);
  if (lo == hi || grid_points < 2) {
    grid_.push_back(lo);
  } else {
    for (std::size_t i = 0; i < grid_points; ++i)
      grid_.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1));
    grid_.back() = hi;
    const double rc = problem_.flux->critical_density();
    if (rc > lo && rc < hi) {
      auto it = std::lower_bound(grid_.begin(), grid_.end(), rc);
      if (*it != rc) grid_.insert(it, rc);
    }
  }
  flux_.reserve(grid_.size());
  for (double r : grid_) flux_.push_back(problem_.flux->value(r));
}

double RiemannSolver::objective(double r, double v) const {
  const double val = problem_.flux->value(r) - v * r;
  return increasing() ? val : -val;
}

double RiemannSolver::refine(std::size_t idx, double v, double& best_value) const {
  const double sgn = increasing() ? 1.0 : -1.0;
  double best_r = grid_[idx];
  best_value = sgn * (flux_[idx] - v * grid_[idx]);
  if (grid_.size() == 1) return best_r;
  double a = grid_[idx == 0 ? 0 : idx - 1];
  double b = grid_[std::min(idx + 1, grid_.size() - 1)];
  for (int round = 0; round < kRefineRounds; ++round) {
    const double step = (b - a) / kRefineFactor;
    int arg = -1;
    for (int j = 0; j <= kRefineFactor; ++j) {
      const double r = j == kRefineFactor ? b : a + step * j;
      const double o = objective(r, v);
      if (o < best_value) {
        best_value = o;
        best_r = r;
        arg = j;
      }
    }
    if (arg < 0) {
      // Grid point stays optimal; shrink around it.
      a = std::max(a, best_r - step);
      b = std::min(b, best_r + step);
    } else {
      const double na = a + step * std::max(arg - 1, 0);
      const double nb = std::min(b, a + step * std::min(arg + 1, kRefineFactor));
      a = na;
      b = nb;
    }
  }
  return best_r;
}

VariationalResult RiemannSolver::variational(double v) const {
  const double sgn = increasing() ? 1.0 : -1.0;
  const std::size_t n = grid_.size();
  std::vector<double> obj(n);
  std::size_t best = 0;
  for (std::size_t i = 0; i < n; ++i) {
    obj[i] = sgn * (flux_[i] - v * grid_[i]);
    if (obj[i] < obj[best]) best = i;
  }
  const double floor_val = obj[best];
  const double flat_tol = 1e-12 * (1.0 + std::abs(floor_val));

  std::vector<double> candidates;
  double best_value = floor_val;
  std::size_t i = 0;
  while (i < n) {
    if (obj[i] - floor_val > kTieGap) {
      ++i;
      continue;
    }
    std::size_t j = i;
    std::size_t arg = i;
    double cmin = obj[i];
    double cmax = obj[i];
    while (j + 1 < n && obj[j + 1] - floor_val <= kTieGap) {
      ++j;
      cmin = std::min(cmin, obj[j]);
      cmax = std::max(cmax, obj[j]);
      if (obj[j] < obj[arg]) arg = j;
    }
    if (j >= i + 2 && cmax - cmin <= flat_tol) {
      candidates.push_back(grid_[i]);
      candidates.push_back(grid_[j]);
    } else {
      double val = 0.0;
      candidates.push_back(refine(arg, v, val));
      best_value = std::min(best_value, val);
    }
    i = j + 1;
  }

  VariationalResult res;
  res.value = sgn * best_value;
  const auto [mn, mx] = std::minmax_element(candidates.begin(), candidates.end());
  res.near_tie = *mx - *mn > 1e-9;
  if (increasing()) {
    res.h_minus = *mn;
    res.h_plus = *mx;
  } else {
    res.h_minus = *mx;
    res.h_plus = *mn;
  }
  return res;
}

double RiemannSolver::profile(double x, double t) const {
  if (!(t >= 0.0)) throw std::domain_error("negative time");
  if (t == 0.0) return x < problem_.center ? problem_.left : problem_.right;
  return variational((x - problem_.center) / t).h_plus;
}

std::vector<double> RiemannSolver::shock_speeds(double v_lo, double v_hi, double jump_tol) const {
  std::vector<double> out;
  struct Frame {
    double a, b, ha, hb;
    int depth;
  };
  constexpr int kSeeds = 64;
  std::vector<Frame> stack;
  double prev_v = v_lo;
  double prev_h = variational(v_lo).h_plus;
  for (int i = 1; i <= kSeeds; ++i) {
    const double v = i == kSeeds ? v_hi : v_lo + (v_hi - v_lo) * i / kSeeds;
    const double h = variational(v).h_plus;
    stack.push_back({prev_v, v, prev_h, h, 0});
    prev_v = v;
    prev_h = h;
  }
  while (!stack.empty()) {
    Frame fr = stack.back();
    stack.pop_back();
    if (std::abs(fr.hb - fr.ha) <= jump_tol) continue;
    if (fr.depth >= 40 || fr.b - fr.a < 1e-10) {
      out.push_back(0.5 * (fr.a + fr.b));
      continue;
    }
    const double m = 0.5 * (fr.a + fr.b);
    const double hm = variational(m).h_plus;
    stack.push_back({m, fr.b, hm, fr.hb, fr.depth + 1});
    stack.push_back({fr.a, m, fr.ha, hm, fr.depth + 1});
  }
  std::sort(out.begin(), out.end());
  return out;
}

VariationalResult variational_G(const RiemannProblem& problem, double v) {
  return RiemannSolver(problem).variational(v);
}

double riemann_profile(const RiemannProblem& problem, double x, double t) {
  return RiemannSolver(problem).profile(x, t);
}

}  // namespace hydrolab
