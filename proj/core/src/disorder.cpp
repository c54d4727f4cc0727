#include "hydrolab/disorder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hydrolab {

double PowerLawPiece::at_fraction(double s) const {
  if (s <= 0.0) return lo;
  if (s >= 1.0) return hi;
  return lo + (hi - lo) * std::pow(s, 1.0 / (exponent + 1.0));
}

DisorderLaw::DisorderLaw(std::vector<Atom> atoms, std::vector<PowerLawPiece> pieces,
                         std::optional<double> floor)
    : atoms_(std::move(atoms)), pieces_(std::move(pieces)) {
  double total = 0.0;
  double cmin = 2.0;
  for (const auto& a : atoms_) {
    if (!(a.location >= 0.0 && a.location <= 1.0) || !(a.weight >= 0.0))
      throw std::invalid_argument("invalid Q0");
    total += a.weight;
    if (a.weight > 0.0) cmin = std::min(cmin, a.location);
  }
  for (const auto& p : pieces_) {
    if (!(p.lo >= 0.0 && p.hi <= 1.0 && p.lo < p.hi) || !(p.mass >= 0.0) || !(p.exponent > -1.0))
      throw std::invalid_argument("invalid Q0");
    total += p.mass;
    if (p.mass > 0.0) cmin = std::min(cmin, p.lo);
  }
  if (std::abs(total - 1.0) > 1e-9 || cmin > 1.0) throw std::invalid_argument("invalid Q0");
  std::sort(atoms_.begin(), atoms_.end(),
            [](const Atom& a, const Atom& b) { return a.location < b.location; });
  support_min_ = cmin;
  floor_ = floor.value_or(cmin);
  if (!(floor_ >= 0.0) || floor_ > support_min_ + 1e-15)
    throw std::invalid_argument("invalid Q0: floor above support");
  floor_ = std::min(floor_, support_min_);
}

DisorderLaw DisorderLaw::dirac(double a, std::optional<double> floor) {
  return DisorderLaw({Atom{a, 1.0}}, {}, floor);
}

DisorderLaw DisorderLaw::uniform(double lo, double hi, std::optional<double> floor) {
  return DisorderLaw({}, {PowerLawPiece{lo, hi, 1.0, 0.0}}, floor);
}

DisorderLaw DisorderLaw::power_law(double lo, double hi, double exponent,
                                   std::optional<double> floor) {
  return DisorderLaw({}, {PowerLawPiece{lo, hi, 1.0, exponent}}, floor);
}

DisorderLaw DisorderLaw::with_floor(double c) const { return DisorderLaw(atoms_, pieces_, c); }

namespace {

double piece_cdf(const PowerLawPiece& p, double t) {
  if (t <= p.lo) return 0.0;
  if (t >= p.hi) return p.mass;
  return p.mass * std::pow((t - p.lo) / (p.hi - p.lo), p.exponent + 1.0);
}

}  // namespace

double DisorderLaw::cdf(double t) const {
  double f = 0.0;
  for (const auto& a : atoms_)
    if (a.location <= t) f += a.weight;
  for (const auto& p : pieces_) f += piece_cdf(p, t);
  return std::min(f, 1.0);
}

double DisorderLaw::cdf_left(double t) const {
  double f = 0.0;
  for (const auto& a : atoms_)
    if (a.location < t) f += a.weight;
  for (const auto& p : pieces_) f += piece_cdf(p, t);
  return std::min(f, 1.0);
}

double DisorderLaw::quantile(double u) const {
  if (!(u >= 0.0) || u >= 1.0) throw std::domain_error("quantile level outside [0, 1)");
  std::vector<double> breaks;
  for (const auto& a : atoms_)
    if (a.weight > 0.0) breaks.push_back(a.location);
  for (const auto& p : pieces_) {
    if (p.mass <= 0.0) continue;
    breaks.push_back(p.lo);
    breaks.push_back(p.hi);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  double prev = breaks.front();
  for (double b : breaks) {
    if (cdf(b) <= u) {
      prev = b;
      continue;
    }
    if (cdf_left(b) <= u) return b;
    // F is continuous and increasing on (prev, b) and crosses u there.
    double lo = prev;
    double hi = b;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (cdf(mid) > u) hi = mid; else lo = mid;
    }
    return hi;
  }
  return breaks.back();
}

}  // namespace hydrolab
