#pragma once

#include <optional>
#include <vector>

namespace hydrolab {

struct Atom {
  double location = 1.0;
  double weight = 1.0;
};

/**
 * Absolutely continuous piece on [lo, hi] with density
 * mass * (k + 1) * (t - lo)^k / (hi - lo)^(k + 1), k = exponent > -1.
 * exponent 0 gives a uniform piece.
 */
struct PowerLawPiece {
  double lo = 0.0;
  double hi = 1.0;
  double mass = 1.0;
  double exponent = 0.0;

  /// Point of the piece at mass fraction s in [0, 1].
  double at_fraction(double s) const;
};

/**
 * Disorder law Q0 on [0, 1] as atoms plus power-law pieces, together with
 * the declared environment floor c <= C = inf supp Q0.
 */
class DisorderLaw {
 public:
  DisorderLaw() : DisorderLaw(std::vector<Atom>{Atom{}}, {}) {}
  DisorderLaw(std::vector<Atom> atoms, std::vector<PowerLawPiece> pieces,
              std::optional<double> floor = std::nullopt);

  static DisorderLaw dirac(double a, std::optional<double> floor = std::nullopt);
  static DisorderLaw uniform(double lo, double hi, std::optional<double> floor = std::nullopt);
  static DisorderLaw power_law(double lo, double hi, double exponent,
                               std::optional<double> floor = std::nullopt);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const std::vector<PowerLawPiece>& pieces() const noexcept { return pieces_; }

  /// C, the infimum of the support.
  double support_min() const noexcept { return support_min_; }
  /// c, the declared floor.
  double floor() const noexcept { return floor_; }
  DisorderLaw with_floor(double c) const;

  double cdf(double t) const;
  double cdf_left(double t) const;
  /// inf { t : F(t) > u } for u in [0, 1).
  double quantile(double u) const;

 private:
  std::vector<Atom> atoms_;
  std::vector<PowerLawPiece> pieces_;
  double support_min_ = 1.0;
  double floor_ = 1.0;
};

}  // namespace hydrolab
