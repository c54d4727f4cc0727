#include <stdexcept>

#include "hydrolab/riemann.hpp"

namespace hydrolab {

std::vector<double> concave_envelope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("envelope needs matching grids");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) throw std::invalid_argument("grid not sorted");
  if (x.size() <= 2) return y;

  // Monotone chain, upper hull only.
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < x.size(); ++i) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2];
      const std::size_t b = hull.back();
      const double cross = (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a]);
      if (cross >= 0.0) hull.pop_back(); else break;
    }
    hull.push_back(i);
  }

  std::vector<double> out(x.size());
  std::size_t seg = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    while (seg + 1 < hull.size() && hull[seg + 1] < k) ++seg;
    const std::size_t a = hull[seg];
    if (a == k) {
      out[k] = y[k];
      continue;
    }
    const std::size_t b = hull[seg + 1];
    if (b == k) {
      out[k] = y[k];
      continue;
    }
    out[k] = y[a] + (y[b] - y[a]) * (x[k] - x[a]) / (x[b] - x[a]);
  }
  return out;
}

}  // namespace hydrolab
