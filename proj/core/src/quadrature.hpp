#pragma once

#include <functional>

namespace hydrolab::detail {

/// Fixed 24-point Gauss-Legendre rule on [a, b].
double gauss_legendre(const std::function<double(double)>& f, double a, double b);

/**
 * Integral of f over [0, 1] by Gauss-Legendre panels on dyadic shells toward 0.
 * With may_diverge, a shell sequence that stops decaying returns +infinity.
 */
double integrate_unit_interval(const std::function<double(double)>& f, bool may_diverge);

}  // namespace hydrolab::detail
