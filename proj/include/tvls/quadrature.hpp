#pragma once

#include "tvls/errors.hpp"
#include "tvls/function.hpp"
#include "tvls/linalg.hpp"

#include <cmath>
#include <span>
#include <type_traits>
#include <vector>

namespace tvls::quad {

/// Composite Simpson rule with `panels` panels (each panel uses its midpoint).
/// Works for any value type closed under + and scalar *.
template <typename F>
auto simpson(F&& f, double a, double b, int panels) {
  require(panels >= 1, "simpson needs at least one panel");
  using Value = std::decay_t<decltype(f(a))>;
  const double h = (b - a) / panels;
  Value sum = f(a);
  sum += f(b);
  Value mids = f(a + 0.5 * h);
  for (int k = 1; k < panels; ++k) {
    sum += 2.0 * f(a + k * h);
    mids += f(a + (k + 0.5) * h);
  }
  sum += 4.0 * mids;
  return Value((h / 6.0) * sum);
}

/// Simpson integral of a matrix function over [a, b], split at the function's
/// breakpoints. Each sub-interval gets a share of `panels` proportional to its
/// length and is evaluated with one-sided limits at its ends.
inline Matrix integrate(const MatrixFunction& f, double a, double b, int panels) {
  if (b == a) return Matrix::Zero(f.rows(), f.cols());
  std::vector<double> cuts{a};
  for (double x : f.breakpoints(a, b)) cuts.push_back(x);
  cuts.push_back(b);
  Matrix total = Matrix::Zero(f.rows(), f.cols());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    const int n = std::max(1, static_cast<int>(std::ceil(panels * (hi - lo) / (b - a))));
    total += simpson(
        [&](double x) {
          const Side side = x == lo ? Side::right : (x == hi ? Side::left : Side::natural);
          return Matrix(f.evaluate(x, side));
        },
        lo, hi, n);
  }
  return total;
}

/// Trapezoid rule on uniformly spaced samples.
inline double trapezoid(std::span<const double> values, double h) {
  if (values.size() < 2) return 0.0;
  double sum = 0.5 * (values.front() + values.back());
  for (std::size_t k = 1; k + 1 < values.size(); ++k) sum += values[k];
  return sum * h;
}

/// Trapezoid weight (in units of h) of sample k out of n.
inline double trapezoid_weight(std::size_t k, std::size_t n) {
  return (k == 0 || k + 1 == n) ? 0.5 : 1.0;
}

}  // namespace tvls::quad
