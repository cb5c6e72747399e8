#pragma once

// Reference computations used by the tests. Everything here is written
// against closed forms or plain textbook quadrature and deliberately shares
// no code with the library under test.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using Mat2 = std::array<std::array<double, 2>, 2>;

inline Mat2 mul(const Mat2& x, const Mat2& y) {
  Mat2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
  return r;
}

/// exp(A) for a 2x2 matrix with distinct real eigenvalues, by Sylvester's formula.
inline Mat2 expm2_real_distinct(const Mat2& a) {
  const double tr = a[0][0] + a[1][1];
  const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
  const double disc = std::sqrt(tr * tr / 4.0 - det);
  const double l1 = tr / 2.0 + disc;
  const double l2 = tr / 2.0 - disc;
  const double e1 = std::exp(l1), e2 = std::exp(l2);
  Mat2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double id = i == j ? 1.0 : 0.0;
      r[i][j] = (e1 * (a[i][j] - l2 * id) - e2 * (a[i][j] - l1 * id)) / (l1 - l2);
    }
  return r;
}

/// Adaptive Simpson on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-12, int depth = 50) {
  std::function<double(double, double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole, double eps, int d) {
        const double mid = 0.5 * (lo + hi);
        const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
        const double flm = f(lm), frm = f(rm);
        const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
        const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
        if (d <= 0 || std::abs(left + right - whole) <= 15.0 * eps) return left + right + (left + right - whole) / 15.0;
        return rec(lo, mid, flo, flm, fmid, left, eps / 2.0, d - 1) + rec(mid, hi, fmid, frm, fhi, right, eps / 2.0, d - 1);
      };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, depth);
}

/// Composite Simpson with an even number of panels.
inline double simpson_fixed(const std::function<double(double)>& f, double a, double b, int panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int k = 1; k < panels; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

/// Characteristic exponent of sigma^2 W(1) plus compound Poisson jumps with
/// N(0, jump_std^2) sizes (symmetric, so no centering drift).
inline std::complex<double> levy_exponent(double sigma2, double rate, double jump_std, double z) {
  return {-0.5 * sigma2 * z * z + rate * (std::exp(-0.5 * jump_std * jump_std * z * z) - 1.0), 0.0};
}

// tvCAR(1) with a(x) = 1.5 + 0.5 tanh(x), written through its antiderivative
// A(x) = 1.5 x + 0.5 log cosh(x).
inline double tv_a(double x) { return 1.5 + 0.5 * std::tanh(x); }
inline double tv_antideriv(double x) {
  const double ax = std::abs(x);
  return 1.5 * x + 0.5 * (ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0));
}

/// g_N(Nt, u) = exp(-N (A(t) - A(t - u/N))).
inline double tv_kernel(int n, double t, double u) {
  if (u < 0.0) return 0.0;
  return std::exp(-n * (tv_antideriv(t) - tv_antideriv(t - u / n)));
}
inline double tv_limit_kernel(double t, double u) { return u < 0.0 ? 0.0 : std::exp(-tv_a(t) * u); }

/// ||g_N(Nt, .) - g(t, .)||_{L2[0, U]} by adaptive quadrature.
inline double tv_kernel_distance(int n, double t, double u_max) {
  auto sq = [&](double u) {
    const double d = tv_kernel(n, t, u) - tv_limit_kernel(t, u);
    return d * d;
  };
  double acc = 0.0;
  for (double lo = 0.0; lo < u_max; lo += 1.0) acc += simpson(sq, lo, std::min(u_max, lo + 1.0), 1e-15);
  return std::sqrt(acc);
}

/// Cov(Y_N(t1), Y_N(t2)) for the tvCAR(1) model with Sigma_L = 1.
inline double tv_covariance(int n, double t1, double t2, double v_max = 30.0) {
  if (t1 < t2) std::swap(t1, t2);
  const double shift = n * (t1 - t2);
  auto f = [&](double v) { return tv_kernel(n, t1, v + shift) * tv_kernel(n, t2, v); };
  double acc = 0.0;
  for (double lo = 0.0; lo < v_max; lo += 1.0) acc += simpson(f, lo, std::min(v_max, lo + 1.0), 1e-14);
  return acc;
}

/// Stationary CAR(1) spectral density Sigma_L / (2 pi (a^2 + lambda^2)).
inline double car1_density(double a, double sigma2, double lambda) {
  return sigma2 / (2.0 * std::numbers::pi * (a * a + lambda * lambda));
}

}  // namespace oracle
