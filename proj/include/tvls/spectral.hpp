#pragma once

#include "tvls/errors.hpp"
#include "tvls/kernels.hpp"
#include "tvls/linalg.hpp"
#include "tvls/model.hpp"
#include "tvls/quadrature.hpp"
#include "tvls/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace tvls {

/// Grid resolution shared by the frequency-domain operations. Unset truncations
/// are derived from `certificate`; without one they must be given explicitly.
struct SpectralConfig {
  double du = 0.01;
  std::optional<double> u_max;
  std::optional<double> s_max;
  double ds = 0.05;
  TransitionOptions transition;
  const StabilityCertificate* certificate = nullptr;

  double resolved_u_max() const {
    if (u_max) return *u_max;
    require(certificate != nullptr, "U_max must be given when no stability certificate is available");
    return default_u_max(*certificate);
  }
  /// 30 / lambda from the certificate.
  double resolved_s_max() const {
    if (s_max) return *s_max;
    require(certificate != nullptr, "s_max must be given when no stability certificate is available");
    certificate->validate();
    return 30.0 / certificate->lambda;
  }
  KernelOptions kernel_options() const { return {transition, certificate}; }
};

/// k * dl for k = -n..n, n = round(lmax / dl); exactly symmetric about 0.
inline std::vector<double> lambda_grid(double lmax, double dl) {
  require(lmax >= 0.0 && dl > 0.0, "lambda grid needs lmax >= 0 and dl > 0");
  const long n = std::lround(lmax / dl);
  std::vector<double> out;
  out.reserve(2 * n + 1);
  for (long k = -n; k <= n; ++k) out.push_back(k * dl);
  return out;
}

namespace detail {

// int_0^1 (1 - x) exp(-c x) dx.
inline Complex half_hat(Complex c) {
  if (std::abs(c) < 1e-3) return 0.5 - c / 6.0 + c * c / 24.0 - c * c * c / 120.0;
  return 1.0 / c - (1.0 - std::exp(-c)) / (c * c);
}

inline Complex transfer_at(const KernelGrid& k, double mu) {
  const std::size_t n = k.size();
  const double du = k.du;
  const double theta = mu * du;
  const Complex c(0.0, theta);
  const double half = 0.5 * theta;
  const double sinc = half == 0.0 ? 1.0 : std::sin(half) / half;
  const Complex rot = std::polar(1.0, -theta);
  Complex z = rot;
  Complex interior(0.0, 0.0);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    interior += k.values[j] * z;
    z = (j % 256 == 255) ? std::polar(1.0, -mu * du * (j + 1)) : z * rot;
  }
  const Complex last = std::polar(1.0, -mu * du * (n - 1));
  return du * (half_hat(c) * k.values[0] + sinc * sinc * interior + half_hat(-c) * k.values[n - 1] * last);
}

}  // namespace detail

/// A(t, mu) = int e^{-i mu u} g(t, u) du for the piecewise-linear interpolant of
/// the kernel grid (the trapezoid rule at mu = 0). Evaluated at |mu| and
/// conjugated for negative mu, so A(-mu) = conj(A(mu)) exactly.
inline std::vector<Complex> transfer_function(const KernelGrid& k, const std::vector<double>& mu) {
  require(k.size() >= 2, "transfer_function needs a kernel grid with at least two points");
  std::vector<Complex> out(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const Complex v = detail::transfer_at(k, std::abs(mu[i]));
    out[i] = mu[i] < 0.0 ? std::conj(v) : v;
  }
  return out;
}

enum class SpectrumKind { spectral_density, wigner_ville };

inline std::string to_string(SpectrumKind k) {
  return k == SpectrumKind::spectral_density ? "spectral_density" : "wigner_ville";
}

struct SpectrumGrid {
  double t = 0.0;
  int n = kLimit;
  std::vector<double> lambda;
  std::vector<double> values;
  SpectrumKind kind = SpectrumKind::spectral_density;
  std::vector<std::string> warnings;
};

/// f(t, lambda) = Sigma_L / (2 pi) |A(t, lambda)|^2 from the limit kernel.
inline SpectrumGrid spectral_density(const StateSpaceModel& m, double t, const std::vector<double>& lambda,
                                     const SpectralConfig& config = {}) {
  m.levy.require_nondegenerate();
  const KernelGrid g = kernel_grid(m, kLimit, t, config.resolved_u_max(), config.du, config.kernel_options());
  const auto a = transfer_function(g, lambda);
  SpectrumGrid out;
  out.t = t;
  out.kind = SpectrumKind::spectral_density;
  out.lambda = lambda;
  out.warnings = g.warnings;
  out.values.resize(lambda.size());
  const double scale = m.levy.sigma_l() / (2.0 * std::numbers::pi);
  for (std::size_t i = 0; i < lambda.size(); ++i) out.values[i] = scale * std::norm(a[i]);
  return out;
}

/// Cov(Y_N(t1), Y_N(t2)) = Sigma_L int_0^{U_max} g_N(N t1, v + N (t1 - t2)) g_N(N t2, v) dv
/// for t1 >= t2 (arguments are swapped otherwise).
inline double covariance(const StateSpaceModel& m, int n, double t1, double t2, const SpectralConfig& config = {}) {
  require(n >= 1, "covariance needs a finite positive N");
  if (t1 < t2) std::swap(t1, t2);
  const double u_max = config.resolved_u_max();
  const int count = grid_count(u_max, config.du);
  const double shift = n * (t1 - t2);
  const auto g1 = kernel_samples(m, n, t1, shift, config.du, count, config.transition);
  const auto g2 = t1 == t2 ? g1 : kernel_samples(m, n, t2, 0.0, config.du, count, config.transition);
  std::vector<double> prod(count);
  for (int k = 0; k < count; ++k) prod[k] = g1[k] * g2[k];
  return m.levy.sigma_l() * (count < 2 ? 0.0 : quad::trapezoid(prod, config.du));
}

/// c_N(s) = Cov(Y_N(t + s/2N), Y_N(t - s/2N)) for s = 0, ds, ..., s_max.
inline std::vector<double> wigner_ville_covariances(const StateSpaceModel& m, int n, double t, double s_max,
                                                    double ds, const SpectralConfig& config = {}) {
  require(s_max > 0.0 && ds > 0.0, "Wigner-Ville needs s_max > 0 and ds > 0");
  const long count = std::lround(s_max / ds) + 1;
  std::vector<double> c(count);
  for (long k = 0; k < count; ++k) {
    const double s = k * ds;
    c[k] = covariance(m, n, t + s / (2.0 * n), t - s / (2.0 * n), config);
  }
  return c;
}

/// f_N(t, lambda) = (1/2 pi) int cos(lambda s) c_N(s) ds over [-s_max, s_max] by
/// the trapezoid rule, using c_N(-s) = c_N(s). The sine part cancels exactly by
/// the symmetric summation.
inline SpectrumGrid wigner_ville(const StateSpaceModel& m, int n, double t, const std::vector<double>& lambda,
                                 double s_max, double ds, const SpectralConfig& config = {}) {
  m.levy.require_nondegenerate();
  const auto c = wigner_ville_covariances(m, n, t, s_max, ds, config);
  SpectrumGrid out;
  out.t = t;
  out.n = n;
  out.kind = SpectrumKind::wigner_ville;
  out.lambda = lambda;
  out.values.resize(lambda.size());
  if (std::abs(c.back()) > 1e-4 * std::abs(c.front())) {
    std::ostringstream msg;
    msg << "covariance at s_max = " << s_max << " is " << c.back() << ", above 1e-4 of c_N(0) = " << c.front();
    out.warnings.push_back(msg.str());
  }
  const std::size_t last = c.size() - 1;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    double acc = c[0];
    for (std::size_t k = 1; k <= last; ++k) acc += (k == last ? 1.0 : 2.0) * c[k] * std::cos(lambda[i] * k * ds);
    out.values[i] = acc * ds / (2.0 * std::numbers::pi);
  }
  return out;
}

/// Trapezoid L2 distance between two spectra on the same lambda grid.
inline double spectrum_distance(const SpectrumGrid& a, const SpectrumGrid& b) {
  require(a.lambda == b.lambda, "spectra must share the lambda grid");
  require(a.lambda.size() >= 2, "spectrum grid needs at least two points");
  std::vector<double> sq(a.values.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = (a.values[i] - b.values[i]) * (a.values[i] - b.values[i]);
  return std::sqrt(quad::trapezoid(sq, a.lambda[1] - a.lambda[0]));
}

/// ||f_N(t, .) - f(t, .)||_{L2(lambda grid)} for each N. Only the sufficient
/// route (exponential stability with bounded B and C) is checked; the remaining
/// hypotheses are recorded as assumed.
inline ConvergenceTable wv_convergence(const StateSpaceModel& m, double t, const std::vector<double>& lambda,
                                       const std::vector<int>& n_list, const SpectralConfig& config = {}) {
  require(!n_list.empty(), "N list must not be empty");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    require(n_list[i] >= 1, "N values must be positive integers");
    if (i > 0) require(n_list[i] > n_list[i - 1], "N list must be increasing");
  }
  const double u_max = config.resolved_u_max();
  const double s_max = config.resolved_s_max();
  ConvergenceTable table;
  table.window_lo = t - u_max / n_list.front() - s_max / (2.0 * n_list.front());
  table.window_hi = t + s_max / (2.0 * n_list.front());

  bool ok = m.is_continuous();
  std::ostringstream win;
  win << "checked window [" << table.window_lo << ", " << table.window_hi << "]";
  table.notes.push_back(win.str());
  if (config.certificate) {
    table.notes.push_back("exponential stability: certificate supplied (route " + to_string(config.certificate->route) + ")");
  } else if (m.A.is_continuous()) {
    const auto rep = certify(m.A, table.window_lo, table.window_hi);
    table.notes.push_back(std::string("exponential stability: ") + (rep.passes ? "verified" : "not verified") + " (" +
                          rep.message + ")");
    ok = ok && rep.passes;
  } else {
    ok = false;
  }
  const bool bounded = std::isfinite(sampled_sup_norm(m.B, table.window_lo, table.window_hi)) &&
                       std::isfinite(sampled_sup_norm(m.C, table.window_lo, table.window_hi));
  table.notes.push_back(std::string("bounded B, C: ") + (bounded ? "verified" : "not verified"));
  table.notes.push_back("L2 bounds on A_N and its lambda-derivative: assumed");
  ok = ok && bounded;
  table.preconditions = ok ? "verified" : "unverified-preconditions";

  const auto f = spectral_density(m, t, lambda, config);
  std::vector<double> d;
  for (int n : n_list) {
    const auto fn = wigner_ville(m, n, t, lambda, s_max, config.ds, config);
    d.push_back(spectrum_distance(fn, f));
    table.rows.push_back({n, d.back()});
  }
  table.passes = convergence_passes(d);
  return table;
}

struct ParsevalReport {
  double kernel_norm2 = 0.0;    // trapezoid int g^2 du
  double spectral_norm2 = 0.0;  // (1/2 pi) int |A|^2 dmu over [-lambda_max, lambda_max]
  double rel_err = 0.0;
  double lambda_max = 0.0;
};

/// Plancherel check on a kernel grid. The default frequency range is the larger
/// of the Nyquist limit pi/du and the range where the |A|^2 ~ g(0)^2 / mu^2 tail
/// left out falls below 1e-3 of the mass.
inline ParsevalReport parseval_check(const KernelGrid& g, double dl = 0.05, std::optional<double> lmax = {}) {
  ParsevalReport r;
  r.kernel_norm2 = l2_norm_squared(g);
  const double g0 = g.values.front();
  double range = std::numbers::pi / g.du;
  if (r.kernel_norm2 > 0.0) range = std::max(range, g0 * g0 / (std::numbers::pi * 1e-3 * r.kernel_norm2));
  r.lambda_max = lmax ? *lmax : std::min(range, 2e4);
  const auto mu = lambda_grid(r.lambda_max, dl);
  const auto a = transfer_function(g, mu);
  std::vector<double> sq(a.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = std::norm(a[i]);
  r.spectral_norm2 = quad::trapezoid(sq, dl) / (2.0 * std::numbers::pi);
  r.rel_err = r.kernel_norm2 > 0.0 ? std::abs(r.spectral_norm2 - r.kernel_norm2) / r.kernel_norm2
                                   : std::abs(r.spectral_norm2);
  return r;
}

}  // namespace tvls
