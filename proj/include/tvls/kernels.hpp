#pragma once

#include "tvls/errors.hpp"
#include "tvls/function.hpp"
#include "tvls/linalg.hpp"
#include "tvls/matrix_exp.hpp"
#include "tvls/model.hpp"
#include "tvls/quadrature.hpp"
#include "tvls/stability.hpp"
#include "tvls/transition.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace tvls {

/// N = kLimit selects the frozen-coefficient limit kernel.
inline constexpr int kLimit = 0;

/// dX = -a(t) X dt + dL, Y = X.
inline StateSpaceModel car1_model(const ScalarFunction& a, const LevyModel& levy = {}) {
  MatrixFunction am(1, 1);
  am(0, 0) = a.negated();
  return {std::move(am), MatrixFunction::constant(Matrix::Ones(1, 1)), MatrixFunction::constant(Matrix::Ones(1, 1)),
          levy};
}

/// exp(-int_{-u}^0 a(s/N + t) ds).
inline double car1_kernel(const ScalarFunction& a, int n, double t, double u) {
  require(a.is_continuous(), "car1_kernel needs a continuous a(t) (step family rejected)");
  require(n >= 1, "N must be a positive integer");
  require(u >= 0.0, "kernel lag u must be non-negative");
  if (u == 0.0) return 1.0;
  const int panels = 2 * std::max(32, static_cast<int>(std::ceil(u / 0.02)));
  const double integral = quad::simpson([&](double s) { return a(s / n + t); }, -u, 0.0, panels);
  return std::exp(-integral);
}

inline double car1_limit_kernel(const ScalarFunction& a, double t, double u) {
  require(u >= 0.0, "kernel lag u must be non-negative");
  return std::exp(-a(t) * u);
}

struct KernelOptions {
  TransitionOptions transition;
  const StabilityCertificate* certificate = nullptr;
};

namespace detail {

/// A(s/N + t) as a function of physical time s.
inline MatrixFunction anchored(const MatrixFunction& a, int n, double t) { return a.rescaled(1.0 / n, t); }

inline double observe(const Matrix& b, const Matrix& psi, const Matrix& c) { return (b.transpose() * psi * c)(0, 0); }

}  // namespace detail

/// Finite N: B(t)' Psi_{N,t}(0, -u) C(t - u/N) where Psi_{N,t} solves the IVP
/// with coefficient A(s/N + t) forward from s = -u to 0. Limit: B(t)' exp(A(t) u) C(t).
inline double statespace_kernel(const StateSpaceModel& m, int n, double t, double u,
                                const TransitionOptions& options = {}) {
  m.validate();
  require(n >= 0, "N must be a positive integer or the limit");
  if (u < 0.0) return 0.0;
  const Matrix b = m.B.evaluate(t);
  if (n == kLimit) return detail::observe(b, matrix_exp(Matrix(m.A.evaluate(t) * u)), m.C.evaluate(t));
  const auto psi = transition(detail::anchored(m.A, n, t), -u, 0.0, options);
  return detail::observe(b, psi.value, m.C.evaluate(t - u / n));
}

/// Kernel values at lags u0 + k du, k = 0..count-1. Commuting families use a
/// cumulative Simpson integral and one exponential per point; otherwise
/// Psi(0, -u_{k+1}) = Psi(0, -u_k) Psi(-u_k, -u_{k+1}) with per-cell transitions.
inline std::vector<double> kernel_samples(const StateSpaceModel& m, int n, double t, double u0, double du,
                                          int count, const TransitionOptions& options = {}) {
  m.validate();
  require(n >= 0, "N must be a positive integer or the limit");
  require(du > 0.0 && u0 >= 0.0 && count >= 1, "kernel_samples needs du > 0, u0 >= 0, count >= 1");
  const int p = m.dimension();
  std::vector<double> out(count);
  const Matrix b = m.B.evaluate(t);
  auto lag = [&](int k) { return u0 + k * du; };

  if (n == kLimit) {
    const Matrix at = m.A.evaluate(t);
    const Matrix c = m.C.evaluate(t);
    for (int k = 0; k < count; ++k) out[k] = detail::observe(b, matrix_exp(Matrix(at * lag(k))), c);
    return out;
  }

  const MatrixFunction an = detail::anchored(m.A, n, t);
  const double far = -lag(count - 1);
  bool commuting = false;
  if (options.method == TransitionMethod::commutative_exp) {
    commutative_transition(an, far, 0.0);  // re-verifies and throws if the family does not commute
    commuting = true;
  } else if (options.method == TransitionMethod::automatic) {
    commuting = commutes_on(an, far, 0.0);
  }

  if (commuting) {
    Matrix integral = u0 > 0.0 ? quad::integrate(an, -u0, 0.0, std::max(64, static_cast<int>(std::ceil(u0 / 0.01))))
                               : Matrix::Zero(p, p);
    for (int k = 0; k < count; ++k) {
      if (k > 0) integral += quad::integrate(an, -lag(k), -lag(k - 1), std::max(2, static_cast<int>(std::ceil(du / 0.01))));
      out[k] = detail::observe(b, matrix_exp(integral), m.C.evaluate(t - lag(k) / n));
    }
    return out;
  }

  TransitionOptions cell = options;
  if (cell.method == TransitionMethod::automatic) cell.method = TransitionMethod::ode;
  auto step = [&](double lo, double hi) {
    TransitionOptions o = cell;
    if (o.method == TransitionMethod::ode && o.steps <= 0) {
      const double sup = std::max(1.0, sampled_sup_norm(an, lo, hi, 3));
      o.steps = std::max(4, static_cast<int>(std::ceil(sup * (hi - lo) / 0.01)));
    }
    return transition(an, lo, hi, o).value;
  };
  Matrix psi = Matrix::Identity(p, p);
  if (u0 > 0.0) psi = step(-u0, 0.0);
  for (int k = 0; k < count; ++k) {
    if (k > 0) psi = psi * step(-lag(k), -lag(k - 1));
    out[k] = detail::observe(b, psi, m.C.evaluate(t - lag(k) / n));
  }
  return out;
}

/// g(t, .) sampled at u = 0, du, ..., U_max.
struct KernelGrid {
  double t = 0.0;
  int n = kLimit;
  double u_max = 0.0;
  double du = 0.0;
  std::vector<double> values;
  std::optional<double> tail_bound;
  std::vector<std::string> warnings;

  std::size_t size() const { return values.size(); }
  double u(std::size_t k) const { return k * du; }
};

inline int grid_count(double u_max, double du) {
  require(u_max > 0.0 && du > 0.0, "kernel grid needs U_max > 0 and du > 0");
  return static_cast<int>(std::llround(u_max / du)) + 1;
}

/// -ln(1e-8 * 2 lambda / gamma^2) / (2 lambda): the lag where the certified tail
/// gamma^2 exp(-2 lambda U) / (2 lambda) drops to 1e-8.
inline double default_u_max(const StabilityCertificate& cert) {
  cert.validate();
  return std::max(1e-3, -std::log(1e-8 * 2.0 * cert.lambda / (cert.gamma * cert.gamma)) / (2.0 * cert.lambda));
}

inline double l2_norm_squared(const KernelGrid& k) {
  std::vector<double> sq(k.values.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = k.values[i] * k.values[i];
  return sq.size() < 2 ? 0.0 : quad::trapezoid(sq, k.du);
}

inline KernelGrid kernel_grid(const StateSpaceModel& m, int n, double t, double u_max, double du,
                              const KernelOptions& options = {}) {
  KernelGrid grid;
  grid.t = t;
  grid.n = n;
  grid.du = du;
  const int count = grid_count(u_max, du);
  grid.u_max = (count - 1) * du;
  grid.values = kernel_samples(m, n, t, 0.0, du, count, options.transition);
  if (options.certificate) {
    const auto& cert = *options.certificate;
    cert.validate();
    const double c_sup = n == kLimit ? m.C.evaluate(t).norm()
                                     : sampled_sup_norm(m.C, t - grid.u_max / n, t, 65);
    const double scale = m.B.evaluate(t).norm() * c_sup * cert.gamma;
    grid.tail_bound = scale * scale * std::exp(-2.0 * cert.lambda * grid.u_max) / (2.0 * cert.lambda);
    const double mass = l2_norm_squared(grid);
    if (mass > 0.0 && *grid.tail_bound > 1e-6 * mass) {
      std::ostringstream msg;
      msg << "tail bound " << *grid.tail_bound << " beyond U_max = " << grid.u_max << " exceeds 1e-6 of the L2 mass "
          << mass;
      grid.warnings.push_back(msg.str());
    }
  }
  return grid;
}

/// Trapezoid approximation of ||k1 - k2||_{L2[0, U_max]}.
inline double l2_distance(const KernelGrid& k1, const KernelGrid& k2) {
  require(k1.size() == k2.size() && k1.du == k2.du, "l2_distance needs identical u grids");
  std::vector<double> sq(k1.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const double d = k1.values[i] - k2.values[i];
    sq[i] = d * d;
  }
  return sq.size() < 2 ? 0.0 : std::sqrt(quad::trapezoid(sq, k1.du));
}

struct ConvergenceRow {
  int n = 1;
  double distance = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  bool passes = false;
  std::string preconditions;  // "verified" or "unverified-preconditions"
  std::vector<std::string> notes;
  double window_lo = 0.0;
  double window_hi = 0.0;
};

/// Non-increasing from the second entry on and the last value below a tenth of
/// the first, or every distance at the quadrature floor.
inline bool convergence_passes(const std::vector<double>& d) {
  if (d.empty()) return false;
  if (std::all_of(d.begin(), d.end(), [](double x) { return x < 1e-9; })) return true;
  for (std::size_t i = 2; i < d.size(); ++i)
    if (d[i] > d[i - 1]) return false;
  return d.back() < 0.1 * d.front();
}

/// Sufficient conditions for kernel convergence on the window
/// [t - U_max / N_min, t]. Scalar models: continuous a with a >= eps > 0.
/// General p: continuous coefficients, bounded B and C, and a stability certificate.
inline std::pair<bool, std::vector<std::string>> kernel_preconditions(const StateSpaceModel& m, double lo, double hi,
                                                                      const StabilityCertificate* cert) {
  std::vector<std::string> notes;
  bool ok = true;
  std::ostringstream win;
  win << "checked window [" << lo << ", " << hi << "]";
  notes.push_back(win.str());
  if (!m.is_continuous()) {
    ok = false;
    notes.push_back("coefficients are not continuous");
  }
  if (m.dimension() == 1) {
    double min_a = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 256; ++k) {
      const double s = lo + (hi - lo) * k / 256.0;
      min_a = std::min(min_a, -m.A.evaluate(s, k == 0 ? Side::right : Side::left)(0, 0));
    }
    std::ostringstream msg;
    msg << "min a(s) on window = " << min_a;
    notes.push_back(msg.str());
    if (!(min_a > 0.0)) ok = false;
  } else {
    const double bsup = sampled_sup_norm(m.B, lo, hi, 65);
    const double csup = sampled_sup_norm(m.C, lo, hi, 65);
    if (!std::isfinite(bsup) || !std::isfinite(csup)) {
      ok = false;
      notes.push_back("B or C unbounded on the window");
    }
    if (cert) {
      notes.push_back("stability certificate supplied (route " + to_string(cert->route) + ")");
    } else if (m.A.is_continuous()) {
      const auto rep = certify(m.A, lo, hi);
      notes.push_back("stability: " + rep.message);
      if (!rep.passes) ok = false;
    } else {
      ok = false;
    }
  }
  return {ok, notes};
}

/// ||g_N(Nt, .) - g(t, .)||_{L2} for each N.
inline ConvergenceTable convergence_diagnostic(const StateSpaceModel& m, double t, const std::vector<int>& n_list,
                                               double u_max, double du, const KernelOptions& options = {}) {
  require(!n_list.empty(), "N list must not be empty");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    require(n_list[i] >= 1, "N values must be positive integers");
    if (i > 0) require(n_list[i] > n_list[i - 1], "N list must be increasing");
  }
  ConvergenceTable table;
  table.window_lo = t - u_max / n_list.front();
  table.window_hi = t;
  auto [ok, notes] = kernel_preconditions(m, table.window_lo, table.window_hi, options.certificate);
  table.preconditions = ok ? "verified" : "unverified-preconditions";
  table.notes = std::move(notes);
  const KernelGrid limit = kernel_grid(m, kLimit, t, u_max, du, options);
  std::vector<double> d;
  for (int n : n_list) {
    const KernelGrid g = kernel_grid(m, n, t, u_max, du, options);
    d.push_back(l2_distance(g, limit));
    table.rows.push_back({n, d.back()});
  }
  table.passes = convergence_passes(d);
  return table;
}

}  // namespace tvls
