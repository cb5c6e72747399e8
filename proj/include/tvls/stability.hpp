#pragma once

#include "tvls/errors.hpp"
#include "tvls/function.hpp"
#include "tvls/linalg.hpp"
#include "tvls/matrix_exp.hpp"
#include "tvls/model.hpp"
#include "tvls/quadrature.hpp"
#include "tvls/transition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace tvls {

enum class CertificateRoute { lambda_max, eigen_bound, diagonalizable, cesaro_bound, user_supplied };

inline std::string to_string(CertificateRoute r) {
  switch (r) {
    case CertificateRoute::lambda_max: return "lambda_max";
    case CertificateRoute::eigen_bound: return "eigen_bound";
    case CertificateRoute::diagonalizable: return "diagonalizable";
    case CertificateRoute::cesaro_bound: return "cesaro_bound";
    case CertificateRoute::user_supplied: return "user_supplied";
  }
  return "unknown";
}

inline CertificateRoute route_from_string(const std::string& s) {
  for (auto r : {CertificateRoute::lambda_max, CertificateRoute::eigen_bound, CertificateRoute::diagonalizable,
                 CertificateRoute::cesaro_bound, CertificateRoute::user_supplied})
    if (to_string(r) == s) return r;
  throw PreconditionError("unknown certificate route '" + s + "'");
}

/// Claims ||Psi_{N,t}(s, s0)||_2 <= gamma exp(-lambda (s - s0)) while the rescaled
/// times stay inside `window`. Nothing is claimed outside the window.
struct StabilityCertificate {
  double gamma = 1.0;
  double lambda = 1.0;
  CertificateRoute route = CertificateRoute::user_supplied;
  double window_lo = 0.0;
  double window_hi = 0.0;
  int grid_points = 0;
  bool empirical_gamma = false;

  void validate() const {
    require(std::isfinite(gamma) && gamma > 0.0, "certificate gamma must be positive");
    require(std::isfinite(lambda) && lambda > 0.0, "certificate lambda must be positive");
  }
};

struct StabilityReport {
  bool passes = false;
  std::string route;
  std::optional<StabilityCertificate> certificate;
  std::string message;
  // Route-specific diagnostics; NaN when not computed.
  double sup_lambda_max = std::numeric_limits<double>::quiet_NaN();
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
  double mu = std::numeric_limits<double>::quiet_NaN();
};

struct StabilityOptions {
  int grid_points = 201;
  std::vector<int> n_list{1, 4, 16, 64};
  int start_points = 32;  // empirical gamma
};

namespace detail {

inline std::vector<double> uniform_grid(double lo, double hi, int n) {
  require(n >= 2, "grid needs at least two points");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

inline double lambda_max_sym(const Matrix& a) {
  const Matrix s = a + a.transpose();
  if (s.rows() == 1) return s(0, 0);
  return Eigen::SelfAdjointEigenSolver<Matrix>(s, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
}

inline Eigen::VectorXcd eigenvalues(const Matrix& a) {
  if (a.rows() == 1) return Eigen::VectorXcd::Constant(1, Complex(a(0, 0), 0.0));
  return Eigen::EigenSolver<Matrix>(a, false).eigenvalues();
}

inline double max_real_eigenvalue(const Matrix& a) { return eigenvalues(a).real().maxCoeff(); }

inline void require_window(double lo, double hi) {
  require(std::isfinite(lo) && std::isfinite(hi) && hi > lo, "stability window must satisfy lo < hi");
}

}  // namespace detail

/// max over the window of ||Psi_{N,0}(s, s0)|| exp(lambda (s - s0)) for each N in
/// `n_list`, sampled along RK4 trajectories started at `start_points` rescaled
/// times, together with the frozen-coefficient limit ||exp(A(tau) u)|| exp(lambda u).
inline double empirical_gamma(const MatrixFunction& a, double lo, double hi, double lambda,
                              const StabilityOptions& options = {}) {
  detail::require_window(lo, hi);
  require(lambda > 0.0, "empirical gamma needs lambda > 0");
  const double alpha = std::max(1.0, sampled_sup_norm(a, lo, hi, 65));
  const double horizon = std::max(hi - lo, 12.0 / lambda);
  const double h = std::min(0.01, 0.1 / alpha);
  double worst = 1.0;
  for (int n : options.n_list) {
    require(n >= 1, "N must be a positive integer");
    const MatrixFunction an = a.rescaled(1.0 / n, 0.0);
    for (int k = 0; k < options.start_points; ++k) {
      const double tau0 = lo + (hi - lo) * k / options.start_points;
      const double s0 = n * tau0;
      const double s1 = std::min(n * hi, s0 + horizon);
      const int steps = std::max(1, static_cast<int>(std::ceil((s1 - s0) / h)));
      const auto traj = ode_trajectory(an, s0, s1, steps);
      for (int j = 0; j < static_cast<int>(traj.size()); ++j)
        worst = std::max(worst, spectral_norm(traj[j]) * std::exp(lambda * (s1 - s0) * j / steps));
    }
  }
  const int frozen = std::max(2, options.start_points);
  for (int k = 0; k <= frozen; ++k) {
    const Matrix ak = a.evaluate(lo + (hi - lo) * k / frozen);
    const int steps = static_cast<int>(std::ceil(horizon / h));
    const Matrix step = matrix_exp(Matrix(ak * h));
    Matrix psi = Matrix::Identity(ak.rows(), ak.cols());
    for (int j = 1; j <= steps; ++j) {
      psi = step * psi;
      worst = std::max(worst, spectral_norm(psi) * std::exp(lambda * h * j));
    }
  }
  return worst;
}

/// Route (a): sup lambda_max(A + A') <= -2 lambda* < 0 gives gamma = 1, lambda = lambda*.
/// Otherwise the integral criterion int lambda_max <= -lambda' (s - s0) + gamma' is
/// tried on the grid for each N (in physical time s the integrand is N-times
/// stretched), giving ||Psi|| <= exp(gamma'/2) exp(-lambda'/2 (s - s0)).
inline StabilityReport lambda_max_check(const MatrixFunction& a, double lo, double hi,
                                        const StabilityOptions& options = {}) {
  detail::require_window(lo, hi);
  require(options.grid_points >= 16, "lambda_max check needs at least 16 grid points");
  StabilityReport report;
  report.route = "lambda_max";
  const auto grid = detail::uniform_grid(lo, hi, options.grid_points);
  std::vector<double> lm(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    lm[i] = detail::lambda_max_sym(a.evaluate(grid[i], i == 0 ? Side::right : Side::left));
  report.sup_lambda_max = *std::max_element(lm.begin(), lm.end());
  if (report.sup_lambda_max < 0.0) {
    StabilityCertificate cert;
    cert.gamma = 1.0;
    cert.lambda = -0.5 * report.sup_lambda_max;
    cert.route = CertificateRoute::lambda_max;
    cert.window_lo = lo;
    cert.window_hi = hi;
    cert.grid_points = options.grid_points;
    report.certificate = cert;
    report.passes = true;
    report.message = "sup lambda_max(A+A') < 0 on the grid";
    return report;
  }

  const double h = (hi - lo) / (grid.size() - 1);
  double mean = 0.0;
  for (std::size_t i = 0; i < lm.size(); ++i) mean += quad::trapezoid_weight(i, lm.size()) * h * lm[i];
  mean /= hi - lo;
  if (mean < 0.0) {
    // Largest rise of the cumulative integral of lambda_max + lambda' over the grid.
    auto max_rise = [&](double shift) {
      double cum = 0.0;
      double low = 0.0;
      double rise = 0.0;
      for (std::size_t i = 1; i < lm.size(); ++i) {
        cum += 0.5 * h * (lm[i - 1] + lm[i]) + shift * h;
        rise = std::max(rise, cum - low);
        low = std::min(low, cum);
      }
      return rise;
    };
    for (double frac : {0.9, 0.75, 0.5, 0.25, 0.1}) {
      const double lam = -frac * mean;
      double gamma_prime = 0.0;
      for (int n : options.n_list) gamma_prime = std::max(gamma_prime, n * max_rise(lam));
      if (gamma_prime < 50.0) {
        StabilityCertificate cert;
        cert.gamma = std::exp(0.5 * gamma_prime);
        cert.lambda = 0.5 * lam;
        cert.route = CertificateRoute::lambda_max;
        cert.window_lo = lo;
        cert.window_hi = hi;
        cert.grid_points = options.grid_points;
        report.certificate = cert;
        report.passes = true;
        report.message = "integral criterion on lambda_max holds for the listed N";
        return report;
      }
    }
  }
  std::ostringstream msg;
  msg << "sup lambda_max(A+A') = " << report.sup_lambda_max
      << " >= 0 and the integral criterion failed; try route eigen_bound";
  report.message = msg.str();
  return report;
}

/// Route (b): bounded A and dA/dt with Re eig(A) <= -mu < 0. The bound exists
/// without explicit constants, so lambda = mu/2 and gamma is measured.
inline StabilityReport eigen_bound_check(const MatrixFunction& a, double lo, double hi,
                                         const StabilityOptions& options = {}) {
  detail::require_window(lo, hi);
  require(a.is_continuous(), "eigen_bound route needs a continuously differentiable A (step family rejected)");
  StabilityReport report;
  report.route = "eigen_bound";
  const auto grid = detail::uniform_grid(lo, hi, options.grid_points);
  double alpha = 0.0;
  double beta = 0.0;
  double max_re = -std::numeric_limits<double>::infinity();
  for (double t : grid) {
    const Matrix at = a.evaluate(t);
    alpha = std::max(alpha, spectral_norm(at));
    beta = std::max(beta, spectral_norm(a.derivative(t, 1)));
    max_re = std::max(max_re, detail::max_real_eigenvalue(at));
  }
  report.alpha = alpha;
  report.beta = beta;
  report.mu = -max_re;
  if (!(std::isfinite(alpha) && std::isfinite(beta)) || !(report.mu > 0.0)) {
    std::ostringstream msg;
    msg << "max Re eig(A) = " << max_re << " (margin " << report.mu << "), alpha = " << alpha
        << ", beta = " << beta;
    report.message = msg.str();
    return report;
  }
  StabilityCertificate cert;
  cert.lambda = 0.5 * report.mu;
  cert.gamma = 1.02 * empirical_gamma(a, lo, hi, cert.lambda, options);
  cert.route = CertificateRoute::eigen_bound;
  cert.window_lo = lo;
  cert.window_hi = hi;
  cert.grid_points = options.grid_points;
  cert.empirical_gamma = true;
  report.certificate = cert;
  report.passes = true;
  report.message = "empirical-gamma: lambda = mu/2, gamma maximised over trajectories in the window";
  return report;
}

struct CommutativeRouteReport {
  bool commutative = false;
  bool d1_diagonalizable = false;
  bool d2_cesaro_bounded = false;
  double mu = 0.0;
  double max_condition = 0.0;
  double cesaro_sup = 0.0;
  std::optional<StabilityCertificate> certificate;
};

/// Commutative family, diagonalizable A(t) (eigenvector condition < 1e8) and a
/// bounded Cesaro mean. On a finite window the Cesaro mean is always bounded, so
/// D2 only reports the sampled supremum.
inline CommutativeRouteReport commutative_route_check(const MatrixFunction& a, double lo, double hi,
                                                      const StabilityOptions& options = {}) {
  detail::require_window(lo, hi);
  CommutativeRouteReport report;
  const int p = a.rows();
  const double scale = std::max(1.0, std::pow(sampled_sup_norm(a, lo, hi, 33), 2));
  report.commutative = check_commutativity(a, lo, hi, 33, 1e-10 * scale).passes;

  const auto grid = detail::uniform_grid(lo, hi, options.grid_points);
  double max_re = -std::numeric_limits<double>::infinity();
  bool diag = true;
  for (double t : grid) {
    const Matrix at = a.evaluate(t);
    max_re = std::max(max_re, detail::max_real_eigenvalue(at));
    if (p == 1) {
      report.max_condition = std::max(report.max_condition, 1.0);
      continue;
    }
    Eigen::EigenSolver<Matrix> es(at, true);
    const Eigen::JacobiSVD<ComplexMatrix> svd(es.eigenvectors());
    const auto& sv = svd.singularValues();
    const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                                : std::numeric_limits<double>::infinity();
    report.max_condition = std::max(report.max_condition, cond);
    if (!(cond < 1e8)) diag = false;
  }
  report.d1_diagonalizable = diag;
  report.mu = -max_re;

  const double len = hi - lo;
  for (int k = 0; k <= 30; ++k) {
    const double x = lo + len * std::pow(2.0, -k);
    const double width = x - lo;
    const Matrix mean = quad::integrate(a, lo, x, 64) / width;
    report.cesaro_sup = std::max(report.cesaro_sup, spectral_norm(mean));
  }
  report.d2_cesaro_bounded = std::isfinite(report.cesaro_sup);

  if (report.commutative && report.d1_diagonalizable && report.d2_cesaro_bounded && report.mu > 0.0) {
    StabilityCertificate cert;
    cert.lambda = 0.5 * report.mu;
    cert.gamma = 1.02 * empirical_gamma(a, lo, hi, cert.lambda, options);
    cert.route = CertificateRoute::diagonalizable;
    cert.window_lo = lo;
    cert.window_hi = hi;
    cert.grid_points = options.grid_points;
    cert.empirical_gamma = true;
    report.certificate = cert;
  }
  return report;
}

/// Tries lambda_max, then eigen_bound, then the commutative route.
inline StabilityReport certify(const MatrixFunction& a, double lo, double hi,
                               const StabilityOptions& options = {}) {
  auto first = lambda_max_check(a, lo, hi, options);
  if (first.passes) return first;
  if (a.is_continuous()) {
    auto second = eigen_bound_check(a, lo, hi, options);
    if (second.passes) return second;
    auto third = commutative_route_check(a, lo, hi, options);
    if (third.certificate) {
      StabilityReport r;
      r.passes = true;
      r.route = "diagonalizable";
      r.certificate = third.certificate;
      r.mu = third.mu;
      r.message = "commutative, diagonalizable family with negative spectral abscissa";
      return r;
    }
    second.message = first.message + "; " + second.message;
    return second;
  }
  return first;
}

/// Largest observed ratio ||Psi(s, s0)||_2 / (gamma exp(-lambda (s - s0))) over
/// `pairs` pseudo-random pairs inside the certificate window (N = 1, anchor 0).
inline double certificate_spot_check(const MatrixFunction& a, const StabilityCertificate& cert, int pairs = 50,
                                     std::uint64_t seed = 20240601) {
  cert.validate();
  CounterRng rng{seed, 0x5707ULL};
  double worst = 0.0;
  const double len = cert.window_hi - cert.window_lo;
  const double alpha = std::max(1.0, sampled_sup_norm(a, cert.window_lo, cert.window_hi, 33));
  for (int k = 0; k < pairs; ++k) {
    double x = cert.window_lo + len * rng.uniform();
    double y = cert.window_lo + len * rng.uniform();
    if (x > y) std::swap(x, y);
    const int steps = std::max(16, static_cast<int>(std::ceil((y - x) * alpha / 0.005)));
    const auto psi = ode_transition(a, x, y, steps);
    worst = std::max(worst, spectral_norm(psi.value) / (cert.gamma * std::exp(-cert.lambda * (y - x))));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Controllability and the CARMA transform.

namespace detail {

/// Derivatives f, f', ..., f^(order) of a matrix function at t.
using Jet = std::vector<Matrix>;

inline Jet jet_of(const MatrixFunction& f, double t, int order) {
  Jet out;
  out.reserve(order + 1);
  for (int k = 0; k <= order; ++k) out.push_back(k == 0 ? f.evaluate(t) : f.derivative(t, k));
  return out;
}

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// (XY)^(n) by Leibniz, for n up to min(order(X), order(Y)).
inline Jet jet_product(const Jet& x, const Jet& y) {
  const int order = static_cast<int>(std::min(x.size(), y.size())) - 1;
  Jet out;
  for (int n = 0; n <= order; ++n) {
    Matrix acc = Matrix::Zero(x[0].rows(), y[0].cols());
    for (int l = 0; l <= n; ++l) acc += binomial(n, l) * x[l] * y[n - l];
    out.push_back(std::move(acc));
  }
  return out;
}

inline Jet jet_shift(const Jet& x) { return Jet(x.begin() + 1, x.end()); }

inline Jet jet_sum(const Jet& x, const Jet& y) {
  const std::size_t n = std::min(x.size(), y.size());
  Jet out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = x[k] + y[k];
  return out;
}

/// (W^{-1})^(n) = -W^{-1} sum_{l=1}^{n} binom(n,l) W^(l) (W^{-1})^(n-l).
inline Jet jet_inverse(const Jet& w) {
  const auto lu = w[0].fullPivLu();
  Jet out{lu.inverse()};
  for (int n = 1; n < static_cast<int>(w.size()); ++n) {
    Matrix acc = Matrix::Zero(w[0].rows(), w[0].cols());
    for (int l = 1; l <= n; ++l) acc += binomial(n, l) * w[l] * out[n - l];
    out.push_back(-out[0] * acc);
  }
  return out;
}

/// Jets of K_0 .. K_{p-1} with K_0 = C, K_{i+1} = -A K_i + K_i'; K_i keeps
/// `order` - i derivatives.
inline std::vector<Jet> controllability_jets(const MatrixFunction& a, const MatrixFunction& c, double t,
                                             int order) {
  const int p = a.rows();
  const Jet ja = jet_of(a, t, order);
  std::vector<Jet> ks{jet_of(c, t, order)};
  for (int i = 1; i < p; ++i) {
    Jet minus_ak = jet_product(ja, ks.back());
    for (auto& m : minus_ak) m = -m;
    ks.push_back(jet_sum(minus_ak, jet_shift(ks.back())));
  }
  return ks;
}

inline Jet assemble_w(const std::vector<Jet>& ks) {
  const int p = static_cast<int>(ks.size());
  const std::size_t order = ks.back().size();
  Jet w(order, Matrix(p, p));
  for (std::size_t d = 0; d < order; ++d)
    for (int j = 0; j < p; ++j) w[d].col(j) = ks[j][d];
  return w;
}

inline void require_differentiable(const StateSpaceModel& m) {
  require(m.A.is_continuous() && m.C.is_continuous(),
          "controllability needs differentiable A and C (step family rejected)");
}

}  // namespace detail

/// W_p(t) = [K_0 ... K_{p-1}], K_0 = C, K_{i+1} = -A K_i + dK_i/dt, with the
/// derivatives of K_i expanded exactly through derivatives of A and C.
inline Matrix controllability_matrix(const StateSpaceModel& m, double t) {
  m.validate();
  detail::require_differentiable(m);
  const int p = m.dimension();
  return detail::assemble_w(detail::controllability_jets(m.A, m.C, t, p - 1))[0];
}

struct ControllabilityReport {
  std::vector<double> t_grid;
  std::vector<int> ranks;
  std::vector<double> min_singular_values;
  bool instantaneous = false;
};

/// Numerical rank with threshold p * sigma_max * 1e-10.
inline int numerical_rank(const Matrix& w, double* min_sv = nullptr) {
  const Eigen::JacobiSVD<Matrix> svd(w);
  const auto& sv = svd.singularValues();
  if (min_sv) *min_sv = sv.size() ? sv(sv.size() - 1) : 0.0;
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double threshold = w.rows() * sv(0) * 1e-10;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > threshold) ++rank;
  return rank;
}

inline ControllabilityReport instantaneous_controllability(const StateSpaceModel& m,
                                                           const std::vector<double>& t_grid) {
  require(!t_grid.empty(), "controllability grid must not be empty");
  ControllabilityReport report;
  report.t_grid = t_grid;
  report.instantaneous = true;
  for (double t : t_grid) {
    double min_sv = 0.0;
    const int r = numerical_rank(controllability_matrix(m, t), &min_sv);
    report.ranks.push_back(r);
    report.min_singular_values.push_back(min_sv);
    if (r != m.dimension()) report.instantaneous = false;
  }
  return report;
}

struct CarmaTransform {
  Matrix T;
  Matrix carma_A;  // companion form
  Vector carma_B;
  Vector carma_C;  // e_p
  double companion_residual = 0.0;
};

/// Equivalence transform to companion form at t. Rows of T follow
/// r_1 = (-1)^{p-1} e_p' W_p^{-1}, r_{i+1} = r_i A + r_i', which makes T C = e_p
/// and (T A + T') T^{-1} companion.
inline CarmaTransform carma_transform(const StateSpaceModel& m, double t) {
  m.validate();
  detail::require_differentiable(m);
  const int p = m.dimension();
  const int order = 2 * p - 1;
  const auto ks = detail::controllability_jets(m.A, m.C, t, order);
  const detail::Jet w = detail::assemble_w(ks);  // derivatives 0..p
  double min_sv = 0.0;
  if (numerical_rank(w[0], &min_sv) < p) {
    std::ostringstream msg;
    msg << "W_p(" << t << ") is singular (min singular value " << min_sv << "); not instantaneously controllable";
    throw PreconditionError(msg.str());
  }
  const detail::Jet winv = detail::jet_inverse(w);
  const double sign = (p - 1) % 2 == 0 ? 1.0 : -1.0;
  Matrix ep = Matrix::Zero(1, p);
  ep(0, p - 1) = sign;
  detail::Jet row;
  for (const auto& d : winv) row.push_back(ep * d);

  const detail::Jet ja = detail::jet_of(m.A, t, order);
  Matrix T(p, p);
  Matrix dT(p, p);
  for (int i = 0; i < p; ++i) {
    T.row(i) = row[0];
    dT.row(i) = row[1];
    if (i + 1 < p) row = detail::jet_sum(detail::jet_product(row, ja), detail::jet_shift(row));
  }

  CarmaTransform out;
  out.T = T;
  const auto tlu = T.fullPivLu();
  const Matrix tinv = tlu.inverse();
  Matrix comp = (T * m.A.evaluate(t) + dT) * tinv;
  const Vector tc = T * m.C.evaluate(t).col(0);
  Vector e = Vector::Zero(p);
  e(p - 1) = 1.0;
  require((tc - e).norm() <= 1e-8 * std::max(1.0, T.norm()),
          "carma_transform: T C differs from e_p beyond 1e-8");
  double residual = 0.0;
  for (int i = 0; i + 1 < p; ++i)
    for (int j = 0; j < p; ++j) residual = std::max(residual, std::abs(comp(i, j) - (j == i + 1 ? 1.0 : 0.0)));
  const double scale = std::max(1.0, comp.norm());
  if (residual > 1e-6 * scale) {
    std::ostringstream msg;
    msg << "carma_transform: result is not companion (residual " << residual << ")";
    throw PreconditionError(msg.str());
  }
  for (int i = 0; i + 1 < p; ++i)
    for (int j = 0; j < p; ++j) comp(i, j) = j == i + 1 ? 1.0 : 0.0;
  out.carma_A = comp;
  out.carma_B = tinv.transpose() * m.B.evaluate(t).col(0);
  out.carma_C = e;
  out.companion_residual = residual;
  return out;
}

/// Frozen-coefficient companion system produced by carma_transform at t.
inline StateSpaceModel frozen_companion(const CarmaTransform& tr, const LevyModel& levy = {}) {
  return {MatrixFunction::constant(tr.carma_A), MatrixFunction::constant(tr.carma_B),
          MatrixFunction::constant(tr.carma_C), levy};
}

struct EquivalenceReport {
  double max_rel_err = 0.0;
  bool equivalent = false;
  int samples_used = 0;
  std::vector<std::string> notes;
};

/// Ten fixed sample points off the real axis plus z = 0.
inline std::vector<Complex> default_z_samples() {
  std::vector<Complex> z{Complex(0.0, 0.0)};
  for (int k = 0; k < 9; ++k) {
    const double angle = 0.3 + 0.7 * k;
    const double radius = 0.5 + 0.4 * k;
    z.emplace_back(radius * std::cos(angle), radius * std::sin(angle));
  }
  return z;
}

/// Compares B'(zI - A)^{-1} C of the two frozen systems at t.
inline EquivalenceReport transfer_equivalence(const StateSpaceModel& m1, const StateSpaceModel& m2, double t,
                                              const std::vector<Complex>& z_samples = default_z_samples()) {
  m1.validate();
  m2.validate();
  const Matrix a1 = m1.A.evaluate(t), b1 = m1.B.evaluate(t), c1 = m1.C.evaluate(t);
  const Matrix a2 = m2.A.evaluate(t), b2 = m2.B.evaluate(t), c2 = m2.C.evaluate(t);
  const auto e1 = detail::eigenvalues(a1);
  const auto e2 = detail::eigenvalues(a2);
  EquivalenceReport report;
  for (const Complex& z : z_samples) {
    double dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < e1.size(); ++i) dist = std::min(dist, std::abs(z - e1(i)));
    for (int i = 0; i < e2.size(); ++i) dist = std::min(dist, std::abs(z - e2(i)));
    if (dist <= 1e-6) {
      std::ostringstream note;
      note << "skipped z = " << z << " (distance " << dist << " to the spectrum)";
      report.notes.push_back(note.str());
      continue;
    }
    const Complex h1 = frozen_transfer(a1, b1, c1, z);
    const Complex h2 = frozen_transfer(a2, b2, c2, z);
    const double denom = std::max({std::abs(h1), std::abs(h2), 1e-300});
    report.max_rel_err = std::max(report.max_rel_err, std::abs(h1 - h2) / denom);
    ++report.samples_used;
  }
  report.equivalent = report.samples_used > 0 && report.max_rel_err < 1e-8;
  return report;
}

/// The fixed pair of realizations with equal transfer function (2z+5)/(z^2+5z+6)
/// but different kernels once the initial state is nonzero:
/// (A2 = diag(-2,-3), B2 = C2 = (1,1)') versus the companion (A2c, B2c = (5,2)', e_2).
struct StructuralBreakFixture {
  Matrix a1{{0.0, 1.0}, {1.0, 1.0}};
  Vector c1{{0.0, 1.0}};
  Matrix a2{{-2.0, 0.0}, {0.0, -3.0}};
  Vector b2{{1.0, 1.0}};
  Vector c2{{1.0, 1.0}};
  Matrix a2c{{0.0, 1.0}, {-6.0, -5.0}};
  Vector b2c{{5.0, 2.0}};
  Vector c2c{{0.0, 1.0}};
};

/// B2c' exp(A2c tau) x - B2' exp(A2 tau) x.
inline double structural_break_gap(double tau, const Vector& x) {
  require(x.size() == 2, "structural_break_gap needs a 2-vector");
  const StructuralBreakFixture f;
  const Matrix ec = matrix_exp(Matrix(f.a2c * tau));
  const Matrix ed = matrix_exp(Matrix(f.a2 * tau));
  return f.b2c.dot(ec * x) - f.b2.dot(ed * x);
}

}  // namespace tvls
