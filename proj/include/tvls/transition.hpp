#pragma once

#include "tvls/errors.hpp"
#include "tvls/function.hpp"
#include "tvls/linalg.hpp"
#include "tvls/matrix_exp.hpp"
#include "tvls/quadrature.hpp"
#include "tvls/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace tvls {

enum class TransitionMethod { peano_baker, ode, commutative_exp, automatic };

inline std::string to_string(TransitionMethod m) {
  switch (m) {
    case TransitionMethod::peano_baker: return "peano_baker";
    case TransitionMethod::ode: return "ode";
    case TransitionMethod::commutative_exp: return "commutative_exp";
    case TransitionMethod::automatic: return "auto";
  }
  return "unknown";
}

/// Psi(s, s0) solving d/ds Psi = A(s) Psi, Psi(s0, s0) = I.
struct TransitionMatrix {
  Matrix value;
  TransitionMethod method = TransitionMethod::ode;
  double error_estimate = 0.0;
  int terms_or_steps = 0;
  std::vector<double> term_norms;  // Peano-Baker only
};

struct CommutativityReport {
  bool passes = true;
  double max_violation = 0.0;
};

namespace detail {

/// [s0, s] cut at the breakpoints of `a`.
inline std::vector<double> segment_cuts(const MatrixFunction& a, double s0, double s) {
  std::vector<double> cuts{s0};
  for (double b : a.breakpoints(s0, s)) cuts.push_back(b);
  cuts.push_back(s);
  return cuts;
}

/// Evaluates `a` inside [lo, hi] taking the inward one-sided limit at the ends.
inline Matrix eval_inside(const MatrixFunction& a, double x, bool at_lo, bool at_hi) {
  return a.evaluate(x, at_lo ? Side::right : (at_hi ? Side::left : Side::natural));
}

inline void require_interval(double s0, double s) {
  require(std::isfinite(s0) && std::isfinite(s), "transition endpoints must be finite");
  require(s >= s0, "transition needs s >= s0");
}

struct PeanoBakerSegment {
  Matrix value;
  int terms = 0;
  double last_norm = 0.0;
  std::vector<double> norms;
};

// Even panel count with width <= min(0.05, 2 tol^(1/4)) / max(1, sup ||A||).
inline int peano_baker_panels(const MatrixFunction& a, double lo, double hi, double tol) {
  const double sup = std::max(1.0, sampled_sup_norm(a, lo, hi, 33));
  const double width = std::min(0.05, 2.0 * std::pow(tol, 0.25)) / sup;
  return 2 * std::clamp(static_cast<int>(std::ceil((hi - lo) / width / 2.0)), 2, 1 << 15);
}

// Iterated integrals I_n(tau) = int_{lo}^{tau} A(sigma) I_{n-1}(sigma) dsigma on a shared grid
// of Simpson panels. Values at panel ends use the panel's Simpson rule; values at midpoints
// integrate the panel's quadratic interpolant over its left half, (5 f_l + 8 f_m - f_r) h / 24.
inline PeanoBakerSegment peano_baker_segment(const MatrixFunction& a, double lo, double hi, double tol,
                                             int max_terms, int panels) {
  const int p = a.rows();
  PeanoBakerSegment out;
  out.value = Matrix::Identity(p, p);
  if (hi == lo) return out;
  const double h = (hi - lo) / panels;
  const int nodes = 2 * panels + 1;

  std::vector<Matrix> coeff(nodes);
  for (int j = 0; j < nodes; ++j) coeff[j] = eval_inside(a, lo + 0.5 * h * j, j == 0, j == nodes - 1);

  std::vector<Matrix> prev(nodes, Matrix::Identity(p, p));
  std::vector<Matrix> cur(nodes, Matrix::Zero(p, p));
  std::vector<Matrix> integrand(nodes);
  for (int n = 1; n <= max_terms; ++n) {
    for (int j = 0; j < nodes; ++j) integrand[j].noalias() = coeff[j] * prev[j];
    cur[0].setZero();
    for (int k = 0; k < panels; ++k) {
      const int l = 2 * k;
      const int m = l + 1;
      const int r = l + 2;
      cur[m] = cur[l] + (h / 24.0) * (5.0 * integrand[l] + 8.0 * integrand[m] - integrand[r]);
      cur[r] = cur[l] + (h / 6.0) * (integrand[l] + 4.0 * integrand[m] + integrand[r]);
    }
    const double norm = cur[nodes - 1].norm();
    out.value += cur[nodes - 1];
    out.norms.push_back(norm);
    out.terms = n;
    out.last_norm = norm;
    if (norm < tol) return out;
    std::swap(prev, cur);
  }
  std::ostringstream msg;
  msg << "Peano-Baker series did not reach tol " << tol << " within " << max_terms
      << " terms on [" << lo << ", " << hi << "]; divergence suspected";
  throw DivergenceError(msg.str(), out.norms);
}

inline Matrix rk4_segment(const MatrixFunction& a, double lo, double hi, int steps, Matrix psi) {
  const double h = (hi - lo) / steps;
  for (int k = 0; k < steps; ++k) {
    const double x = lo + k * h;
    const double xm = x + 0.5 * h;
    const double xr = k + 1 == steps ? hi : x + h;
    const Matrix a0 = eval_inside(a, x, k == 0, false);
    const Matrix am = a.evaluate(xm);
    const Matrix a1 = eval_inside(a, xr, false, k + 1 == steps);
    const Matrix k1 = a0 * psi;
    const Matrix k2 = am * (psi + 0.5 * h * k1);
    const Matrix k3 = am * (psi + 0.5 * h * k2);
    const Matrix k4 = a1 * (psi + h * k3);
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return psi;
}

inline Matrix rk4(const MatrixFunction& a, double s0, double s, int steps) {
  const int p = a.rows();
  Matrix psi = Matrix::Identity(p, p);
  if (s == s0) return psi;
  const auto cuts = segment_cuts(a, s0, s);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double len = cuts[i + 1] - cuts[i];
    const int n = std::max(1, static_cast<int>(std::lround(steps * len / (s - s0))));
    psi = rk4_segment(a, cuts[i], cuts[i + 1], n, psi);
  }
  return psi;
}

}  // namespace detail

/// Truncated Peano-Baker series sum_{n<=n*} I_n(s), stopping at the first term
/// with Frobenius norm below `tol`. The interval is split at coefficient
/// breakpoints and the pieces are composed. The error estimate adds the last
/// term norm to a Richardson estimate of the quadrature error.
inline TransitionMatrix peano_baker(const MatrixFunction& a, double s0, double s, double tol = 1e-12,
                                    int max_terms = 200) {
  detail::require_interval(s0, s);
  require(tol > 0.0, "Peano-Baker tolerance must be positive");
  require(a.rows() == a.cols(), "coefficient matrix must be square");
  TransitionMatrix out;
  out.method = TransitionMethod::peano_baker;
  out.value = Matrix::Identity(a.rows(), a.cols());
  const auto cuts = detail::segment_cuts(a, s0, s);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const int panels = detail::peano_baker_panels(a, cuts[i], cuts[i + 1], tol);
    auto seg = detail::peano_baker_segment(a, cuts[i], cuts[i + 1], tol, max_terms, panels);
    // Quadrature part of the error from the same series on half as many panels.
    const auto coarse = detail::peano_baker_segment(a, cuts[i], cuts[i + 1], tol, max_terms, panels / 2);
    out.value = seg.value * out.value;
    out.error_estimate += seg.last_norm + (seg.value - coarse.value).norm() / 15.0;
    out.terms_or_steps = std::max(out.terms_or_steps, seg.terms);
    out.term_norms.insert(out.term_norms.end(), seg.norms.begin(), seg.norms.end());
  }
  return out;
}

/// Classical RK4 with `steps` fixed steps. The error estimate compares against
/// the solution with half as many steps (Richardson factor 1/15).
inline TransitionMatrix ode_transition(const MatrixFunction& a, double s0, double s, int steps) {
  detail::require_interval(s0, s);
  require(steps >= 1, "ode_transition needs at least one step");
  require(a.rows() == a.cols(), "coefficient matrix must be square");
  TransitionMatrix out;
  out.method = TransitionMethod::ode;
  out.terms_or_steps = steps;
  out.value = detail::rk4(a, s0, s, steps);
  if (steps >= 2 && s > s0) {
    const Matrix coarse = detail::rk4(a, s0, s, steps / 2);
    out.error_estimate = (out.value - coarse).norm() / 15.0;
  }
  return out;
}

/// Psi at every RK4 node s0 + k (s - s0) / steps, k = 0..steps.
inline std::vector<Matrix> ode_trajectory(const MatrixFunction& a, double s0, double s, int steps) {
  detail::require_interval(s0, s);
  require(steps >= 1, "ode_trajectory needs at least one step");
  std::vector<Matrix> out;
  out.reserve(steps + 1);
  Matrix psi = Matrix::Identity(a.rows(), a.cols());
  out.push_back(psi);
  const double h = (s - s0) / steps;
  for (int k = 0; k < steps; ++k) {
    const double lo = s0 + k * h;
    const double hi = k + 1 == steps ? s : lo + h;
    psi = detail::rk4_segment(a, lo, hi, 1, psi);
    out.push_back(psi);
  }
  return out;
}

/// Commutators [A(t_i), A(t_j)] over a grid and [A(t_i), int_lo^{t_i} A]; passes
/// iff the largest Frobenius norm is at most `tol`.
inline CommutativityReport check_commutativity(const MatrixFunction& a, double lo, double hi,
                                               int grid_points, double tol) {
  require(grid_points >= 2, "commutativity check needs at least two grid points");
  require(hi >= lo, "commutativity interval must satisfy lo <= hi");
  CommutativityReport report;
  std::vector<Matrix> values(grid_points);
  std::vector<double> ts(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    ts[i] = lo + (hi - lo) * i / (grid_points - 1);
    values[i] = a.evaluate(ts[i]);
  }
  for (int i = 0; i < grid_points; ++i)
    for (int j = i + 1; j < grid_points; ++j)
      report.max_violation = std::max(report.max_violation, commutator(values[i], values[j]).norm());
  Matrix running = Matrix::Zero(a.rows(), a.cols());
  for (int i = 1; i < grid_points; ++i) {
    running += quad::integrate(a, ts[i - 1], ts[i], 16);
    report.max_violation = std::max(report.max_violation, commutator(values[i], running).norm());
  }
  report.passes = report.max_violation <= tol;
  return report;
}

/// exp(int_{s0}^{s} A), valid when the family commutes on [s0, s]. Commutativity
/// is re-checked at 8 pseudo-random pairs before the exponential is formed.
inline TransitionMatrix commutative_transition(const MatrixFunction& a, double s0, double s) {
  detail::require_interval(s0, s);
  require(a.rows() == a.cols(), "coefficient matrix must be square");
  TransitionMatrix out;
  out.method = TransitionMethod::commutative_exp;
  const int p = a.rows();
  if (s == s0) {
    out.value = Matrix::Identity(p, p);
    return out;
  }
  if (p > 1) {
    CounterRng rng{std::bit_cast<std::uint64_t>(s0), std::bit_cast<std::uint64_t>(s), 0xc0ffeeULL};
    double worst = 0.0;
    for (int k = 0; k < 8; ++k) {
      const Matrix ai = a.evaluate(s0 + (s - s0) * rng.uniform());
      const Matrix aj = a.evaluate(s0 + (s - s0) * rng.uniform());
      const double scale = std::max(1.0, ai.norm() * aj.norm());
      worst = std::max(worst, commutator(ai, aj).norm() / scale);
    }
    if (worst > 1e-8) {
      std::ostringstream msg;
      msg << "coefficient family does not commute on [" << s0 << ", " << s
          << "] (relative commutator " << worst << " > 1e-8)";
      throw PreconditionError(msg.str());
    }
  }
  const int panels = std::max(64, static_cast<int>(std::ceil((s - s0) / 0.01)));
  const Matrix integral = quad::integrate(a, s0, s, panels);
  const Matrix coarse = quad::integrate(a, s0, s, panels / 2);
  out.value = matrix_exp(integral);
  out.terms_or_steps = panels;
  out.error_estimate = (integral - coarse).norm() / 15.0 * std::max(1.0, out.value.norm());
  return out;
}

struct TransitionOptions {
  TransitionMethod method = TransitionMethod::automatic;
  double tol = 1e-10;   // Peano-Baker
  int max_terms = 200;  // Peano-Baker
  int steps = 0;        // RK4; 0 picks from the coefficient norm
};

/// Steps giving ||A|| h <= 0.02 with at least 16 steps.
inline int default_ode_steps(const MatrixFunction& a, double s0, double s) {
  if (s == s0) return 1;
  const double sup = std::max(1.0, sampled_sup_norm(a, s0, s, 17));
  return std::max(16, static_cast<int>(std::ceil(sup * (s - s0) / 0.02)));
}

inline bool commutes_on(const MatrixFunction& a, double lo, double hi) {
  if (a.rows() == 1 || a.is_constant()) return true;
  const double scale = std::max(1.0, std::pow(sampled_sup_norm(a, lo, hi, 9), 2));
  return check_commutativity(a, lo, hi, 9, 1e-10 * scale).passes;
}

/// Dispatches on `options.method`. `automatic` uses the commutative exponential
/// when the family commutes on [s0, s] and RK4 otherwise.
inline TransitionMatrix transition(const MatrixFunction& a, double s0, double s,
                                   const TransitionOptions& options = {}) {
  switch (options.method) {
    case TransitionMethod::peano_baker:
      return peano_baker(a, s0, s, options.tol, options.max_terms);
    case TransitionMethod::ode:
      return ode_transition(a, s0, s, options.steps > 0 ? options.steps : default_ode_steps(a, s0, s));
    case TransitionMethod::commutative_exp:
      return commutative_transition(a, s0, s);
    case TransitionMethod::automatic:
      if (commutes_on(a, s0, s)) return commutative_transition(a, s0, s);
      return ode_transition(a, s0, s, options.steps > 0 ? options.steps : default_ode_steps(a, s0, s));
  }
  throw PreconditionError("unknown transition method");
}

}  // namespace tvls
