#pragma once

#include "tvls/errors.hpp"
#include "tvls/function.hpp"
#include "tvls/levy.hpp"
#include "tvls/linalg.hpp"

#include <string>
#include <utility>
#include <vector>

namespace tvls {

/// dX(t) = A(t) X(t) dt + C(t) L(dt),  Y(t) = B(t)' X(t).
struct StateSpaceModel {
  MatrixFunction A;  // p x p
  MatrixFunction B;  // p x 1
  MatrixFunction C;  // p x 1
  LevyModel levy;

  StateSpaceModel() = default;
  StateSpaceModel(MatrixFunction a, MatrixFunction b, MatrixFunction c, LevyModel l = {})
      : A(std::move(a)), B(std::move(b)), C(std::move(c)), levy(l) {
    validate();
  }

  int dimension() const { return A.rows(); }

  void validate() const {
    const int p = A.rows();
    require(p >= 1, "state dimension p must be at least 1");
    require(A.cols() == p, "A must be p x p");
    require(B.rows() == p && B.cols() == 1, "B must be p x 1");
    require(C.rows() == p && C.cols() == 1, "C must be p x 1");
  }

  bool is_continuous() const { return A.is_continuous() && B.is_continuous() && C.is_continuous(); }
  bool is_constant() const { return A.is_constant() && B.is_constant() && C.is_constant(); }
};

/// p(t,D) Y = q(t,D) DL with AR coefficients a_1..a_p and MA coefficients b_0..b_q.
struct CarmaModel {
  std::vector<ScalarFunction> ar;  // a_1 .. a_p
  std::vector<ScalarFunction> ma;  // b_0 .. b_q
  LevyModel levy;

  CarmaModel() = default;
  CarmaModel(std::vector<ScalarFunction> a, std::vector<ScalarFunction> b, LevyModel l = {})
      : ar(std::move(a)), ma(std::move(b)), levy(l) {
    validate();
  }

  int p() const { return static_cast<int>(ar.size()); }
  int q() const { return static_cast<int>(ma.size()) - 1; }

  void validate() const {
    require(!ar.empty(), "CARMA model needs p >= 1 autoregressive coefficients");
    require(!ma.empty(), "CARMA model needs at least b_0");
    require(p() > q(), "CARMA model needs p > q");
  }
};

inline Matrix evaluate(const MatrixFunction& f, double t) { return f.evaluate(t); }
inline Matrix derivative(const MatrixFunction& f, double t) { return f.derivative(t, 1); }

/// Companion realization: last row of A is (-a_p, ..., -a_1), B = (b_0, ..., b_{p-1})'
/// with b_i = 0 beyond q, and C = e_p.
inline StateSpaceModel companion_from_carma(const CarmaModel& m) {
  m.validate();
  const int p = m.p();
  MatrixFunction a(p, p);
  for (int i = 0; i + 1 < p; ++i) a(i, i + 1) = ScalarFunction::constant(1.0);
  for (int j = 0; j < p; ++j) a(p - 1, j) = m.ar[p - 1 - j].negated();
  MatrixFunction b(p, 1);
  for (int i = 0; i <= m.q(); ++i) b(i, 0) = m.ma[i];
  MatrixFunction c(p, 1);
  c(p - 1, 0) = ScalarFunction::constant(1.0);
  return {std::move(a), std::move(b), std::move(c), m.levy};
}

/// B' (zI - A)^{-1} C for frozen matrices.
inline Complex frozen_transfer(const Matrix& a, const Matrix& b, const Matrix& c, Complex z) {
  const auto p = a.rows();
  ComplexMatrix resolvent = z * ComplexMatrix::Identity(p, p) - a.cast<Complex>();
  const ComplexVector x = resolvent.partialPivLu().solve(c.cast<Complex>().col(0));
  return (b.cast<Complex>().col(0).transpose() * x)(0, 0);
}

}  // namespace tvls
