#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>

namespace tvls {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

inline double frobenius(const Matrix& m) { return m.norm(); }

/// Spectral norm (largest singular value).
inline double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.size() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

}  // namespace tvls
