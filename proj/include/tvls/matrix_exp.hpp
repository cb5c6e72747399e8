#pragma once

#include "tvls/errors.hpp"
#include "tvls/linalg.hpp"

#include <array>
#include <cmath>
#include <complex>

namespace tvls {

namespace detail {

// Pade coefficients b_0..b_m for the [m/m] approximant of exp.
inline constexpr std::array<double, 4> kPade3{120.0, 60.0, 12.0, 1.0};
inline constexpr std::array<double, 6> kPade5{30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
inline constexpr std::array<double, 8> kPade7{17297280.0, 8648640.0, 1995840.0, 277200.0,
                                               25200.0,    1512.0,    56.0,      1.0};
inline constexpr std::array<double, 10> kPade9{17643225600.0, 8821612800.0, 2075673600.0,
                                                302702400.0,   30270240.0,   2162160.0,
                                                110880.0,      3960.0,       90.0,
                                                1.0};
inline constexpr std::array<double, 14> kPade13{
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

// Largest 1-norms for which the [m/m] approximant is accurate to unit roundoff.
inline constexpr double kTheta3 = 1.495585217958292e-2;
inline constexpr double kTheta5 = 2.539398330063230e-1;
inline constexpr double kTheta7 = 9.504178996162932e-1;
inline constexpr double kTheta9 = 2.097847961257068e0;
inline constexpr double kTheta13 = 5.371920351148152e0;

template <typename M, std::size_t N>
void pade_low(const M& a, const std::array<double, N>& b, M& u, M& v) {
  const auto n = a.rows();
  const M ident = M::Identity(n, n);
  const M a2 = a * a;
  M power = ident;
  M odd = b[1] * ident;
  M even = b[0] * ident;
  for (std::size_t k = 2; k + 1 < N; k += 2) {
    power = power * a2;
    even += b[k] * power;
    odd += b[k + 1] * power;
  }
  u = a * odd;
  v = even;
}

template <typename M>
void pade13(const M& a, M& u, M& v) {
  const auto& b = kPade13;
  const auto n = a.rows();
  const M ident = M::Identity(n, n);
  const M a2 = a * a;
  const M a4 = a2 * a2;
  const M a6 = a4 * a2;
  const M tmp_u = b[13] * a6 + b[11] * a4 + b[9] * a2;
  u = a * (a6 * tmp_u + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
  const M tmp_v = b[12] * a6 + b[10] * a4 + b[8] * a2;
  v = a6 * tmp_v + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;
}

}  // namespace detail

/// Matrix exponential by scaling and squaring with a Pade approximant of
/// degree 3, 5, 7, 9 or 13 chosen from the 1-norm of the argument.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> matrix_exp(
    const Eigen::MatrixBase<Derived>& arg) {
  using M = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  require(arg.rows() == arg.cols(), "matrix_exp needs a square matrix");
  const auto n = arg.rows();
  if (n == 0) return M(0, 0);
  if (n == 1) {
    M out(1, 1);
    out(0, 0) = std::exp(arg(0, 0));
    return out;
  }
  M a = arg;
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  require(std::isfinite(norm1), "matrix_exp argument must be finite");
  M u;
  M v;
  int squarings = 0;
  if (norm1 < detail::kTheta3) {
    detail::pade_low(a, detail::kPade3, u, v);
  } else if (norm1 < detail::kTheta5) {
    detail::pade_low(a, detail::kPade5, u, v);
  } else if (norm1 < detail::kTheta7) {
    detail::pade_low(a, detail::kPade7, u, v);
  } else if (norm1 < detail::kTheta9) {
    detail::pade_low(a, detail::kPade9, u, v);
  } else {
    if (norm1 > detail::kTheta13) {
      squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / detail::kTheta13))));
      a /= std::ldexp(1.0, squarings);
    }
    detail::pade13(a, u, v);
  }
  const M numer = v + u;
  const M denom = v - u;
  M result = denom.partialPivLu().solve(numer);
  for (int k = 0; k < squarings; ++k) result = result * result;
  return result;
}

/// Closed-form exponential of a 2x2 matrix from its eigenvalues {mu, lambda}:
/// e^lambda((1-lambda)I + D) when they coincide, otherwise
/// (mu e^lambda - lambda e^mu)/(mu-lambda) I + (e^mu - e^lambda)/(mu-lambda) D.
/// The coincident branch is taken when |mu - lambda| < 1e-8 (1 + |lambda|).
inline ComplexMatrix matrix_exp_2x2(const ComplexMatrix& d) {
  require(d.rows() == 2 && d.cols() == 2, "matrix_exp_2x2 needs a 2x2 matrix");
  const Complex half_trace = 0.5 * (d(0, 0) + d(1, 1));
  const Complex disc =
      std::sqrt(0.25 * (d(0, 0) - d(1, 1)) * (d(0, 0) - d(1, 1)) + d(0, 1) * d(1, 0));
  const Complex lambda = half_trace + disc;
  const Complex mu = half_trace - disc;
  const ComplexMatrix ident = ComplexMatrix::Identity(2, 2);
  if (std::abs(mu - lambda) < 1e-8 * (1.0 + std::abs(lambda))) {
    const Complex l = half_trace;
    return std::exp(l) * ((1.0 - l) * ident + d);
  }
  const Complex el = std::exp(lambda);
  const Complex em = std::exp(mu);
  return (mu * el - lambda * em) / (mu - lambda) * ident + (em - el) / (mu - lambda) * d;
}

inline Matrix matrix_exp_2x2(const Matrix& d) {
  return matrix_exp_2x2(ComplexMatrix(d.cast<Complex>())).real();
}

}  // namespace tvls
