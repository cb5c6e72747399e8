#pragma once

#include "tvls/errors.hpp"
#include "tvls/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace tvls {

/// Which one-sided limit to take when a function is evaluated exactly at one
/// of its discontinuities. `natural` uses the family's own convention.
enum class Side { natural, left, right };

namespace family {

struct Constant {
  double value = 0.0;
};

struct Affine {
  double intercept = 0.0;
  double slope = 0.0;
};

/// offset + amplitude * sin(omega * x + phase)
struct Sinusoidal {
  double offset = 0.0;
  double amplitude = 0.0;
  double omega = 1.0;
  double phase = 0.0;
};

/// base + height / (1 + exp(-rate * (x - center)))
struct Logistic {
  double base = 0.0;
  double height = 1.0;
  double rate = 1.0;
  double center = 0.0;
};

/// Continuous piecewise polynomial. Piece i covers [breakpoints[i-1],
/// breakpoints[i]) with ascending coefficients; piece 0 extends to -inf and the
/// last piece to +inf.
struct PiecewisePolynomial {
  std::vector<double> breakpoints;
  std::vector<std::vector<double>> pieces;
};

/// `left` for x <= jump_at, `right` for x > jump_at.
struct Step {
  double jump_at = 0.0;
  double left = 0.0;
  double right = 0.0;
};

/// In-process coefficient supplied by a library user. Not serializable.
struct Callback {
  std::function<double(double)> value;
  std::function<double(double, int)> derivative;  // optional
};

}  // namespace family

namespace detail {

inline double horner(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

inline double poly_derivative(const std::vector<double>& c, double x, int order) {
  double acc = 0.0;
  for (int k = static_cast<int>(c.size()) - 1; k >= order; --k) {
    double falling = 1.0;
    for (int j = 0; j < order; ++j) falling *= static_cast<double>(k - j);
    acc = acc * x + c[k] * falling;
  }
  return acc;
}

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// Coefficients (ascending in s) of P_n with d^n/dz^n sigmoid(z) = P_n(sigmoid(z)).
inline std::vector<double> sigmoid_derivative_poly(int order) {
  std::vector<double> p{0.0, 1.0};
  for (int n = 0; n < order; ++n) {
    // P' * s(1-s)
    std::vector<double> dp(p.size() > 1 ? p.size() - 1 : 1, 0.0);
    for (std::size_t k = 1; k < p.size(); ++k) dp[k - 1] = static_cast<double>(k) * p[k];
    std::vector<double> next(dp.size() + 2, 0.0);
    for (std::size_t k = 0; k < dp.size(); ++k) {
      next[k + 1] += dp[k];
      next[k + 2] -= dp[k];
    }
    p = std::move(next);
  }
  return p;
}

inline double central_difference(const std::function<double(double)>& f, double x, int order) {
  const double scale = std::max(1.0, std::abs(x));
  if (order == 1) {
    const double h = 1e-6 * scale;
    return (f(x + h) - f(x - h)) / (2.0 * h);
  }
  if (order == 2) {
    const double h = 1e-4 * scale;
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
  }
  throw PreconditionError("callback coefficient without derivative callback supports order <= 2");
}

}  // namespace detail

/// A real coefficient function of time drawn from a closed set of parametric
/// families. Evaluation is `family(scale * t + shift)`; the affine time map is
/// how rescaled coefficients like a(s/N + t) are formed.
class ScalarFunction {
 public:
  using Family = std::variant<family::Constant, family::Affine, family::Sinusoidal,
                              family::Logistic, family::PiecewisePolynomial, family::Step,
                              family::Callback>;

  ScalarFunction() : family_(family::Constant{0.0}) {}
  ScalarFunction(double c) : family_(family::Constant{c}) {}  // NOLINT
  ScalarFunction(Family f) : family_(std::move(f)) { validate(); }  // NOLINT

  static ScalarFunction constant(double c) { return ScalarFunction(Family(family::Constant{c})); }
  static ScalarFunction affine(double intercept, double slope) {
    return ScalarFunction(Family(family::Affine{intercept, slope}));
  }
  static ScalarFunction sinusoidal(double offset, double amplitude, double omega, double phase) {
    return ScalarFunction(Family(family::Sinusoidal{offset, amplitude, omega, phase}));
  }
  static ScalarFunction logistic(double base, double height, double rate, double center) {
    return ScalarFunction(Family(family::Logistic{base, height, rate, center}));
  }
  static ScalarFunction polynomial(std::vector<double> coeffs) {
    return ScalarFunction(Family(family::PiecewisePolynomial{{}, {std::move(coeffs)}}));
  }
  static ScalarFunction piecewise(std::vector<double> breakpoints,
                                  std::vector<std::vector<double>> pieces) {
    return ScalarFunction(Family(family::PiecewisePolynomial{std::move(breakpoints), std::move(pieces)}));
  }
  static ScalarFunction step(double jump_at, double left, double right) {
    return ScalarFunction(Family(family::Step{jump_at, left, right}));
  }
  static ScalarFunction callback(std::function<double(double)> value,
                                 std::function<double(double, int)> derivative = {}) {
    return ScalarFunction(Family(family::Callback{std::move(value), std::move(derivative)}));
  }

  const Family& family() const { return family_; }
  double time_scale() const { return scale_; }
  double time_shift() const { return shift_; }
  bool has_identity_time_map() const { return scale_ == 1.0 && shift_ == 0.0; }

  double operator()(double t) const { return value(t); }

  double value(double t, Side side = Side::natural) const {
    const double x = scale_ * t + shift_;
    return std::visit([&](const auto& f) { return eval(f, x, side); }, family_);
  }

  /// d^order/dt^order. Piecewise polynomials return the right-hand derivative at
  /// a breakpoint; the step family rejects its jump point.
  double derivative(double t, int order = 1) const {
    require(order >= 0, "derivative order must be non-negative");
    if (order == 0) return value(t);
    const double x = scale_ * t + shift_;
    const double inner = std::visit([&](const auto& f) { return deriv(f, x, order); }, family_);
    return std::pow(scale_, order) * inner;
  }

  /// t -> f(scale * t + shift), scale > 0.
  ScalarFunction rescaled(double scale, double shift) const {
    require(scale > 0.0 && std::isfinite(scale), "time rescaling factor must be positive");
    ScalarFunction out = *this;
    out.shift_ = scale_ * shift + shift_;
    out.scale_ = scale_ * scale;
    return out;
  }

  ScalarFunction negated() const {
    ScalarFunction out = *this;
    out.family_ = std::visit(
        [](const auto& f) -> Family {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, family::Constant>) {
            return family::Constant{-f.value};
          } else if constexpr (std::is_same_v<T, family::Affine>) {
            return family::Affine{-f.intercept, -f.slope};
          } else if constexpr (std::is_same_v<T, family::Sinusoidal>) {
            return family::Sinusoidal{-f.offset, -f.amplitude, f.omega, f.phase};
          } else if constexpr (std::is_same_v<T, family::Logistic>) {
            return family::Logistic{-f.base, -f.height, f.rate, f.center};
          } else if constexpr (std::is_same_v<T, family::PiecewisePolynomial>) {
            family::PiecewisePolynomial g = f;
            for (auto& piece : g.pieces)
              for (auto& c : piece) c = -c;
            return g;
          } else if constexpr (std::is_same_v<T, family::Step>) {
            return family::Step{f.jump_at, -f.left, -f.right};
          } else {
            auto v = f.value;
            auto d = f.derivative;
            family::Callback g;
            g.value = [v](double x) { return -v(x); };
            if (d) g.derivative = [d](double x, int k) { return -d(x, k); };
            return g;
          }
        },
        family_);
    return out;
  }

  bool is_continuous() const { return !std::holds_alternative<family::Step>(family_); }

  /// Analytic derivatives of every order exist everywhere.
  bool is_smooth() const {
    if (auto* p = std::get_if<family::PiecewisePolynomial>(&family_)) return p->breakpoints.empty();
    if (auto* c = std::get_if<family::Callback>(&family_)) return static_cast<bool>(c->derivative);
    return is_continuous();
  }

  bool is_constant() const {
    if (std::holds_alternative<family::Constant>(family_)) return true;
    if (auto* a = std::get_if<family::Affine>(&family_)) return a->slope == 0.0;
    if (auto* s = std::get_if<family::Sinusoidal>(&family_)) return s->amplitude == 0.0;
    return false;
  }

  /// Points (in t) where the function or its derivative may jump.
  std::vector<double> breakpoints() const {
    std::vector<double> xs;
    if (auto* p = std::get_if<family::PiecewisePolynomial>(&family_)) xs = p->breakpoints;
    if (auto* s = std::get_if<family::Step>(&family_)) xs = {s->jump_at};
    for (auto& x : xs) x = (x - shift_) / scale_;
    return xs;
  }

  std::string family_name() const {
    static constexpr const char* names[] = {"constant", "affine",   "sinusoidal", "logistic",
                                            "piecewise_polynomial", "step", "callback"};
    return names[family_.index()];
  }

 private:
  void validate() const {
    if (auto* p = std::get_if<family::PiecewisePolynomial>(&family_)) {
      require(p->pieces.size() == p->breakpoints.size() + 1,
              "piecewise polynomial needs one more piece than breakpoints");
      require(std::is_sorted(p->breakpoints.begin(), p->breakpoints.end()) &&
                  std::adjacent_find(p->breakpoints.begin(), p->breakpoints.end()) ==
                      p->breakpoints.end(),
              "piecewise polynomial breakpoints must be strictly increasing");
      for (std::size_t i = 0; i < p->breakpoints.size(); ++i) {
        const double b = p->breakpoints[i];
        const double l = detail::horner(p->pieces[i], b);
        const double r = detail::horner(p->pieces[i + 1], b);
        require(std::abs(l - r) <= 1e-9 * std::max(1.0, std::abs(l)),
                "piecewise polynomial must be continuous at its breakpoints");
      }
    }
    if (auto* c = std::get_if<family::Callback>(&family_)) {
      require(static_cast<bool>(c->value), "callback coefficient needs a value function");
    }
  }

  static std::size_t piece_index(const family::PiecewisePolynomial& p, double x) {
    return static_cast<std::size_t>(
        std::upper_bound(p.breakpoints.begin(), p.breakpoints.end(), x) - p.breakpoints.begin());
  }

  static double eval(const family::Constant& f, double, Side) { return f.value; }
  static double eval(const family::Affine& f, double x, Side) { return f.intercept + f.slope * x; }
  static double eval(const family::Sinusoidal& f, double x, Side) {
    return f.offset + f.amplitude * std::sin(f.omega * x + f.phase);
  }
  static double eval(const family::Logistic& f, double x, Side) {
    return f.base + f.height * detail::sigmoid(f.rate * (x - f.center));
  }
  static double eval(const family::PiecewisePolynomial& p, double x, Side) {
    return detail::horner(p.pieces[piece_index(p, x)], x);
  }
  static double eval(const family::Step& f, double x, Side side) {
    if (x < f.jump_at) return f.left;
    if (x > f.jump_at) return f.right;
    return side == Side::right ? f.right : f.left;
  }
  static double eval(const family::Callback& f, double x, Side) { return f.value(x); }

  static double deriv(const family::Constant&, double, int) { return 0.0; }
  static double deriv(const family::Affine& f, double, int order) {
    return order == 1 ? f.slope : 0.0;
  }
  static double deriv(const family::Sinusoidal& f, double x, int order) {
    constexpr double half_pi = 1.57079632679489661923;
    return f.amplitude * std::pow(f.omega, order) *
           std::sin(f.omega * x + f.phase + order * half_pi);
  }
  static double deriv(const family::Logistic& f, double x, int order) {
    const double s = detail::sigmoid(f.rate * (x - f.center));
    return f.height * std::pow(f.rate, order) *
           detail::horner(detail::sigmoid_derivative_poly(order), s);
  }
  static double deriv(const family::PiecewisePolynomial& p, double x, int order) {
    return detail::poly_derivative(p.pieces[piece_index(p, x)], x, order);
  }
  static double deriv(const family::Step& f, double x, int) {
    if (x == f.jump_at) throw PreconditionError("step coefficient is not differentiable at its jump");
    return 0.0;
  }
  static double deriv(const family::Callback& f, double x, int order) {
    if (f.derivative) return f.derivative(x, order);
    return detail::central_difference(f.value, x, order);
  }

  Family family_;
  double scale_ = 1.0;
  double shift_ = 0.0;
};

/// Matrix of coefficient functions, stored row-major.
class MatrixFunction {
 public:
  MatrixFunction() = default;
  MatrixFunction(int rows, int cols) : rows_(rows), cols_(cols), entries_(rows * cols) {
    require(rows >= 0 && cols >= 0, "matrix function shape must be non-negative");
  }
  MatrixFunction(int rows, int cols, std::vector<ScalarFunction> entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    require(static_cast<int>(entries_.size()) == rows * cols,
            "matrix function entry count does not match its shape");
  }

  static MatrixFunction constant(const Matrix& m) {
    MatrixFunction f(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    for (int i = 0; i < f.rows_; ++i)
      for (int j = 0; j < f.cols_; ++j) f(i, j) = ScalarFunction::constant(m(i, j));
    return f;
  }

  static MatrixFunction diagonal(const std::vector<ScalarFunction>& d) {
    const int n = static_cast<int>(d.size());
    MatrixFunction f(n, n);
    for (int i = 0; i < n; ++i) f(i, i) = d[i];
    return f;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  ScalarFunction& operator()(int i, int j) { return entries_[i * cols_ + j]; }
  const ScalarFunction& operator()(int i, int j) const { return entries_[i * cols_ + j]; }
  const std::vector<ScalarFunction>& entries() const { return entries_; }

  Matrix operator()(double t) const { return evaluate(t); }

  Matrix evaluate(double t, Side side = Side::natural) const {
    Matrix m(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).value(t, side);
    return m;
  }

  Matrix derivative(double t, int order = 1) const {
    Matrix m(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).derivative(t, order);
    return m;
  }

  MatrixFunction rescaled(double scale, double shift) const {
    MatrixFunction out = *this;
    for (auto& e : out.entries_) e = e.rescaled(scale, shift);
    return out;
  }

  bool is_continuous() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const auto& e) { return e.is_continuous(); });
  }
  bool is_smooth() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const auto& e) { return e.is_smooth(); });
  }
  bool is_constant() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const auto& e) { return e.is_constant(); });
  }

  /// Sorted breakpoints strictly inside (lo, hi).
  std::vector<double> breakpoints(double lo, double hi) const {
    std::vector<double> out;
    for (const auto& e : entries_)
      for (double b : e.breakpoints())
        if (b > lo && b < hi) out.push_back(b);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<ScalarFunction> entries_;
};

/// Largest Frobenius norm of f over `samples` equispaced points of [lo, hi].
inline double sampled_sup_norm(const MatrixFunction& f, double lo, double hi, int samples = 65) {
  double sup = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double t = samples == 1 ? lo : lo + (hi - lo) * k / (samples - 1);
    sup = std::max(sup, f.evaluate(t, k == 0 ? Side::right : Side::left).norm());
  }
  return sup;
}

}  // namespace tvls
