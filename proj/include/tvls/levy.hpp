#pragma once

#include "tvls/errors.hpp"
#include "tvls/quadrature.hpp"
#include "tvls/rng.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace tvls {

/// Mean-zero Levy driving noise: Brownian part plus compound Poisson jumps with
/// N(0, jump_std^2) sizes. No drift parameter exists; the centering drift is
/// implied so that E[L(1)] = 0.
class LevyModel {
 public:
  LevyModel() : LevyModel(1.0, 0.0, 0.0) {}
  LevyModel(double brownian_variance, double jump_intensity, double jump_std)
      : brownian_variance_(brownian_variance),
        jump_intensity_(jump_intensity),
        jump_std_(jump_std),
        sigma_l_(brownian_variance + jump_intensity * jump_std * jump_std) {
    require(std::isfinite(brownian_variance) && brownian_variance >= 0.0,
            "brownian_variance must be finite and non-negative");
    require(std::isfinite(jump_intensity) && jump_intensity >= 0.0,
            "jump_intensity must be finite and non-negative");
    require(std::isfinite(jump_std) && jump_std >= 0.0, "jump_std must be finite and non-negative");
  }

  static LevyModel brownian(double variance = 1.0) { return {variance, 0.0, 0.0}; }

  double brownian_variance() const { return brownian_variance_; }
  double jump_intensity() const { return jump_intensity_; }
  double jump_std() const { return jump_std_; }
  /// Var(L(1)).
  double sigma_l() const { return sigma_l_; }
  bool has_jumps() const { return jump_intensity_ > 0.0 && jump_std_ > 0.0; }

  void require_nondegenerate() const {
    require(sigma_l_ > 0.0, "Levy model has zero variance (sigma_l == 0)");
  }

  friend bool operator==(const LevyModel&, const LevyModel&) = default;

 private:
  double brownian_variance_;
  double jump_intensity_;
  double jump_std_;
  double sigma_l_;
};

inline double variance(const LevyModel& model) { return model.sigma_l(); }

/// Levy-Khintchine exponent Psi_L(z) with truncation function 1_{|x|<=1}. The
/// jump part is integrated numerically against the jump density over +-8
/// standard deviations.
inline Complex characteristic_exponent(const LevyModel& model, double z) {
  Complex psi(-0.5 * model.brownian_variance() * z * z, 0.0);
  if (!model.has_jumps() || z == 0.0) return psi;
  const double sd = model.jump_std();
  const double rate = model.jump_intensity();
  const double lim = 8.0 * sd;
  constexpr double inv_sqrt_2pi = 0.39894228040143267794;
  auto density = [&](double x) { return inv_sqrt_2pi / sd * std::exp(-0.5 * (x / sd) * (x / sd)); };

  // Split at the truncation points so every Simpson piece has a smooth integrand.
  std::vector<double> cuts{-lim};
  if (lim > 1.0) {
    cuts.push_back(-1.0);
    cuts.push_back(1.0);
  }
  cuts.push_back(lim);
  const int panels = 4000;
  Complex integral(0.0, 0.0);
  double drift = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    const bool inner = lo >= -1.0 && hi <= 1.0;
    const int n = std::max(16, static_cast<int>(panels * (hi - lo) / (2.0 * lim)));
    const double re = quad::simpson([&](double x) { return (std::cos(z * x) - 1.0) * density(x); },
                                    lo, hi, n);
    const double im = quad::simpson(
        [&](double x) { return (std::sin(z * x) - (inner ? z * x : 0.0)) * density(x); }, lo, hi, n);
    integral += Complex(re, im);
    if (!inner) drift -= quad::simpson([&](double x) { return x * density(x); }, lo, hi, n);
  }
  // drift = -int_{|x|>1} x nu(dx) makes E[L(1)] = 0.
  return psi + rate * integral + Complex(0.0, rate * drift * z);
}

namespace detail {

struct IncrementDraw {
  double gaussian = 0.0;
  std::vector<std::pair<double, double>> jumps;  // (offset in interval as fraction, size)
};

/// Increment of L over an interval of length `dt`, keyed by (seed, stream, index).
inline IncrementDraw draw_increment(const LevyModel& model, double dt, std::uint64_t seed,
                                    std::uint64_t stream, std::uint64_t index) {
  CounterRng rng{seed, stream, index};
  IncrementDraw out;
  out.gaussian = std::sqrt(model.brownian_variance() * dt) * rng.normal();
  if (model.has_jumps()) {
    const std::uint64_t count = rng.poisson(model.jump_intensity() * dt);
    out.jumps.reserve(count);
    for (std::uint64_t j = 0; j < count; ++j) {
      const double size = model.jump_std() * rng.normal();
      const double where = rng.uniform();
      out.jumps.emplace_back(where, size);
    }
  }
  return out;
}

inline double increment_total(const LevyModel& model, double dt, std::uint64_t seed,
                              std::uint64_t stream, std::uint64_t index) {
  CounterRng rng{seed, stream, index};
  double total = std::sqrt(model.brownian_variance() * dt) * rng.normal();
  if (model.has_jumps()) {
    const std::uint64_t count = rng.poisson(model.jump_intensity() * dt);
    for (std::uint64_t j = 0; j < count; ++j) {
      total += model.jump_std() * rng.normal();
      rng.uniform();
    }
  }
  return total;
}

inline void require_increasing(std::span<const double> times) {
  require(times.size() >= 2, "time grid needs at least two points");
  for (std::size_t k = 0; k + 1 < times.size(); ++k)
    require(times[k + 1] > times[k], "time grid must be strictly increasing");
}

}  // namespace detail

/// A sampled two-sided Levy path on a grid, kept as its Gaussian parts and jump
/// list per interval so that it can be refined consistently: increments on a
/// finer grid sum exactly to the coarse ones.
class LevyPath {
 public:
  struct Interval {
    double gaussian = 0.0;
    std::vector<std::pair<double, double>> jumps;  // (absolute time, size)

    double total() const {
      double s = gaussian;
      for (const auto& [when, size] : jumps) s += size;
      return s;
    }
  };

  static LevyPath sample(const LevyModel& model, std::span<const double> times, std::uint64_t seed) {
    model.require_nondegenerate();
    detail::require_increasing(times);
    LevyPath path(model, seed);
    path.times_.assign(times.begin(), times.end());
    path.intervals_.reserve(times.size() - 1);
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
      const double dt = times[k + 1] - times[k];
      auto draw = detail::draw_increment(model, dt, seed, 0, k);
      Interval iv;
      iv.gaussian = draw.gaussian;
      for (const auto& [frac, size] : draw.jumps) iv.jumps.emplace_back(times[k] + frac * dt, size);
      std::sort(iv.jumps.begin(), iv.jumps.end());
      path.intervals_.push_back(std::move(iv));
    }
    return path;
  }

  const std::vector<double>& times() const { return times_; }
  const std::vector<Interval>& intervals() const { return intervals_; }

  std::vector<double> increments() const {
    std::vector<double> out;
    out.reserve(intervals_.size());
    for (const auto& iv : intervals_) out.push_back(iv.total());
    return out;
  }

  /// Path on a finer grid that contains every current grid point. Gaussian parts
  /// are split by Brownian-bridge conditioning; jumps go to the sub-interval that
  /// contains them.
  LevyPath refine(std::span<const double> finer) const {
    detail::require_increasing(finer);
    LevyPath out(model_, seed_);
    out.times_.assign(finer.begin(), finer.end());
    std::size_t j = 0;
    for (std::size_t k = 0; k < intervals_.size(); ++k) {
      const double lo = times_[k];
      const double hi = times_[k + 1];
      while (j < finer.size() && finer[j] < lo) ++j;
      require(j < finer.size() && finer[j] == lo, "refined grid must contain the original grid");
      std::size_t end = j;
      while (end < finer.size() && finer[end] < hi) ++end;
      require(end < finer.size() && finer[end] == hi, "refined grid must contain the original grid");

      CounterRng rng{seed_, 1, k};
      double remaining = intervals_[k].gaussian;
      for (std::size_t m = j; m < end; ++m) {
        const double a = finer[m];
        const double b = finer[m + 1];
        Interval iv;
        if (m + 1 == end) {
          iv.gaussian = remaining;
        } else {
          const double frac = (b - a) / (hi - a);
          const double sd = std::sqrt(model_.brownian_variance() * (b - a) * (hi - b) / (hi - a));
          iv.gaussian = frac * remaining + sd * rng.normal();
          remaining -= iv.gaussian;
        }
        for (const auto& jump : intervals_[k].jumps) {
          const bool last = m + 1 == end;
          if (jump.first >= a && (jump.first < b || (last && jump.first <= b))) iv.jumps.push_back(jump);
        }
        out.intervals_.push_back(std::move(iv));
      }
      j = end;
    }
    return out;
  }

 private:
  LevyPath(LevyModel model, std::uint64_t seed) : model_(model), seed_(seed) {}

  LevyModel model_;
  std::uint64_t seed_;
  std::vector<double> times_;
  std::vector<Interval> intervals_;
};

/// L(t_{k+1}) - L(t_k) for consecutive grid points. Deterministic in `seed`.
inline std::vector<double> sample_increments(const LevyModel& model, std::span<const double> times,
                                             std::uint64_t seed) {
  model.require_nondegenerate();
  detail::require_increasing(times);
  std::vector<double> out(times.size() - 1);
  for (std::size_t k = 0; k + 1 < times.size(); ++k)
    out[k] = detail::increment_total(model, times[k + 1] - times[k], seed, 0, k);
  return out;
}

}  // namespace tvls
