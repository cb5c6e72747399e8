#pragma once

#include "tvls/errors.hpp"
#include "tvls/levy.hpp"
#include "tvls/linalg.hpp"
#include "tvls/model.hpp"
#include "tvls/parallel.hpp"
#include "tvls/rng.hpp"
#include "tvls/stability.hpp"
#include "tvls/transition.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <vector>

namespace tvls {

struct SimulationConfig {
  int n = 1;
  double t_start = 0.0;  // rescaled time
  double t_end = 0.0;    // rescaled time
  double dt = 0.01;      // physical step
  std::optional<double> burn_in;  // physical; default 12 / lambda
  std::uint64_t seed = 0;
  int record_stride = 1;
  int refine = 0;  // split every dt step into 2^refine sub-steps sharing its noise
  const StabilityCertificate* certificate = nullptr;
};

/// One path of X_N and Y_N on the recorded grid. `grid` holds physical times
/// s_k = N t_start + k dt stride; `times` holds the rescaled t = s / N.
struct PathSample {
  std::vector<double> grid;
  std::vector<double> times;
  Matrix states;  // p x K
  std::vector<double> observations;
  std::uint64_t seed = 0;
  int n = 1;
  double burn_in = 0.0;
};

/// Step operators shared by every path on one grid:
/// X_{k+1} = Phi_k X_k + G_k dL_k with Phi_k = Psi(s_{k+1}, s_k) and
/// G_k = Psi(s_{k+1}, m_k) C(m_k / N), m_k the step midpoint.
/// Noise is drawn once per dt step, keyed by the step's position relative to
/// the first recorded time, and split over the sub-steps; so runs that differ
/// only in burn-in or refinement see the same driving path.
struct SimulationPlan {
  int n = 1;
  double dt = 0.0;
  double h = 0.0;  // internal physical step
  int burn_steps = 0;
  int burn_coarse = 0;
  int substeps = 1;  // internal steps per dt
  int record_every = 1;
  double burn_in = 0.0;
  double s_start = 0.0;
  std::vector<Matrix> phi;
  std::vector<Vector> g;
  std::vector<Matrix> b;  // B at recorded points
  std::vector<int> record_index;
  std::vector<double> record_s;
  LevyModel levy;
  int p = 1;
};

inline SimulationPlan plan_simulation(const StateSpaceModel& m, const SimulationConfig& cfg) {
  m.validate();
  m.levy.require_nondegenerate();
  require(cfg.n >= 1, "N must be a positive integer");
  require(cfg.dt > 0.0 && std::isfinite(cfg.dt), "dt must be positive");
  require(cfg.t_end >= cfg.t_start, "t_end must be >= t_start");
  require(cfg.record_stride >= 1, "record_stride must be >= 1");
  require(cfg.refine >= 0 && cfg.refine <= 10, "refine must be in [0, 10]");
  require(cfg.certificate != nullptr, "simulation needs a stability certificate to size the burn-in");
  cfg.certificate->validate();

  SimulationPlan plan;
  plan.n = cfg.n;
  plan.p = m.dimension();
  plan.levy = m.levy;
  plan.burn_in = cfg.burn_in ? *cfg.burn_in : 12.0 / cfg.certificate->lambda;
  require(plan.burn_in >= 0.0, "burn_in must be non-negative");

  const MatrixFunction an = m.A.rescaled(1.0 / cfg.n, 0.0);
  const MatrixFunction cn = m.C.rescaled(1.0 / cfg.n, 0.0);
  const MatrixFunction bn = m.B.rescaled(1.0 / cfg.n, 0.0);
  plan.s_start = cfg.n * cfg.t_start;
  const double s_end = cfg.n * cfg.t_end;
  const double sup = sampled_sup_norm(an, plan.s_start - plan.burn_in, std::max(s_end, plan.s_start + cfg.dt), 129);
  plan.substeps = (sup * cfg.dt > 0.1 ? 4 : 1) << cfg.refine;
  plan.dt = cfg.dt;
  plan.h = cfg.dt / plan.substeps;
  plan.burn_coarse = static_cast<int>(std::ceil(plan.burn_in / cfg.dt - 1e-9));
  plan.burn_steps = plan.burn_coarse * plan.substeps;
  const long record_steps = std::lround((s_end - plan.s_start) / cfg.dt);
  plan.record_every = plan.substeps * cfg.record_stride;
  const long total = plan.burn_steps + record_steps * plan.substeps;

  auto s_at = [&](long k) { return plan.s_start + static_cast<double>(k - plan.burn_steps) * plan.h; };
  plan.phi.resize(total);
  plan.g.resize(total);
  parallel_for(static_cast<std::size_t>(total), [&](std::size_t k) {
    const double lo = s_at(static_cast<long>(k));
    const double hi = s_at(static_cast<long>(k) + 1);
    const double mid = 0.5 * (lo + hi);
    plan.phi[k] = transition(an, lo, hi).value;
    plan.g[k] = transition(an, mid, hi).value * cn.evaluate(mid).col(0);
  });
  for (long k = plan.burn_steps; k <= total; k += plan.record_every) {
    plan.record_index.push_back(static_cast<int>(k));
    plan.record_s.push_back(s_at(k));
    plan.b.push_back(bn.evaluate(s_at(k)));
  }
  return plan;
}

/// Runs one path of the plan from X = 0 at the start of the burn-in.
inline PathSample simulate_path(const SimulationPlan& plan, std::uint64_t path_seed) {
  PathSample out;
  out.seed = path_seed;
  out.n = plan.n;
  out.burn_in = plan.burn_in;
  out.grid = plan.record_s;
  out.times.resize(out.grid.size());
  for (std::size_t i = 0; i < out.grid.size(); ++i) out.times[i] = out.grid[i] / plan.n;
  out.states.resize(plan.p, static_cast<Eigen::Index>(out.grid.size()));
  out.observations.resize(out.grid.size());

  Vector x = Vector::Zero(plan.p);
  std::size_t next = 0;
  auto record = [&](long k) {
    if (next < plan.record_index.size() && plan.record_index[next] == k) {
      out.states.col(static_cast<Eigen::Index>(next)) = x;
      out.observations[next] = plan.b[next].col(0).dot(x);
      ++next;
    }
  };
  const long total = static_cast<long>(plan.phi.size());
  const int m = plan.substeps;
  const double sd = std::sqrt(plan.levy.brownian_variance());
  std::vector<double> noise(m);
  record(0);
  for (long k0 = 0; k0 < total; k0 += m) {
    const long coarse = k0 / m - plan.burn_coarse;
    const auto key = static_cast<std::uint64_t>(coarse);
    if (m == 1) {
      noise[0] = detail::increment_total(plan.levy, plan.dt, path_seed, 0, key);
    } else {
      // Brownian bridge split of the Gaussian part; jumps go to their sub-step.
      const auto draw = detail::draw_increment(plan.levy, plan.dt, path_seed, 0, key);
      CounterRng bridge{path_seed, 1, key};
      double remaining = draw.gaussian;
      for (int j = 0; j < m; ++j) {
        const int left = m - j;
        if (left == 1) {
          noise[j] = remaining;
        } else {
          const double frac = 1.0 / left;
          noise[j] = frac * remaining + sd * std::sqrt(plan.h * (1.0 - frac)) * bridge.normal();
          remaining -= noise[j];
        }
      }
      for (const auto& [where, size] : draw.jumps) noise[std::min(m - 1, static_cast<int>(where * m))] += size;
    }
    for (int j = 0; j < m; ++j) {
      const long k = k0 + j;
      x = plan.phi[k] * x + plan.g[k] * noise[j];
      record(k + 1);
    }
  }
  return out;
}

/// Exact recursion of the state equation on a uniform physical grid, with the
/// stochastic integral over each step frozen at the step midpoint.
inline PathSample simulate_path(const StateSpaceModel& m, const SimulationConfig& cfg) {
  return simulate_path(plan_simulation(m, cfg), cfg.seed);
}

/// `count` paths sharing one plan; path i uses derive_seed(seed, i).
inline std::vector<PathSample> simulate_paths(const StateSpaceModel& m, const SimulationConfig& cfg, int count) {
  require(count >= 1, "number of paths must be positive");
  const SimulationPlan plan = plan_simulation(m, cfg);
  std::vector<PathSample> paths(count);
  parallel_for(static_cast<std::size_t>(count),
               [&](std::size_t i) { paths[i] = simulate_path(plan, derive_seed(cfg.seed, i)); });
  return paths;
}

struct CovarianceEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  int paths = 0;
};

inline std::size_t grid_index(const PathSample& path, double t) {
  for (std::size_t i = 0; i < path.times.size(); ++i)
    if (std::abs(path.times[i] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return i;
  std::ostringstream msg;
  msg << "time " << t << " is not on the recorded grid";
  throw PreconditionError(msg.str());
}

/// Unbiased cross-covariance of Y(t1) and Y(t2) over paths with its jackknife
/// standard error (closed form of the leave-one-out recomputation).
inline CovarianceEstimate empirical_covariance(const std::vector<PathSample>& paths, double t1, double t2) {
  require(paths.size() >= 3, "empirical_covariance needs at least three paths");
  const std::size_t i1 = grid_index(paths.front(), t1);
  const std::size_t i2 = grid_index(paths.front(), t2);
  const std::size_t n = paths.size();
  std::vector<double> x(n), y(n);
  for (std::size_t k = 0; k < n; ++k) {
    require(paths[k].times == paths.front().times, "paths must share one grid");
    x[k] = paths[k].observations[i1];
    y[k] = paths[k].observations[i2];
  }
  const double mx = pairwise_sum(x.begin(), x.end()) / n;
  const double my = pairwise_sum(y.begin(), y.end()) / n;
  std::vector<double> d(n);
  for (std::size_t k = 0; k < n; ++k) d[k] = (x[k] - mx) * (y[k] - my);
  const double sxy = pairwise_sum(d.begin(), d.end());
  const double dn = static_cast<double>(n);
  const double dbar = sxy / dn;
  std::vector<double> dev(n);
  for (std::size_t k = 0; k < n; ++k) dev[k] = (d[k] - dbar) * (d[k] - dbar);
  // theta_{-i} - mean = -n / ((n-1)(n-2)) (d_i - dbar).
  const double spread = pairwise_sum(dev.begin(), dev.end());
  CovarianceEstimate est;
  est.estimate = sxy / (dn - 1.0);
  est.std_error = dn / ((dn - 1.0) * (dn - 2.0)) * std::sqrt((dn - 1.0) / dn * spread);
  est.paths = static_cast<int>(n);
  return est;
}

}  // namespace tvls
