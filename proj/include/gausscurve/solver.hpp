#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

#include "gausscurve/core.hpp"
#include "gausscurve/operator.hpp"
#include "gausscurve/parallel.hpp"

namespace gausscurve {

struct SolverConfig {
  /// Target for the residual sup-norm.
  double tol = 1e-6;
  std::size_t max_iters = 1'000'000;
  double dt_safety = 0.9;
  /// Smallest admissible step; a smaller step raises "stalled step".
  double dt_floor = 1e-18;
  std::size_t log_every = 1000;
  /// Per-point steps dt(x) = dt_safety / K(x) instead of one global step.
  bool local_steps = true;

  /// Default tolerance 1e-8 / h², i.e. about 1e-8 in height units.
  static SolverConfig for_spacing(double h) {
    SolverConfig c;
    c.tol = 1e-8 / (h * h);
    return c;
  }

  void validate() const {
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
    if (!(dt_safety > 0.0 && dt_safety < 1.0)) throw Error(ErrorKind::InvalidArgument, "dt_safety must lie in (0,1)");
    if (log_every == 0) throw Error(ErrorKind::InvalidArgument, "log_every must be positive");
  }
};

struct IterationLogEntry {
  std::size_t iter = 0;
  double residual_sup = 0.0;
  double dt = 0.0;
};

struct SolveReport {
  std::size_t iterations = 0;
  double initial_residual = 0.0;
  double final_residual = 0.0;
  double dt_min = 0.0;
  double dt_max = 0.0;
  double wall_seconds = 0.0;
  bool converged = false;
  std::string message;
  /// max |U| and whether U stays below the initial super-solution.
  double max_abs_u = 0.0;
  double min_u = 0.0;
  bool below_initializer = true;
  std::vector<IterationLogEntry> log;
};

struct SolveResult {
  GridFunction u;
  SolveReport report;
};

/// w(x) = -|x|²/2 + M₁ with M₁ = max over boundary points of (|g| + |x|²/2) + 1.
inline GridFunction initialize(const Scheme& scheme) {
  const PointCloud& cloud = scheme.cloud();
  double m1 = 0.0;
  for (std::size_t i = cloud.interior_count(); i < cloud.size(); ++i) {
    const auto id = static_cast<PointId>(i);
    m1 = std::max(m1, std::abs(scheme.g(id)) + 0.5 * norm_sq(cloud.point(id)));
  }
  m1 += 1.0;
  GridFunction w(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) w.values[i] = m1 - 0.5 * norm_sq(cloud.point(static_cast<PointId>(i)));
  return w;
}

/// Global step dt_safety / max_x K(x), where K(x) bounds ∂F/∂u(x) at u.
/// Boundary rows contribute K = 1.
inline double step_bound(const GridFunction& u, const Scheme& scheme, const SolverConfig& config) {
  double k_max = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) k_max = std::max(k_max, scheme.evaluate(u.values, static_cast<PointId>(i)).lipschitz);
  const double dt = config.dt_safety / std::max(k_max, 1e-300);
  if (dt < config.dt_floor) {
    std::ostringstream msg;
    msg << "step " << dt << " below floor " << config.dt_floor;
    throw Error(ErrorKind::StalledStep, msg.str());
  }
  return dt;
}

/// u - dt F^h[u], evaluated against the old iterate.
inline GridFunction explicit_step(const GridFunction& u, double dt, const Scheme& scheme) {
  GridFunction out(u.size());
  parallel_for(u.size(), [&](std::size_t i) { out.values[i] = u.values[i] - dt * scheme.at(u.values, static_cast<PointId>(i)); });
  for (double v : out.values)
    if (!std::isfinite(v)) throw Error(ErrorKind::Divergence, "non-finite value after explicit step");
  return out;
}

/// u(x) - dt(x) F^h[u](x) with dt(x) = safety / K(x).
inline GridFunction explicit_step_local(const GridFunction& u, double safety, const Scheme& scheme) {
  GridFunction out(u.size());
  parallel_for(u.size(), [&](std::size_t i) {
    const PointEvaluation e = scheme.evaluate(u.values, static_cast<PointId>(i));
    out.values[i] = u.values[i] - safety / e.lipschitz * e.value;
  });
  for (double v : out.values)
    if (!std::isfinite(v)) throw Error(ErrorKind::Divergence, "non-finite value after explicit step");
  return out;
}

/// Damped explicit iteration from the super-solution initializer (or the
/// supplied start) until the residual sup-norm drops below tol.
inline SolveResult solve(const Scheme& scheme, const SolverConfig& config, const GridFunction* start = nullptr) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const GridFunction w = initialize(scheme);
  SolveResult result{start ? *start : w, {}};
  SolveReport& rep = result.report;
  std::vector<double>& u = result.u.values;
  const std::size_t n = u.size();
  std::vector<double> value(n), dt(n), next(n);

  auto sweep = [&] {
    parallel_for(n, [&](std::size_t i) {
      const PointEvaluation e = scheme.evaluate(u, static_cast<PointId>(i));
      value[i] = e.value;
      dt[i] = config.dt_safety / std::max(e.lipschitz, 1e-300);
    });
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(value[i])) {
        std::ostringstream msg;
        msg << "non-finite residual at point " << i << " after " << rep.iterations << " iterations";
        throw Error(ErrorKind::Divergence, msg.str());
      }
      res = std::max(res, std::abs(value[i]));
    }
    if (!config.local_steps) {
      const double global = *std::min_element(dt.begin(), dt.end());
      std::fill(dt.begin(), dt.end(), global);
    }
    return res;
  };

  double res = sweep();
  rep.initial_residual = res;
  rep.dt_min = std::numeric_limits<double>::infinity();
  rep.dt_max = 0.0;
  auto record = [&](double r) {
    const auto [lo, hi] = std::minmax_element(dt.begin(), dt.end());
    rep.dt_min = std::min(rep.dt_min, *lo);
    rep.dt_max = std::max(rep.dt_max, *hi);
    if (*lo < config.dt_floor) {
      std::ostringstream msg;
      msg << "step " << *lo << " below floor " << config.dt_floor << " at iteration " << rep.iterations;
      throw Error(ErrorKind::StalledStep, msg.str());
    }
    rep.log.push_back({rep.iterations, r, *lo});
  };
  record(res);
  while (res > config.tol && rep.iterations < config.max_iters) {
    for (std::size_t i = 0; i < n; ++i) next[i] = u[i] - dt[i] * value[i];
    u.swap(next);
    ++rep.iterations;
    res = sweep();
    if (rep.iterations % config.log_every == 0) record(res);
  }
  if (rep.log.back().iter != rep.iterations) record(res);
  rep.final_residual = res;
  rep.converged = res <= config.tol;
  if (!rep.converged) {
    std::ostringstream msg;
    msg << to_string(ErrorKind::MaxIterations) << " (" << config.max_iters << "), residual " << res;
    rep.message = msg.str();
  }
  rep.max_abs_u = 0.0;
  rep.min_u = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (double v : w.values) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < n; ++i) {
    rep.max_abs_u = std::max(rep.max_abs_u, std::abs(u[i]));
    rep.min_u = std::min(rep.min_u, u[i]);
    if (u[i] > w.values[i] + 1e-12 * scale) rep.below_initializer = false;
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

/// Given F^h[u] < F^h[v] at every point, reports whether u <= v everywhere.
inline bool check_discrete_comparison(const GridFunction& u, const GridFunction& v, const Scheme& scheme) {
  if (u.size() != v.size() || u.size() != scheme.cloud().size())
    throw Error(ErrorKind::InvalidArgument, "grid function size mismatch");
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto id = static_cast<PointId>(i);
    if (!(scheme.at(u.values, id) < scheme.at(v.values, id))) {
      std::ostringstream msg;
      msg << "F[u] >= F[v] at point " << i;
      throw Error(ErrorKind::NotAStrictPair, msg.str());
    }
  }
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u.values[i] > v.values[i]) return false;
  return true;
}

}  // namespace gausscurve
