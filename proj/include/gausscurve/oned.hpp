#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <span>
#include <vector>

#include "gausscurve/core.hpp"
#include "gausscurve/solver.hpp"

namespace gausscurve {

/// Gaussian curvature equation on an interval with Dirichlet data pinned at
/// both ends: -u'' + κ (1 + u'²)^{3/2} = 0.
struct Problem1D {
  double x_lo = 0.0;
  double x_hi = 1.0;
  std::function<double(double)> kappa = [](double) { return 1.0; };
  double g_lo = -1.0;
  double g_hi = 1.0;
  double h = 1.0 / 64.0;

  std::size_t intervals() const {
    if (!(x_lo < x_hi)) throw Error(ErrorKind::InvalidArgument, "empty interval");
    if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "h must be positive");
    const double n = (x_hi - x_lo) / h;
    const double rounded = std::round(n);
    if (rounded < 2.0 || std::abs(n - rounded) > 1e-9 * std::max(1.0, n))
      throw Error(ErrorKind::InvalidArgument, "h must divide the interval into at least two cells");
    return static_cast<std::size_t>(rounded);
  }
  double x(std::size_t i) const { return x_lo + static_cast<double>(i) * h; }
};

/// Upwind gradient magnitude max{(u_i - u_{i+1})/h, (u_i - u_{i-1})/h, 0}.
inline double upwind_slope_1d(std::span<const double> u, std::size_t i, double h) {
  return std::max({(u[i] - u[i + 1]) / h, (u[i] - u[i - 1]) / h, 0.0});
}

inline double f1d_interior(std::span<const double> u, std::size_t i, double kappa, double h) {
  const double slope = upwind_slope_1d(u, i, h);
  return -(u[i + 1] + u[i - 1] - 2.0 * u[i]) / (h * h) + kappa * std::pow(1.0 + slope * slope, 1.5);
}

struct Compatibility1D {
  double lhs = 0.0;
  double rhs = 2.0;
  bool ok = false;
};

/// ∫κ against ∫(1+p²)^{-3/2} dp = 2, midpoint rule on the problem grid.
inline Compatibility1D check_compatibility_1d(const Problem1D& p) {
  Compatibility1D out;
  const std::size_t n = p.intervals();
  for (std::size_t i = 0; i < n; ++i) out.lhs += p.kappa(p.x(i) + 0.5 * p.h) * p.h;
  out.ok = out.lhs < out.rhs;
  return out;
}

struct Solution1D {
  std::vector<double> x;
  std::vector<double> u;
  SolveReport report;
};

/// Explicit iteration with per-node steps from the super-solution
/// -x²/2 + M₁. End values stay equal to g_lo and g_hi throughout.
inline Solution1D solve_1d(const Problem1D& p, const SolverConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = p.intervals();
  const double h = p.h;
  Solution1D sol;
  sol.x.resize(n + 1);
  std::vector<double> kappa(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    sol.x[i] = p.x(i);
    kappa[i] = p.kappa(sol.x[i]);
  }
  const double m1 = std::max(std::abs(p.g_lo) + 0.5 * sqr(p.x_lo), std::abs(p.g_hi) + 0.5 * sqr(p.x_hi)) + 1.0;
  std::vector<double>& u = sol.u;
  u.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) u[i] = m1 - 0.5 * sqr(sol.x[i]);
  u[0] = p.g_lo;
  u[n] = p.g_hi;

  SolveReport& rep = sol.report;
  std::vector<double> value(n + 1, 0.0), dt(n + 1, 0.0);
  auto sweep = [&] {
    double res = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      value[i] = f1d_interior(u, i, kappa[i], h);
      const double slope = upwind_slope_1d(u, i, h);
      const double lip = 2.0 / (h * h) + kappa[i] * 3.0 * slope * std::sqrt(1.0 + slope * slope) / h;
      dt[i] = config.dt_safety / lip;
      res = std::max(res, std::abs(value[i]));
    }
    if (!std::isfinite(res)) throw Error(ErrorKind::Divergence, "non-finite residual in 1D solve");
    return res;
  };
  double res = sweep();
  rep.initial_residual = res;
  rep.dt_min = *std::min_element(dt.begin() + 1, dt.end() - 1);
  rep.dt_max = *std::max_element(dt.begin() + 1, dt.end() - 1);
  rep.log.push_back({0, res, rep.dt_min});
  while (res > config.tol && rep.iterations < config.max_iters) {
    for (std::size_t i = 1; i < n; ++i) value[i] = u[i] - dt[i] * value[i];
    for (std::size_t i = 1; i < n; ++i) u[i] = value[i];
    ++rep.iterations;
    res = sweep();
    rep.dt_min = std::min(rep.dt_min, *std::min_element(dt.begin() + 1, dt.end() - 1));
    if (rep.iterations % config.log_every == 0) rep.log.push_back({rep.iterations, res, rep.dt_min});
  }
  rep.final_residual = res;
  rep.converged = res <= config.tol;
  if (!rep.converged) rep.message = to_string(ErrorKind::MaxIterations);
  rep.min_u = std::numeric_limits<double>::infinity();
  for (double v : u) {
    rep.max_abs_u = std::max(rep.max_abs_u, std::abs(v));
    rep.min_u = std::min(rep.min_u, v);
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

inline void write_solution_1d_csv(std::ostream& os, const Solution1D& s) {
  os << "x,u\n";
  os.precision(17);
  for (std::size_t i = 0; i < s.x.size(); ++i) os << s.x[i] << ',' << s.u[i] << '\n';
}

}  // namespace gausscurve
