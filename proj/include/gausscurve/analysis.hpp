#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gausscurve/core.hpp"
#include "gausscurve/geometry.hpp"
#include "gausscurve/operator.hpp"
#include "gausscurve/solver.hpp"
#include "gausscurve/stencil.hpp"

namespace gausscurve {

struct ExactSolution {
  std::string name;
  Domain domain = Domain::half_disc();
  ScalarField u_exact;
  ScalarField kappa;
  ScalarField g;
  std::string notes;

  ProblemSpec problem() const { return {domain, kappa, g}; }
};

/// -sqrt(1 - x² - y²), clamped at the unit circle.
inline double lower_hemisphere(Vec2 p) { return -std::sqrt(std::max(0.0, 1.0 - norm_sq(p))); }

/// The three half-disc examples: a Lipschitz ridge with zero curvature, the
/// unit-ball surface, and the unit-ball surface with data lifted by x/4.
inline std::vector<ExactSolution> builtin_examples() {
  const double s = std::sin(kPi / 10.0), c = std::cos(kPi / 10.0);
  auto ridge = [s, c](Vec2 p) { return std::abs(-p.x * s + p.y * c); };
  auto zero = [](Vec2) { return 0.0; };
  auto one = [](Vec2) { return 1.0; };
  std::vector<ExactSolution> out;
  out.push_back({"lipschitz", Domain::half_disc(), ridge, zero, ridge,
                 "Lipschitz but not differentiable along a line off the grid directions; kappa = 0"});
  out.push_back({"ball", Domain::half_disc(), lower_hemisphere, one, lower_hemisphere,
                 "continuous; gradient unbounded on the arc; kappa = 1"});
  out.push_back({"noncts", Domain::half_disc(), lower_hemisphere, one,
                 [](Vec2 p) { return lower_hemisphere(p) + 0.25 * p.x; },
                 "Dirichlet data not attained; boundary layer of height x/4; kappa = 1"});
  return out;
}

inline std::optional<ExactSolution> find_example(const std::string& name) {
  for (auto& ex : builtin_examples())
    if (ex.name == name) return ex;
  return std::nullopt;
}

/// Piecewise-constant extension: the max of U over the cloud points nearest to x.
inline double extend_nearest(const PointCloud& cloud, const GridFunction& u, Vec2 x) {
  const auto [d2, ids] = cloud.index().nearest(x);
  double best = -std::numeric_limits<double>::infinity();
  for (PointId id : ids) best = std::max(best, u[id]);
  return best;
}

inline double error_sup(const PointCloud& cloud, const GridFunction& u, const ExactSolution& exact) {
  double e = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) e = std::max(e, std::abs(u[i] - exact.u_exact(cloud.point(static_cast<PointId>(i)))));
  return e;
}

/// Sup error restricted to points farther than band from the boundary.
inline double error_sup_interior(const PointCloud& cloud, const GridFunction& u, const ExactSolution& exact, double band) {
  double e = 0.0;
  for (std::size_t i = 0; i < cloud.interior_count(); ++i) {
    const Vec2 p = cloud.point(static_cast<PointId>(i));
    if (cloud.domain().distance_to_boundary(p) > band) e = std::max(e, std::abs(u[i] - exact.u_exact(p)));
  }
  return e;
}

/// h² Σ |U - u| over interior points.
inline double error_l1(const PointCloud& cloud, const GridFunction& u, const ExactSolution& exact) {
  double sum = 0.0;
  for (std::size_t i = 0; i < cloud.interior_count(); ++i)
    sum += std::abs(u[i] - exact.u_exact(cloud.point(static_cast<PointId>(i))));
  return sum * cloud.h() * cloud.h();
}

struct ErrorRow {
  double h = 0.0;
  double sup_error = 0.0;
  double l1_error = 0.0;
  double interior_sup_error = 0.0;
  std::size_t iterations = 0;
  double wall_seconds = 0.0;
  double final_residual = 0.0;
  bool converged = false;
  std::string message;
};

struct ErrorTable {
  std::string example;
  double interior_band = 0.2;
  std::vector<ErrorRow> rows;

  bool all_converged() const {
    return std::all_of(rows.begin(), rows.end(), [](const ErrorRow& r) { return r.converged; });
  }
};

struct StudyOptions {
  /// Residual tolerance; defaults to 1e-8 / h² per row.
  std::optional<double> tol;
  std::size_t max_iters = 2'000'000;
  double interior_band = 0.2;
};

struct SolvedExample {
  PointCloud cloud;
  StencilTable table;
  SolveResult result;
};

inline SolverConfig study_config(double h, const StudyOptions& opt) {
  SolverConfig cfg = SolverConfig::for_spacing(h);
  if (opt.tol) cfg.tol = *opt.tol;
  cfg.max_iters = opt.max_iters;
  return cfg;
}

inline SolvedExample solve_example(const ExactSolution& ex, double h, const SolverConfig& cfg) {
  PointCloud cloud = build_point_cloud(ex.domain, h);
  StencilTable table = build_stencil_table(cloud, make_direction_set(h));
  const ProblemSpec spec = ex.problem();
  const Scheme scheme(spec, cloud, table);
  SolveResult result = solve(scheme, cfg);
  return {std::move(cloud), std::move(table), std::move(result)};
}

inline ErrorRow error_row(const ExactSolution& ex, const SolvedExample& s, double band) {
  ErrorRow row;
  row.h = s.cloud.h();
  row.sup_error = error_sup(s.cloud, s.result.u, ex);
  row.l1_error = error_l1(s.cloud, s.result.u, ex);
  row.interior_sup_error = error_sup_interior(s.cloud, s.result.u, ex, band);
  row.iterations = s.result.report.iterations;
  row.wall_seconds = s.result.report.wall_seconds;
  row.final_residual = s.result.report.final_residual;
  row.converged = s.result.report.converged;
  row.message = s.result.report.message;
  return row;
}

/// Builds, solves, and measures one row per h. A failing row is recorded
/// and the study moves on.
inline ErrorTable convergence_study(const ExactSolution& ex, const std::vector<double>& h_list, const StudyOptions& opt = {}) {
  for (std::size_t i = 1; i < h_list.size(); ++i)
    if (!(h_list[i] < h_list[i - 1])) throw Error(ErrorKind::InvalidArgument, "h list must be strictly decreasing");
  ErrorTable table;
  table.example = ex.name;
  table.interior_band = opt.interior_band;
  for (double h : h_list) {
    try {
      table.rows.push_back(error_row(ex, solve_example(ex, h, study_config(h, opt)), opt.interior_band));
    } catch (const Error& e) {
      ErrorRow row;
      row.h = h;
      row.sup_error = row.l1_error = row.interior_sup_error = std::numeric_limits<double>::quiet_NaN();
      row.message = e.what();
      table.rows.push_back(row);
    }
  }
  return table;
}

inline void write_error_table_csv(std::ostream& os, const ErrorTable& t) {
  os << "example,h,sup_error,l1_error,interior_sup_error,iterations,wall_seconds,final_residual,converged\n";
  os << std::setprecision(10);
  for (const auto& r : t.rows)
    os << t.example << ',' << r.h << ',' << r.sup_error << ',' << r.l1_error << ',' << r.interior_sup_error << ','
       << r.iterations << ',' << r.wall_seconds << ',' << r.final_residual << ',' << (r.converged ? 1 : 0) << '\n';
}

/// h written as 2^-k when it is an exact power of two.
inline std::string format_h(double h) {
  const double k = -std::log2(h);
  if (std::abs(k - std::round(k)) < 1e-12) return "2^-" + std::to_string(static_cast<long>(std::round(k)));
  std::ostringstream os;
  os << h;
  return os.str();
}

inline void write_error_table_text(std::ostream& os, const ErrorTable& t) {
  char line[256];
  std::snprintf(line, sizeof line, "%-8s %12s %12s %12s %10s %10s\n", "h", "||u-u^h||_inf", "||u-u^h||_1",
                "interior", "iters", "seconds");
  os << "example: " << t.example << " (interior band " << t.interior_band << ")\n" << line;
  for (const auto& r : t.rows) {
    std::snprintf(line, sizeof line, "%-8s %12.2e %12.2e %12.2e %10zu %10.2f%s\n", format_h(r.h).c_str(), r.sup_error,
                  r.l1_error, r.interior_sup_error, r.iterations, r.wall_seconds, r.converged ? "" : "  (not converged)");
    os << line;
  }
}

}  // namespace gausscurve
