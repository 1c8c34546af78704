#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "gausscurve/core.hpp"
#include "gausscurve/geometry.hpp"
#include "gausscurve/parallel.hpp"
#include "gausscurve/stencil.hpp"

namespace gausscurve {

using ScalarField = std::function<double(Vec2)>;

/// Dirichlet problem for the prescribed Gaussian curvature equation in 2D.
struct ProblemSpec {
  Domain domain;
  ScalarField kappa;
  ScalarField g;
};

/// Heights indexed by cloud point id.
struct GridFunction {
  std::vector<double> values;

  GridFunction() = default;
  explicit GridFunction(std::size_t n, double fill = 0.0) : values(n, fill) {}
  explicit GridFunction(std::vector<double> v) : values(std::move(v)) {}

  static GridFunction sample(const PointCloud& cloud, const ScalarField& f) {
    GridFunction out(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) out.values[i] = f(cloud.point(static_cast<PointId>(i)));
    return out;
  }

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  bool operator==(const GridFunction&) const = default;
};

/// (1 + |p|²)^{(n+2)/2} with n = 2.
constexpr double R(double p_sq) { return sqr(1.0 + p_sq); }
constexpr double R_prime(double p_sq) { return 2.0 * (1.0 + p_sq); }

/// Σ a_j (u(x_j) - u(x0)).
inline double second_diff(std::span<const double> u, PointId x0, const DirectionalStencil& s) {
  const double u0 = u[x0];
  return s.a[0] * (u[s.ids[0]] - u0) + s.a[1] * (u[s.ids[1]] - u0) + s.a[2] * (u[s.ids[2]] - u0) +
         s.a[3] * (u[s.ids[3]] - u0);
}

/// Forward (≈ -u_ν) and backward (≈ +u_ν) one-sided gradient values.
inline std::pair<double, double> gradient_pairs(std::span<const double> u, PointId x0, const DirectionalStencil& s) {
  const double u0 = u[x0];
  return {s.b.b1 * (u[s.ids[0]] - u0) + s.b.b4 * (u[s.ids[3]] - u0),
          s.b.b2 * (u[s.ids[1]] - u0) + s.b.b3 * (u[s.ids[2]] - u0)};
}

struct PointEvaluation {
  double value = 0.0;
  /// Upper bound on ∂F/∂u(x0) at the current iterate over both branches.
  double lipschitz = 0.0;
};

struct Compatibility {
  double lhs = 0.0;
  double rhs = kPi;
  bool ok = false;
};

/// Relative margin below π that the curvature integral must stay under.
/// Quadrature error on curved boundaries is well below this at the default
/// resolution, so a total curvature within 1% of π is treated as non-strict.
inline constexpr double kCompatibilityMargin = 1e-2;

/// Midpoint-rule ∫_Ω κ on an n×n lattice over the bounding box, compared
/// with ∫(1+|p|²)^{-2} dp = π.
inline Compatibility check_compatibility(const ProblemSpec& spec, std::size_t resolution = 1000) {
  const BBox& box = spec.domain.bbox();
  const double dx = (box.hi.x - box.lo.x) / static_cast<double>(resolution);
  const double dy = (box.hi.y - box.lo.y) / static_cast<double>(resolution);
  double sum = 0.0;
  for (std::size_t j = 0; j < resolution; ++j) {
    for (std::size_t i = 0; i < resolution; ++i) {
      const Vec2 c{box.lo.x + (static_cast<double>(i) + 0.5) * dx, box.lo.y + (static_cast<double>(j) + 0.5) * dy};
      if (spec.domain.contains(c)) sum += spec.kappa(c);
    }
  }
  Compatibility out;
  out.lhs = sum * dx * dy;
  out.ok = out.lhs < out.rhs * (1.0 - kCompatibilityMargin);
  return out;
}

/// The discrete convexified operator on a fixed cloud and stencil table.
/// κ is cached at interior points and g at boundary points.
class Scheme {
 public:
  static constexpr std::size_t kMaxDirections = 64;

  Scheme(const ProblemSpec& spec, const PointCloud& cloud, const StencilTable& table)
      : cloud_(&cloud), table_(&table), kappa_(cloud.size(), 0.0), g_(cloud.size(), 0.0) {
    if (table.interior_count() != cloud.interior_count())
      throw Error(ErrorKind::InvalidArgument, "stencil table does not match the point cloud");
    if (table.directions().size() > kMaxDirections)
      throw Error(ErrorKind::InvalidArgument, "direction set too large");
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const auto id = static_cast<PointId>(i);
      if (cloud.is_boundary(id))
        g_[i] = spec.g(cloud.point(id));
      else
        kappa_[i] = spec.kappa(cloud.point(id));
    }
  }

  const PointCloud& cloud() const { return *cloud_; }
  const StencilTable& table() const { return *table_; }
  double kappa(PointId p) const { return kappa_[p]; }
  double g(PointId p) const { return g_[p]; }

  double second_diff(std::span<const double> u, PointId p, std::size_t direction) const {
    return gausscurve::second_diff(u, p, table_->stencil(p, direction));
  }

  /// min over orthogonal pairs of max{Δ_ν,0}·max{Δ_ν⊥,0}.
  double det_plus(std::span<const double> u, PointId p) const {
    const std::size_t n = table_->directions().pairs;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
      best = std::min(best, std::max(second_diff(u, p, j), 0.0) * std::max(second_diff(u, p, j + n), 0.0));
    return best;
  }

  double grad_mag_sq(std::span<const double> u, PointId p) const {
    double sum = 0.0;
    for (std::size_t axis = 0; axis < 2; ++axis) {
      const auto [fwd, bwd] = gradient_pairs(u, p, table_->gradient(p, axis));
      sum += sqr(std::max({fwd, bwd, 0.0}));
    }
    return sum;
  }

  double lambda1(std::span<const double> u, PointId p) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < table_->directions().size(); ++k) best = std::min(best, second_diff(u, p, k));
    return best;
  }

  /// max{-det⁺ + κ R(|∇u|²), -λ₁} at an interior point.
  double interior(std::span<const double> u, PointId p) const {
    return std::max(-det_plus(u, p) + kappa_[p] * R(grad_mag_sq(u, p)), -lambda1(u, p));
  }

  double boundary(std::span<const double> u, PointId p) const { return u[p] - g_[p]; }

  double at(std::span<const double> u, PointId p) const {
    return cloud_->is_boundary(p) ? boundary(u, p) : interior(u, p);
  }

  /// Operator value and local Lipschitz bound in one pass.
  PointEvaluation evaluate(std::span<const double> u, PointId p) const {
    if (cloud_->is_boundary(p)) return {u[p] - g_[p], 1.0};
    const DirectionSet& dirs = table_->directions();
    const std::size_t n_dir = dirs.size(), n_pair = dirs.pairs;
    std::array<double, kMaxDirections> d{};
    double lam = std::numeric_limits<double>::infinity(), k_lam = 0.0;
    for (std::size_t k = 0; k < n_dir; ++k) {
      const DirectionalStencil& s = table_->stencil(p, k);
      d[k] = gausscurve::second_diff(u, p, s);
      lam = std::min(lam, d[k]);
      k_lam = std::max(k_lam, s.weight_sum());
    }
    double det = std::numeric_limits<double>::infinity(), k_det = 0.0;
    for (std::size_t j = 0; j < n_pair; ++j) {
      const double pj = std::max(d[j], 0.0), qj = std::max(d[j + n_pair], 0.0);
      det = std::min(det, pj * qj);
      k_det = std::max(k_det, table_->stencil(p, j).weight_sum() * qj + table_->stencil(p, j + n_pair).weight_sum() * pj);
    }
    double grad_sq = 0.0, grad_slope = 0.0;
    for (std::size_t axis = 0; axis < 2; ++axis) {
      const DirectionalStencil& s = table_->gradient(p, axis);
      const auto [fwd, bwd] = gradient_pairs(u, p, s);
      const double m = std::max({fwd, bwd, 0.0});
      grad_sq += m * m;
      if (m > 0.0) {
        const double w = fwd >= bwd ? -(s.b.b1 + s.b.b4) : -(s.b.b2 + s.b.b3);
        grad_slope += 2.0 * m * w;
      }
    }
    const double kap = kappa_[p];
    PointEvaluation out;
    out.value = std::max(-det + kap * R(grad_sq), -lam);
    out.lipschitz = std::max(k_lam, k_det + kap * R_prime(grad_sq) * grad_slope);
    return out;
  }

  /// F^h at every cloud point.
  GridFunction residual(const GridFunction& u) const {
    GridFunction out(u.size());
    parallel_for(u.size(), [&](std::size_t i) { out.values[i] = at(u.values, static_cast<PointId>(i)); });
    return out;
  }

 private:
  const PointCloud* cloud_;
  const StencilTable* table_;
  std::vector<double> kappa_;
  std::vector<double> g_;
};

inline double sup_norm(const GridFunction& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace gausscurve
