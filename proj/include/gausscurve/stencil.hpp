#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "gausscurve/core.hpp"
#include "gausscurve/geometry.hpp"
#include "gausscurve/parallel.hpp"

namespace gausscurve {

/// Angular threshold below which a neighbour counts as lying on an axis.
inline constexpr double kAlignTol = 1e-9;

/// Finite direction set: directions[k] = (cos((k+1)dθ), sin((k+1)dθ)) for
/// k = 0 .. 2N-1, where N dθ = π/2. Direction k and k+N form an orthogonal pair.
struct DirectionSet {
  double h = 0.0;
  double d_theta = 0.0;
  std::size_t pairs = 0;
  double delta = 0.0;
  std::vector<Vec2> directions;

  std::size_t size() const { return directions.size(); }
};

/// Search radius h(1 + cos(dθ/2)cot(dθ/2) + sin(dθ/2)).
inline double search_radius(double h, double d_theta) {
  const double half = 0.5 * d_theta;
  return h * (1.0 + std::cos(half) / std::tan(half) + std::sin(half));
}

/// Default angular scale: dθ ≈ (π/2) h^{1/4}, i.e. about h^{-1/4} orthogonal pairs.
inline constexpr double kDefaultAngularScale = 0.5 * kPi;

/// dθ ≈ angular_scale · h^{1/4}, capped at π/4 and shrunk so that π/2 is an
/// exact multiple of dθ.
inline DirectionSet make_direction_set(double h, double angular_scale = kDefaultAngularScale) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "h must be positive");
  const double target = std::min(angular_scale * std::pow(h, 0.25), 0.25 * kPi);
  const auto pairs = static_cast<std::size_t>(std::ceil(0.5 * kPi / target - 1e-9));
  DirectionSet set;
  set.h = h;
  set.pairs = pairs;
  set.d_theta = 0.5 * kPi / static_cast<double>(pairs);
  set.delta = search_radius(h, set.d_theta);
  set.directions.reserve(2 * pairs);
  for (std::size_t k = 1; k <= 2 * pairs; ++k) set.directions.push_back(unit_from_angle(static_cast<double>(k) * set.d_theta));
  return set;
}

/// Neighbour position in the frame (ν, ν⊥): C = r cos φ, S = r sin φ.
struct LocalCoord {
  double c = 0.0;
  double s = 0.0;

  double r() const { return std::hypot(c, s); }
};

struct Polar {
  double r = 0.0;
  double phi = 0.0;
};

inline LocalCoord to_local(Polar p) { return {p.r * std::cos(p.phi), p.r * std::sin(p.phi)}; }

/// Quadrant (0-based) of a local offset. On-axis offsets go to the quadrant
/// that starts at that axis: φ=0 → 0, φ=π/2 → 1, φ=π → 2, φ=3π/2 → 3.
inline int quadrant_of(LocalCoord q) {
  if (q.s >= 0.0 && q.c > 0.0) return 0;
  if (q.c <= 0.0 && q.s > 0.0) return 1;
  if (q.s <= 0.0 && q.c < 0.0) return 2;
  if (q.c >= 0.0 && q.s < 0.0) return 3;
  return -1;  // the origin
}

/// Local offset of d in frame (ν, ν⊥) with near-axis components snapped to 0.
inline LocalCoord local_offset(Vec2 d, Vec2 nu) {
  LocalCoord q{dot(d, nu), dot(d, perp(nu))};
  const double r = norm(d);
  if (std::abs(q.s) < kAlignTol * r) q.s = 0.0;
  if (std::abs(q.c) < kAlignTol * r) q.c = 0.0;
  return q;
}

struct QuadrantSelection {
  std::array<PointId, 4> ids{};
  std::array<LocalCoord, 4> local{};
};

/// One neighbour per quadrant of the (ν, ν⊥) frame inside B(x0, delta),
/// minimising sin²φ; ties go to the smaller radius, then the smaller id.
inline QuadrantSelection select_neighbors(const PointCloud& cloud, PointId x0, Vec2 nu, double delta) {
  const Vec2 c = cloud.point(x0);
  struct Best {
    double sin2 = std::numeric_limits<double>::infinity();
    double r2 = std::numeric_limits<double>::infinity();
    PointId id = std::numeric_limits<PointId>::max();
    LocalCoord q{};
  };
  std::array<Best, 4> best{};
  cloud.index().for_each_in_ball(c, delta, [&](PointId id, Vec2 p) {
    if (id == x0) return;
    const Vec2 d = p - c;
    const LocalCoord q = local_offset(d, nu);
    const int quad = quadrant_of(q);
    if (quad < 0) return;
    const double r2 = norm_sq(d);
    const double sin2 = q.s * q.s / r2;
    Best& b = best[static_cast<std::size_t>(quad)];
    if (sin2 < b.sin2 || (sin2 == b.sin2 && (r2 < b.r2 || (r2 == b.r2 && id < b.id)))) b = {sin2, r2, id, q};
  });
  QuadrantSelection out;
  for (std::size_t j = 0; j < 4; ++j) {
    if (best[j].id == std::numeric_limits<PointId>::max()) {
      std::ostringstream msg;
      msg << "point " << x0 << " at (" << c.x << ", " << c.y << "), direction (" << nu.x << ", " << nu.y
          << "), quadrant " << j + 1 << " is empty within radius " << delta;
      throw Error(ErrorKind::IncompleteStencil, msg.str());
    }
    out.ids[j] = best[j].id;
    out.local[j] = best[j].q;
  }
  return out;
}

struct SecondDiffCoefficients {
  std::array<double, 4> a{};
  bool aligned = false;
};

/// Monotone second-difference weights for the four quadrant neighbours.
///
/// When a neighbour lies on the ν-line on both sides (|sin φ| < 1e-9) the
/// nearest such pair gives the nonuniform three-point formula. Otherwise the
/// weights solve Σ a C = 0, Σ a S = 0, Σ a C² = 2 with a₁,a₄ tied to S and
/// a₂,a₃ likewise.
inline SecondDiffCoefficients d2_coefficients(const std::array<LocalCoord, 4>& q) {
  SecondDiffCoefficients out;
  double r_max = 0.0;
  std::array<double, 4> r{};
  for (std::size_t j = 0; j < 4; ++j) {
    r[j] = q[j].r();
    r_max = std::max(r_max, r[j]);
  }
  auto collinear = [&](std::size_t j) { return std::abs(q[j].s) < kAlignTol * r[j]; };
  std::optional<std::size_t> fwd, bwd;
  for (std::size_t j : {0u, 3u})
    if (collinear(j) && q[j].c > 0.0 && (!fwd || r[j] < r[*fwd])) fwd = j;
  for (std::size_t j : {1u, 2u})
    if (collinear(j) && q[j].c < 0.0 && (!bwd || r[j] < r[*bwd])) bwd = j;
  if (fwd && bwd) {
    const double rp = r[*fwd], rm = r[*bwd];
    out.aligned = true;
    out.a[*fwd] = 2.0 / (rp * (rp + rm));
    out.a[*bwd] = 2.0 / (rm * (rp + rm));
    return out;
  }
  const double C1 = q[0].c, C2 = q[1].c, C3 = q[2].c, C4 = q[3].c;
  const double S1 = q[0].s, S2 = q[1].s, S3 = q[2].s, S4 = q[3].s;
  const double back = C3 * S2 - C2 * S3;
  const double front = C1 * S4 - C4 * S1;
  const double denom = back * (C1 * C1 * S4 - C4 * C4 * S1) - front * (C3 * C3 * S2 - C2 * C2 * S3);
  if (!(std::abs(denom) >= 1e-14 * std::pow(r_max, 5))) {
    std::ostringstream msg;
    msg << "second-difference denominator " << denom << " at scale " << r_max;
    throw Error(ErrorKind::DegenerateStencil, msg.str());
  }
  out.a = {2.0 * S4 * back / denom, 2.0 * S3 * front / denom, -2.0 * S2 * front / denom, -2.0 * S1 * back / denom};
  return out;
}

inline SecondDiffCoefficients d2_coefficients(const std::array<Polar, 4>& polar) {
  std::array<LocalCoord, 4> q{};
  for (std::size_t j = 0; j < 4; ++j) q[j] = to_local(polar[j]);
  return d2_coefficients(q);
}

/// Upwind gradient weights. The (1,4) pair approximates -u_ν and the (2,3)
/// pair approximates +u_ν; all four weights are non-positive.
struct GradCoefficients {
  double b1 = 0.0, b4 = 0.0, b2 = 0.0, b3 = 0.0;
};

inline GradCoefficients grad_coefficients(const std::array<LocalCoord, 4>& q) {
  const double C1 = q[0].c, C2 = q[1].c, C3 = q[2].c, C4 = q[3].c;
  const double S1 = q[0].s, S2 = q[1].s, S3 = q[2].s, S4 = q[3].s;
  const double r1 = q[0].r(), r2 = q[1].r(), r3 = q[2].r(), r4 = q[3].r();
  GradCoefficients b;
  if (std::abs(S1) < kAlignTol * r1 && C1 > 0.0) {
    b.b1 = -1.0 / C1;
  } else if (std::abs(S4) < kAlignTol * r4 && C4 > 0.0) {
    b.b4 = -1.0 / C4;
  } else {
    const double den = S1 * C4 - C1 * S4;
    if (!(std::abs(den) >= 1e-14 * std::max(r1, r4) * std::max(r1, r4)))
      throw Error(ErrorKind::DegenerateStencil, "forward gradient pair is degenerate");
    b.b1 = S4 / den;
    b.b4 = -S1 / den;
  }
  if (std::abs(S3) < kAlignTol * r3 && C3 < 0.0) {
    b.b3 = 1.0 / C3;
  } else if (std::abs(S2) < kAlignTol * r2 && C2 < 0.0) {
    b.b2 = 1.0 / C2;
  } else {
    const double den = S2 * C3 - C2 * S3;
    if (!(std::abs(den) >= 1e-14 * std::max(r2, r3) * std::max(r2, r3)))
      throw Error(ErrorKind::DegenerateStencil, "backward gradient pair is degenerate");
    b.b2 = -S3 / den;
    b.b3 = S2 / den;
  }
  return b;
}

inline GradCoefficients grad_coefficients(const std::array<Polar, 4>& polar) {
  std::array<LocalCoord, 4> q{};
  for (std::size_t j = 0; j < 4; ++j) q[j] = to_local(polar[j]);
  return grad_coefficients(q);
}

struct DirectionalStencil {
  Vec2 nu{};
  std::array<PointId, 4> ids{};
  std::array<LocalCoord, 4> local{};
  std::array<double, 4> a{};
  GradCoefficients b{};
  bool aligned = false;

  Polar polar(std::size_t j) const { return {local[j].r(), std::atan2(local[j].s, local[j].c)}; }
  double weight_sum() const { return a[0] + a[1] + a[2] + a[3]; }
};

inline DirectionalStencil make_stencil(const PointCloud& cloud, PointId x0, Vec2 nu, double delta) {
  const QuadrantSelection sel = select_neighbors(cloud, x0, nu, delta);
  DirectionalStencil st;
  st.nu = nu;
  st.ids = sel.ids;
  st.local = sel.local;
  const SecondDiffCoefficients d2 = d2_coefficients(sel.local);
  st.a = d2.a;
  st.aligned = d2.aligned;
  st.b = grad_coefficients(sel.local);
  return st;
}

/// Precomputed stencils for every interior point: one per direction of the
/// direction set followed by the two coordinate-axis gradient stencils.
class StencilTable {
 public:
  StencilTable(const PointCloud& cloud, DirectionSet dirs) : dirs_(std::move(dirs)), n_interior_(cloud.interior_count()) {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t per = per_point();
    stencils_.resize(n_interior_ * per);
    parallel_for(n_interior_, [&](std::size_t p) {
      const auto id = static_cast<PointId>(p);
      for (std::size_t k = 0; k < per; ++k) {
        const Vec2 nu = k < dirs_.size() ? dirs_.directions[k] : (k == dirs_.size() ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0});
        stencils_[p * per + k] = make_stencil(cloud, id, nu, dirs_.delta);
      }
    }, 16);
    for (const auto& st : stencils_)
      for (double a : st.a)
        if (a < -1e-12) ++negative_weights_;
    build_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  const DirectionSet& directions() const { return dirs_; }
  std::size_t interior_count() const { return n_interior_; }
  std::size_t per_point() const { return dirs_.size() + 2; }

  const DirectionalStencil& stencil(PointId p, std::size_t direction) const { return stencils_[p * per_point() + direction]; }
  /// axis 0 → e₁, axis 1 → e₂.
  const DirectionalStencil& gradient(PointId p, std::size_t axis) const {
    return stencils_[p * per_point() + dirs_.size() + axis];
  }
  std::span<const DirectionalStencil> all() const { return stencils_; }

  /// Number of second-difference weights below -1e-12 (monotonicity violations).
  std::size_t negative_weights() const { return negative_weights_; }
  double build_seconds() const { return build_seconds_; }

 private:
  DirectionSet dirs_;
  std::size_t n_interior_;
  std::vector<DirectionalStencil> stencils_;
  std::size_t negative_weights_ = 0;
  double build_seconds_ = 0.0;
};

inline StencilTable build_stencil_table(const PointCloud& cloud, const DirectionSet& dirs) {
  return StencilTable(cloud, dirs);
}

}  // namespace gausscurve
