#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gausscurve/core.hpp"

namespace gausscurve {

struct BBox {
  Vec2 lo;
  Vec2 hi;

  double diameter() const { return norm(hi - lo); }
  bool contains(Vec2 p) const { return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y; }
};

/// A bounded convex domain in the plane, described by a boundary curve
/// t in [0,1) -> R^2 and an open-set membership predicate.
class Domain {
 public:
  enum class Kind { UnitDisc, HalfDisc, Generic };

  using Curve = std::function<Vec2(double)>;
  using Predicate = std::function<bool(Vec2)>;
  using Distance = std::function<double(Vec2)>;

  static Domain unit_disc() {
    Domain d;
    d.kind_ = Kind::UnitDisc;
    d.name_ = "full-disc";
    d.box_ = {{-1.0, -1.0}, {1.0, 1.0}};
    d.perimeter_ = 2.0 * kPi;
    d.curve_ = [](double t) { return unit_from_angle(2.0 * kPi * t); };
    d.inside_ = [](Vec2 p) { return norm_sq(p) < 1.0; };
    d.distance_ = [](Vec2 p) { return std::abs(1.0 - norm(p)); };
    return d;
  }

  /// The part of the unit disc with x > 0. The boundary curve runs up the
  /// diameter from (0,-1) to (0,1), then clockwise along the arc, with the
  /// parameter proportional to arclength.
  static Domain half_disc() {
    Domain d;
    d.kind_ = Kind::HalfDisc;
    d.name_ = "half-disc";
    d.box_ = {{0.0, -1.0}, {1.0, 1.0}};
    d.perimeter_ = 2.0 + kPi;
    d.curve_ = [](double t) {
      const double s = t * (2.0 + kPi);
      if (s < 2.0) return Vec2{0.0, -1.0 + s};
      return unit_from_angle(0.5 * kPi - (s - 2.0));
    };
    d.inside_ = [](Vec2 p) { return p.x > 0.0 && norm_sq(p) < 1.0; };
    d.distance_ = [](Vec2 p) {
      const double to_segment = std::hypot(p.x, std::max(0.0, std::abs(p.y) - 1.0));
      const double to_arc = p.x >= 0.0 ? std::abs(norm(p) - 1.0)
                                       : std::min(norm(p - Vec2{0.0, 1.0}), norm(p - Vec2{0.0, -1.0}));
      return std::min(to_segment, to_arc);
    };
    return d;
  }

  /// Convex polygon with counter-clockwise vertices.
  static Domain convex_polygon(std::vector<Vec2> vertices, std::string name = "polygon") {
    if (vertices.size() < 3) throw Error(ErrorKind::InvalidArgument, "polygon needs at least 3 vertices");
    auto verts = std::make_shared<const std::vector<Vec2>>(std::move(vertices));
    const auto& v = *verts;
    const std::size_t n = v.size();
    auto lengths = std::make_shared<std::vector<double>>(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 a = v[i], b = v[(i + 1) % n];
      if (cross(b - a, v[(i + 2) % n] - b) <= 0.0)
        throw Error(ErrorKind::InvalidArgument, "polygon is not strictly convex counter-clockwise");
      (*lengths)[i + 1] = (*lengths)[i] + norm(b - a);
    }
    BBox box{v[0], v[0]};
    for (Vec2 p : v) {
      box.lo = {std::min(box.lo.x, p.x), std::min(box.lo.y, p.y)};
      box.hi = {std::max(box.hi.x, p.x), std::max(box.hi.y, p.y)};
    }
    auto curve = [verts, lengths](double t) {
      const auto& vv = *verts;
      const auto& len = *lengths;
      const double s = t * len.back();
      auto it = std::upper_bound(len.begin(), len.end(), s);
      std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - len.begin() - 1));
      i = std::min(i, vv.size() - 1);
      const double seg = len[i + 1] - len[i];
      const double f = seg > 0.0 ? (s - len[i]) / seg : 0.0;
      const Vec2 a = vv[i], b = vv[(i + 1) % vv.size()];
      return a + (b - a) * f;
    };
    auto inside = [verts](Vec2 p) {
      const auto& vv = *verts;
      for (std::size_t i = 0; i < vv.size(); ++i)
        if (cross(vv[(i + 1) % vv.size()] - vv[i], p - vv[i]) <= 0.0) return false;
      return true;
    };
    auto distance = [verts](Vec2 p) {
      const auto& vv = *verts;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < vv.size(); ++i) {
        const Vec2 a = vv[i], e = vv[(i + 1) % vv.size()] - a;
        const double f = std::clamp(dot(p - a, e) / norm_sq(e), 0.0, 1.0);
        best = std::min(best, norm(p - (a + e * f)));
      }
      return best;
    };
    Domain d = generic(std::move(name), std::move(curve), std::move(inside), box, std::move(distance));
    d.perimeter_ = lengths->back();
    return d;
  }

  /// Arbitrary convex domain. Without an explicit distance function the
  /// distance to the boundary is measured against a fine polyline.
  static Domain generic(std::string name, Curve curve, Predicate inside, BBox box, Distance distance = {}) {
    Domain d;
    d.kind_ = Kind::Generic;
    d.name_ = std::move(name);
    d.box_ = box;
    d.curve_ = std::move(curve);
    d.inside_ = std::move(inside);
    constexpr int kSamples = 4096;
    auto poly = std::make_shared<std::vector<Vec2>>();
    poly->reserve(kSamples + 1);
    for (int i = 0; i <= kSamples; ++i) poly->push_back(d.curve_(static_cast<double>(i % kSamples) / kSamples));
    double perimeter = 0.0;
    for (int i = 0; i < kSamples; ++i) perimeter += norm((*poly)[i + 1] - (*poly)[i]);
    d.perimeter_ = perimeter;
    if (distance) {
      d.distance_ = std::move(distance);
    } else {
      d.distance_ = [poly](Vec2 p) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < poly->size(); ++i) {
          const Vec2 a = (*poly)[i], e = (*poly)[i + 1] - a;
          const double len = norm_sq(e);
          const double f = len > 0.0 ? std::clamp(dot(p - a, e) / len, 0.0, 1.0) : 0.0;
          best = std::min(best, norm(p - (a + e * f)));
        }
        return best;
      };
    }
    return d;
  }

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const BBox& bbox() const { return box_; }
  double diameter() const { return box_.diameter(); }
  double perimeter() const { return perimeter_; }
  bool contains(Vec2 p) const { return inside_(p); }
  Vec2 boundary_point(double t) const { return curve_(t - std::floor(t)); }
  double distance_to_boundary(Vec2 p) const { return distance_(p); }

 private:
  Domain() = default;

  Kind kind_ = Kind::Generic;
  std::string name_;
  BBox box_{};
  double perimeter_ = 0.0;
  Curve curve_;
  Predicate inside_;
  Distance distance_;
};

/// Uniform bucket grid over a fixed point set.
class SpatialIndex {
 public:
  SpatialIndex() = default;

  SpatialIndex(std::span<const Vec2> points, std::span<const PointId> ids, double cell) : cell_(cell) {
    if (ids.empty()) return;
    lo_ = points[ids[0]];
    Vec2 hi = lo_;
    for (PointId id : ids) {
      const Vec2 p = points[id];
      lo_ = {std::min(lo_.x, p.x), std::min(lo_.y, p.y)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    nx_ = static_cast<long>(std::floor((hi.x - lo_.x) / cell_)) + 1;
    ny_ = static_cast<long>(std::floor((hi.y - lo_.y) / cell_)) + 1;
    std::vector<std::size_t> counts(static_cast<std::size_t>(nx_ * ny_) + 1, 0);
    for (PointId id : ids) ++counts[bucket_of(points[id]) + 1];
    for (std::size_t i = 1; i < counts.size(); ++i) counts[i] += counts[i - 1];
    offsets_ = counts;
    entries_.resize(ids.size());
    for (PointId id : ids) entries_[counts[bucket_of(points[id])]++] = {id, points[id]};
  }

  bool empty() const { return entries_.empty(); }

  /// Calls visit(id, position) for every indexed point with |p - center| <= radius.
  template <class Visit>
  void for_each_in_ball(Vec2 center, double radius, Visit&& visit) const {
    if (entries_.empty()) return;
    const double r2 = radius * radius;
    const long i0 = std::max(0L, cell_index(center.x - radius, lo_.x));
    const long i1 = std::min(nx_ - 1, cell_index(center.x + radius, lo_.x));
    const long j0 = std::max(0L, cell_index(center.y - radius, lo_.y));
    const long j1 = std::min(ny_ - 1, cell_index(center.y + radius, lo_.y));
    for (long j = j0; j <= j1; ++j) {
      for (long i = i0; i <= i1; ++i) {
        const auto b = static_cast<std::size_t>(j * nx_ + i);
        for (std::size_t k = offsets_[b]; k < offsets_[b + 1]; ++k) {
          const auto& e = entries_[k];
          if (norm_sq(e.p - center) <= r2) visit(e.id, e.p);
        }
      }
    }
  }

  /// Squared distance to the nearest indexed point and every id attaining it.
  /// Ties are detected with a relative tolerance of 1e-12 on the distance.
  std::pair<double, std::vector<PointId>> nearest(Vec2 q) const {
    std::pair<double, std::vector<PointId>> out{std::numeric_limits<double>::infinity(), {}};
    if (entries_.empty()) return out;
    double radius = cell_;
    const double span = std::hypot(static_cast<double>(nx_), static_cast<double>(ny_)) * cell_ +
                        norm(q - lo_) + cell_;
    for (;;) {
      double best = std::numeric_limits<double>::infinity();
      for_each_in_ball(q, radius, [&](PointId, Vec2 p) { best = std::min(best, norm_sq(p - q)); });
      if (best < std::numeric_limits<double>::infinity() || radius > span) {
        if (best == std::numeric_limits<double>::infinity()) break;
        const double d = std::sqrt(best);
        const double tie = d * (1.0 + 1e-12) + 1e-300;
        for_each_in_ball(q, tie, [&](PointId id, Vec2) { out.second.push_back(id); });
        std::sort(out.second.begin(), out.second.end());
        out.first = best;
        return out;
      }
      radius *= 2.0;
    }
    return out;
  }

 private:
  struct Entry {
    PointId id;
    Vec2 p;
  };

  long cell_index(double v, double lo) const { return static_cast<long>(std::floor((v - lo) / cell_)); }
  std::size_t bucket_of(Vec2 p) const {
    const long i = std::clamp(cell_index(p.x, lo_.x), 0L, nx_ - 1);
    const long j = std::clamp(cell_index(p.y, lo_.y), 0L, ny_ - 1);
    return static_cast<std::size_t>(j * nx_ + i);
  }

  double cell_ = 1.0;
  Vec2 lo_{};
  long nx_ = 0;
  long ny_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<Entry> entries_;
};

/// Discretisation points: interior points come first (ids 0..n_interior-1),
/// boundary points after. Immutable once built.
class PointCloud {
 public:
  PointCloud(Domain domain, std::vector<Vec2> interior, std::vector<Vec2> boundary, double h)
      : domain_(std::move(domain)), n_interior_(interior.size()), h_(h) {
    if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "h must be positive");
    points_ = std::move(interior);
    points_.insert(points_.end(), boundary.begin(), boundary.end());
    std::vector<PointId> all(points_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<PointId>(i);
    std::vector<PointId> bdy(all.begin() + static_cast<std::ptrdiff_t>(n_interior_), all.end());
    index_ = SpatialIndex(points_, all, h_);
    boundary_index_ = SpatialIndex(points_, bdy, h_);
    h_boundary_ = measure_boundary_resolution(std::max<std::size_t>(8 * boundary.size(), 4096));
  }

  const Domain& domain() const { return domain_; }
  double h() const { return h_; }
  /// Sup distance from the boundary curve to the nearest boundary point.
  double h_boundary() const { return h_boundary_; }
  /// h_B / h^{3/2}.
  double boundary_constant() const { return h_boundary_ / std::pow(h_, 1.5); }

  std::size_t size() const { return points_.size(); }
  std::size_t interior_count() const { return n_interior_; }
  std::size_t boundary_count() const { return points_.size() - n_interior_; }
  bool is_boundary(PointId id) const { return id >= n_interior_; }
  Vec2 point(PointId id) const { return points_[id]; }
  std::span<const Vec2> points() const { return points_; }
  std::span<const Vec2> interior_points() const { return std::span(points_).first(n_interior_); }
  std::span<const Vec2> boundary_points() const { return std::span(points_).subspan(n_interior_); }

  const SpatialIndex& index() const { return index_; }
  const SpatialIndex& boundary_index() const { return boundary_index_; }

  double measure_boundary_resolution(std::size_t n_probe) const {
    if (boundary_index_.empty()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (std::size_t k = 0; k < n_probe; ++k) {
      const Vec2 y = domain_.boundary_point((static_cast<double>(k) + 0.5) / static_cast<double>(n_probe));
      worst = std::max(worst, boundary_index_.nearest(y).first);
    }
    return std::sqrt(worst);
  }

 private:
  Domain domain_;
  std::vector<Vec2> points_;
  std::size_t n_interior_;
  double h_;
  double h_boundary_ = 0.0;
  SpatialIndex index_;
  SpatialIndex boundary_index_;
};

/// Boundary sample count: 4/h^{3/2} for the half-disc, scaled by perimeter
/// for other domains.
inline std::size_t boundary_sample_count(const Domain& domain, double h) {
  const double relative = domain.perimeter() / (2.0 + kPi);
  return static_cast<std::size_t>(std::ceil(relative * 4.0 / std::pow(h, 1.5)));
}

/// Origin-anchored lattice points strictly inside the domain, plus a dense
/// ring of boundary samples uniform in the curve parameter.
///
/// Lattice points closer to the boundary than one boundary-sample spacing
/// are dropped: every quarter-plane cone from a kept point then crosses the
/// boundary along a chord long enough to contain a sample.
inline PointCloud build_point_cloud(const Domain& domain, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorKind::InvalidArgument, "h must be positive");
  const BBox& box = domain.bbox();
  const std::size_t nb = boundary_sample_count(domain, h);
  const double snap = std::max(1e-12 * domain.diameter(), domain.perimeter() / static_cast<double>(nb));
  std::vector<Vec2> interior;
  const long i0 = static_cast<long>(std::ceil(box.lo.x / h)), i1 = static_cast<long>(std::floor(box.hi.x / h));
  const long j0 = static_cast<long>(std::ceil(box.lo.y / h)), j1 = static_cast<long>(std::floor(box.hi.y / h));
  for (long j = j0; j <= j1; ++j) {
    for (long i = i0; i <= i1; ++i) {
      const Vec2 p{static_cast<double>(i) * h, static_cast<double>(j) * h};
      if (domain.contains(p) && domain.distance_to_boundary(p) > snap) interior.push_back(p);
    }
  }
  if (interior.empty()) {
    std::ostringstream msg;
    msg << "no interior lattice point for h = " << h << " on " << domain.name();
    throw Error(ErrorKind::DegenerateCloud, msg.str());
  }
  std::vector<Vec2> boundary;
  boundary.reserve(nb);
  for (std::size_t k = 0; k < nb; ++k)
    boundary.push_back(domain.boundary_point(static_cast<double>(k) / static_cast<double>(nb)));
  return PointCloud(domain, std::move(interior), std::move(boundary), h);
}

struct ResolutionMetrics {
  double h_eff = 0.0;
  double h_boundary = 0.0;
};

/// Radical-inverse (van der Corput) sequence in the given base.
inline double radical_inverse(std::uint64_t n, unsigned base) {
  double inv = 1.0 / base, f = inv, value = 0.0;
  while (n > 0) {
    value += f * static_cast<double>(n % base);
    n /= base;
    f *= inv;
  }
  return value;
}

/// Covering radius of the cloud over the domain and over its boundary,
/// estimated with Halton probes.
inline ResolutionMetrics resolution_metrics(const PointCloud& cloud, std::size_t n_probe) {
  if (n_probe < 100) throw Error(ErrorKind::InvalidArgument, "resolution_metrics needs at least 100 probes");
  const Domain& domain = cloud.domain();
  const BBox& box = domain.bbox();
  ResolutionMetrics out;
  std::size_t found = 0;
  for (std::uint64_t k = 1; found < n_probe && k < 1000 * n_probe; ++k) {
    const Vec2 y{box.lo.x + (box.hi.x - box.lo.x) * radical_inverse(k, 2),
                 box.lo.y + (box.hi.y - box.lo.y) * radical_inverse(k, 3)};
    if (!domain.contains(y)) continue;
    ++found;
    out.h_eff = std::max(out.h_eff, std::sqrt(cloud.index().nearest(y).first));
  }
  for (std::size_t k = 0; k < n_probe; ++k) {
    const Vec2 y = domain.boundary_point(radical_inverse(k + 1, 2));
    out.h_boundary = std::max(out.h_boundary, std::sqrt(cloud.boundary_index().nearest(y).first));
  }
  return out;
}

struct Neighbor {
  PointId id;
  double r;
  /// Angle in [0, 2pi) measured counter-clockwise from the supplied axis.
  double phi;
};

/// All cloud points other than x0 within distance delta, ordered by id.
inline std::vector<Neighbor> neighbors_in_ball(const PointCloud& cloud, PointId x0, double delta,
                                               Vec2 axis = {1.0, 0.0}) {
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "delta must be positive");
  const Vec2 c = cloud.point(x0);
  std::vector<Neighbor> out;
  cloud.index().for_each_in_ball(c, delta, [&](PointId id, Vec2 p) {
    if (id == x0) return;
    const Vec2 d = p - c;
    double phi = std::atan2(cross(axis, d), dot(axis, d));
    if (phi < 0.0) phi += 2.0 * kPi;
    out.push_back({id, norm(d), phi});
  });
  std::sort(out.begin(), out.end(), [](const Neighbor& a, const Neighbor& b) { return a.id < b.id; });
  return out;
}

inline void write_cloud_csv(std::ostream& os, const PointCloud& cloud) {
  os << "id,x,y,is_boundary\n" << std::setprecision(17);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec2 p = cloud.point(static_cast<PointId>(i));
    os << i << ',' << p.x << ',' << p.y << ',' << (cloud.is_boundary(static_cast<PointId>(i)) ? 1 : 0) << '\n';
  }
}

}  // namespace gausscurve
