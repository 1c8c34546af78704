#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "support.hpp"

using namespace gausscurve;

namespace {

/// Lattice points of the half-disc, counted directly: inside means x > 0 and
/// x² + y² < 1, and the distance to the boundary is min(x, 1 - r).
std::size_t half_disc_lattice_count(double h, double min_distance) {
  std::size_t n = 0;
  const int k = static_cast<int>(std::ceil(1.0 / h)) + 1;
  for (int j = -k; j <= k; ++j) {
    for (int i = 0; i <= k; ++i) {
      const double x = i * h, y = j * h;
      const double r = std::sqrt(x * x + y * y);
      if (x > 0.0 && r < 1.0 && std::min(x, 1.0 - r) > min_distance) ++n;
    }
  }
  return n;
}

}  // namespace

TEST(Domain, HalfDiscCurveAndDistance) {
  const Domain d = Domain::half_disc();
  EXPECT_NEAR(d.perimeter(), 2.0 + kPi, 1e-15);
  EXPECT_NEAR(d.boundary_point(0.0).y, -1.0, 1e-15);
  const double t_top = 2.0 / (2.0 + kPi);
  EXPECT_NEAR(d.boundary_point(t_top).y, 1.0, 1e-12);
  EXPECT_NEAR(d.boundary_point(t_top + 0.5 * kPi / (2.0 + kPi)).x, 1.0, 1e-12);
  for (int k = 0; k < 200; ++k) {
    const Vec2 p = d.boundary_point(k / 200.0);
    EXPECT_LT(d.distance_to_boundary(p), 1e-12);
    EXPECT_FALSE(d.contains(p * (1.0 + 1e-12)));
  }
  EXPECT_FALSE(d.contains({0.0, 0.5}));
  EXPECT_FALSE(d.contains({1.0, 0.0}));
  EXPECT_TRUE(d.contains({0.5, 0.0}));
  EXPECT_FALSE(d.contains({-0.1, 0.0}));
  EXPECT_NEAR(d.distance_to_boundary({0.25, 0.0}), 0.25, 1e-15);
  EXPECT_NEAR(d.distance_to_boundary({0.8, 0.0}), 0.2, 1e-15);
}

TEST(Domain, UnitDiscAndPolygon) {
  const Domain disc = Domain::unit_disc();
  EXPECT_EQ(disc.name(), "full-disc");
  EXPECT_NEAR(norm(disc.boundary_point(0.3)), 1.0, 1e-15);
  const Domain sq = Domain::convex_polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  EXPECT_NEAR(sq.perimeter(), 4.0, 1e-12);
  EXPECT_NEAR(sq.distance_to_boundary({0.25, 0.5}), 0.25, 1e-15);
  EXPECT_TRUE(sq.contains({0.5, 0.5}));
  EXPECT_FALSE(sq.contains({1.0, 0.5}));
  EXPECT_THROW(Domain::convex_polygon({{0, 0}, {0, 1}, {1, 0}}), Error);
}

TEST(PointCloud, HalfDiscCoarseCountsMatchLatticeOracle) {
  const double h = 0.125;
  const PointCloud c = build_point_cloud(Domain::half_disc(), h);
  const std::size_t nb = static_cast<std::size_t>(std::ceil(4.0 / std::pow(h, 1.5)));
  EXPECT_EQ(c.boundary_count(), nb);
  EXPECT_EQ(c.boundary_count(), 91u);
  const double spacing = (2.0 + kPi) / static_cast<double>(nb);
  EXPECT_EQ(c.interior_count(), half_disc_lattice_count(h, spacing));
  // Integer points with a² + b² < 64 number 193, 15 of them on a = 0;
  // half of the rest have a > 0.
  const std::size_t all = half_disc_lattice_count(h, 0.0);
  EXPECT_EQ(all, 89u);
  EXPECT_LE(c.interior_count(), all);
}

TEST(PointCloud, Invariants) {
  for (double h : {0.125, 0.0625}) {
    const PointCloud c = build_point_cloud(Domain::half_disc(), h);
    const Domain& d = c.domain();
    for (std::size_t i = 0; i < c.size(); ++i) {
      const auto id = static_cast<PointId>(i);
      const Vec2 p = c.point(id);
      if (c.is_boundary(id)) {
        EXPECT_LE(d.distance_to_boundary(p), 1e-12 * d.diameter());
      } else {
        EXPECT_TRUE(d.contains(p));
        EXPECT_NEAR(p.x / h, std::round(p.x / h), 1e-9);
        EXPECT_NEAR(p.y / h, std::round(p.y / h), 1e-9);
      }
    }
    EXPECT_LE(c.h_boundary(), h);
    EXPECT_TRUE(std::isfinite(c.boundary_constant()));
    EXPECT_LT(c.boundary_constant(), 2.0);
  }
}

TEST(PointCloud, DegenerateWhenNoLatticePointInside) {
  const Domain sq = Domain::convex_polygon({{0.1, 0.1}, {0.9, 0.1}, {0.9, 0.9}, {0.1, 0.9}});
  try {
    build_point_cloud(sq, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateCloud);
    EXPECT_NE(std::string(e.what()).find("degenerate cloud"), std::string::npos);
  }
  EXPECT_THROW(build_point_cloud(Domain::half_disc(), -1.0), Error);
}

TEST(PointCloud, Deterministic) {
  const PointCloud a = build_point_cloud(Domain::half_disc(), 0.0625);
  const PointCloud b = build_point_cloud(Domain::half_disc(), 0.0625);
  ASSERT_EQ(a.size(), b.size());
  std::ostringstream sa, sb;
  write_cloud_csv(sa, a);
  write_cloud_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(PointCloud, BoundaryRatioShrinks) {
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 3; k <= 6; ++k) {
    const double h = std::ldexp(1.0, -k);
    const PointCloud c = build_point_cloud(Domain::half_disc(), h);
    const double ratio = c.h_boundary() / h;
    EXPECT_LT(ratio, prev) << "k=" << k;
    prev = ratio;
  }
}

TEST(PointCloud, CsvLayout) {
  const PointCloud c = build_point_cloud(Domain::half_disc(), 0.25);
  std::ostringstream os;
  write_cloud_csv(os, c);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "id,x,y,is_boundary");
  std::size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, c.size());
}

TEST(Resolution, CoveringRadiusBounds) {
  const PointCloud c = build_point_cloud(Domain::half_disc(), 0.125);
  const ResolutionMetrics m = resolution_metrics(c, 4000);
  // The lattice covering radius is h/√2; dropped near-boundary points are
  // replaced by boundary samples no farther than one sample spacing.
  EXPECT_LE(m.h_eff, 0.125 * std::sqrt(2.0) / 2.0 + 0.06);
  const double half_spacing = 0.5 * (2.0 + kPi) / static_cast<double>(c.boundary_count());
  EXPECT_LE(m.h_boundary, half_spacing + 1e-12);
  EXPECT_LE(c.h_boundary(), half_spacing + 1e-12);
  EXPECT_GT(m.h_boundary, 0.9 * half_spacing);
  const ResolutionMetrics fine = resolution_metrics(build_point_cloud(Domain::half_disc(), 0.0625), 4000);
  EXPECT_LT(fine.h_eff, m.h_eff);
  EXPECT_LT(fine.h_boundary, m.h_boundary);
  EXPECT_THROW(resolution_metrics(c, 10), Error);
}

TEST(Resolution, SinglePointCloud) {
  const PointCloud c(Domain::half_disc(), {{0.5, 0.0}}, {}, 0.125);
  const ResolutionMetrics m = resolution_metrics(c, 500);
  // The farthest point of the half-disc from (0.5, 0) is (0, ±1).
  EXPECT_NEAR(m.h_eff, std::sqrt(1.25), 0.05);
}

TEST(Neighbors, LatticeRing) {
  const double h = 0.0625;
  const PointCloud c = build_point_cloud(Domain::half_disc(), h);
  PointId center = 0;
  for (std::size_t i = 0; i < c.interior_count(); ++i)
    if (norm(c.point(static_cast<PointId>(i)) - Vec2{0.5, 0.0}) < 1e-12) center = static_cast<PointId>(i);
  const auto nb = neighbors_in_ball(c, center, 1.5 * h);
  ASSERT_EQ(nb.size(), 8u);
  std::set<long> eighths;
  for (const auto& n : nb) {
    EXPECT_TRUE(std::abs(n.r - h) < 1e-12 || std::abs(n.r - h * std::sqrt(2.0)) < 1e-12);
    const double k = n.phi / (0.25 * kPi);
    EXPECT_NEAR(k, std::round(k), 1e-9);
    eighths.insert(std::lround(k) % 8);
  }
  EXPECT_EQ(eighths.size(), 8u);
  EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end(), [](auto& a, auto& b) { return a.id < b.id; }));
  EXPECT_TRUE(neighbors_in_ball(c, center, 0.9 * h).empty());
  EXPECT_THROW(neighbors_in_ball(c, center, 0.0), Error);
}

TEST(Neighbors, AgreesWithBruteForce) {
  const PointCloud c = build_point_cloud(Domain::half_disc(), 0.0625);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> pick(0, c.size() - 1);
  std::uniform_real_distribution<double> radius(0.01, 0.6);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x0 = static_cast<PointId>(pick(rng));
    const double delta = radius(rng);
    const Vec2 axis = unit_from_angle(angle(rng));
    const auto got = neighbors_in_ball(c, x0, delta, axis);
    std::vector<PointId> want;
    for (std::size_t i = 0; i < c.size(); ++i)
      if (i != x0 && norm(c.point(static_cast<PointId>(i)) - c.point(x0)) <= delta) want.push_back(static_cast<PointId>(i));
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t k = 0; k < want.size(); ++k) {
      EXPECT_EQ(got[k].id, want[k]);
      const Vec2 d = c.point(want[k]) - c.point(x0);
      EXPECT_NEAR(got[k].r, norm(d), 1e-14);
      const Vec2 back = unit_from_angle(std::atan2(axis.y, axis.x) + got[k].phi) * got[k].r;
      EXPECT_NEAR(norm(back - d), 0.0, 1e-12);
      EXPECT_GE(got[k].phi, 0.0);
      EXPECT_LT(got[k].phi, 2.0 * kPi);
    }
  }
}

TEST(Neighbors, NearBoundaryIncludesSamples) {
  const double h = 0.0625;
  const PointCloud c = build_point_cloud(Domain::half_disc(), h);
  const DirectionSet dirs = make_direction_set(h);
  PointId near = 0;
  double best = 1.0;
  for (std::size_t i = 0; i < c.interior_count(); ++i) {
    const double d = c.domain().distance_to_boundary(c.point(static_cast<PointId>(i)));
    if (d < best) best = d, near = static_cast<PointId>(i);
  }
  const auto nb = neighbors_in_ball(c, near, 2.0 * h / dirs.d_theta);
  const auto boundary = std::count_if(nb.begin(), nb.end(), [&](const Neighbor& n) { return c.is_boundary(n.id); });
  EXPECT_GT(boundary, 4);
}

TEST(SpatialIndex, NearestReportsTies) {
  const std::vector<Vec2> pts{{0, 0}, {1, 0}, {0.5, 1}};
  const std::vector<PointId> ids{0, 1, 2};
  const SpatialIndex idx(pts, ids, 0.3);
  const auto [d2, tied] = idx.nearest({0.5, 0.0});
  EXPECT_NEAR(d2, 0.25, 1e-15);
  EXPECT_EQ(tied, (std::vector<PointId>{0, 1}));
  EXPECT_EQ(idx.nearest({0.5, 0.9}).second, (std::vector<PointId>{2}));
  EXPECT_EQ(idx.nearest({5.0, 5.0}).second, (std::vector<PointId>{2}));
}
