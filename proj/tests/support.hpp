#pragma once

#include <array>
#include <cmath>
#include <random>

#include "gausscurve/gausscurve.hpp"

namespace gctest {

using namespace gausscurve;

/// Four neighbours, one strictly inside each quadrant, at radii in [0.2, 1]·scale.
inline std::array<LocalCoord, 4> random_quadrant_config(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> angle(0.02, 0.5 * kPi - 0.02);
  std::uniform_real_distribution<double> radius(0.2, 1.0);
  std::array<LocalCoord, 4> q{};
  for (std::size_t j = 0; j < 4; ++j) {
    const double phi = 0.5 * kPi * static_cast<double>(j) + angle(rng);
    q[j] = to_local({scale * radius(rng), phi});
  }
  return q;
}

/// The cloud, stencils and scheme for one problem, kept together so that
/// references stay valid.
struct Rig {
  PointCloud cloud;
  StencilTable table;
  ProblemSpec spec;
  Scheme scheme;

  Rig(ProblemSpec s, double h)
      : cloud(build_point_cloud(s.domain, h)),
        table(build_stencil_table(cloud, make_direction_set(h))),
        spec(std::move(s)),
        scheme(spec, cloud, table) {}
};

inline ProblemSpec half_disc_problem(ScalarField kappa, ScalarField g) {
  return {Domain::half_disc(), std::move(kappa), std::move(g)};
}

inline double max_abs(const GridFunction& f) { return sup_norm(f); }

}  // namespace gctest
