#pragma once

#include <fstream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "gausscurve/analysis.hpp"
#include "gausscurve/operator.hpp"
#include "gausscurve/solver.hpp"
#include "gausscurve/stencil.hpp"

namespace gausscurve {

inline void write_grid_function_csv(std::ostream& os, const PointCloud& cloud, const GridFunction& u) {
  os << "id,x,y,value\n";
  os.precision(17);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec2 p = cloud.point(static_cast<PointId>(i));
    os << i << ',' << p.x << ',' << p.y << ',' << u[i] << '\n';
  }
}

inline void write_solution_csv(std::ostream& os, const PointCloud& cloud, const GridFunction& u) {
  os << "id,x,y,u,is_boundary\n";
  os.precision(17);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto id = static_cast<PointId>(i);
    const Vec2 p = cloud.point(id);
    os << i << ',' << p.x << ',' << p.y << ',' << u[i] << ',' << (cloud.is_boundary(id) ? 1 : 0) << '\n';
  }
}

inline void write_error_dump_csv(std::ostream& os, const PointCloud& cloud, const GridFunction& u, const ExactSolution& ex) {
  os << "id,x,y,u,u_exact,error\n";
  os.precision(17);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec2 p = cloud.point(static_cast<PointId>(i));
    const double e = ex.u_exact(p);
    os << i << ',' << p.x << ',' << p.y << ',' << u[i] << ',' << e << ',' << std::abs(u[i] - e) << '\n';
  }
}

/// One line per log entry: "iter residual_sup dt".
inline void write_iteration_log(std::ostream& os, const SolveReport& rep) {
  os.precision(10);
  for (const auto& e : rep.log) os << e.iter << ' ' << e.residual_sup << ' ' << e.dt << '\n';
}

inline nlohmann::json stencil_to_json(const DirectionalStencil& s) {
  nlohmann::json j;
  j["nu"] = {s.nu.x, s.nu.y};
  j["aligned"] = s.aligned;
  for (std::size_t k = 0; k < 4; ++k) {
    j["neighbors"].push_back({{"id", s.ids[k]},
                              {"c", s.local[k].c},
                              {"s", s.local[k].s},
                              {"a", s.a[k]}});
  }
  j["b"] = {s.b.b1, s.b.b2, s.b.b3, s.b.b4};
  return j;
}

/// Stencils of one interior point, directions first, then the e₁ and e₂ gradient stencils.
inline nlohmann::json point_stencils_to_json(const PointCloud& cloud, const StencilTable& table, PointId p) {
  nlohmann::json j;
  const Vec2 x = cloud.point(p);
  j["id"] = p;
  j["x"] = {x.x, x.y};
  for (std::size_t k = 0; k < table.per_point(); ++k) j["stencils"].push_back(stencil_to_json(table.all()[p * table.per_point() + k]));
  return j;
}

inline nlohmann::json report_to_json(const SolveReport& r) {
  return {{"iterations", r.iterations},
          {"initial_residual", r.initial_residual},
          {"final_residual", r.final_residual},
          {"dt_min", r.dt_min},
          {"dt_max", r.dt_max},
          {"wall_seconds", r.wall_seconds},
          {"converged", r.converged},
          {"message", r.message},
          {"max_abs_u", r.max_abs_u},
          {"min_u", r.min_u},
          {"below_initializer", r.below_initializer}};
}

inline nlohmann::json error_table_to_json(const ErrorTable& t) {
  nlohmann::json j;
  j["example"] = t.example;
  j["interior_band"] = t.interior_band;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : t.rows) {
    j["rows"].push_back({{"h", r.h},
                         {"sup_error", r.sup_error},
                         {"l1_error", r.l1_error},
                         {"interior_sup_error", r.interior_sup_error},
                         {"iterations", r.iterations},
                         {"wall_seconds", r.wall_seconds},
                         {"final_residual", r.final_residual},
                         {"converged", r.converged},
                         {"message", r.message}});
  }
  return j;
}

template <class Writer>
void write_file(const std::string& path, Writer&& write) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::InvalidArgument, "cannot open " + path + " for writing");
  write(os);
  if (!os) throw Error(ErrorKind::InvalidArgument, "write failed: " + path);
}

}  // namespace gausscurve
