#pragma once

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gausscurve/gausscurve.hpp"

namespace gausscurve::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kSolverFailure = 1, kConfigError = 2 };

struct ProblemOptions {
  std::string example;
  std::string kappa;
  std::string g;
  std::string domain = "half-disc";
};

struct CommonOptions {
  ProblemOptions problem;
  std::string h = "2^-3";
  std::optional<double> tol;
  std::size_t max_iters = 2'000'000;
  std::size_t log_every = 1000;
  std::string out = "out";
  bool force = false;
  double interior_band = 0.2;
  std::optional<std::size_t> dump_stencil;
};

struct OneDOptions {
  std::string kappa = "1";
  double x_lo = 0.0, x_hi = 1.0, g_lo = -1.0, g_hi = 1.0;
  std::string h = "2^-6";
  std::optional<double> tol;
  std::size_t max_iters = 10'000'000;
  std::string out = "out";
};

/// A problem resolved from flags: either a built-in example (with its exact
/// solution) or expressions for κ and g on a named domain.
struct ResolvedProblem {
  ProblemSpec spec;
  std::optional<ExactSolution> exact;
  std::string kappa_source, g_source;
};

inline Domain domain_by_name(const std::string& name) {
  if (name == "half-disc") return Domain::half_disc();
  if (name == "full-disc") return Domain::unit_disc();
  throw Error(ErrorKind::InvalidArgument, "unknown domain '" + name + "' (expected half-disc or full-disc)");
}

inline ResolvedProblem resolve_problem(const ProblemOptions& opt) {
  if (!opt.example.empty()) {
    if (!opt.kappa.empty() || !opt.g.empty())
      throw Error(ErrorKind::InvalidArgument, "--example cannot be combined with --kappa/--g");
    auto ex = find_example(opt.example);
    if (!ex) throw Error(ErrorKind::InvalidArgument, "unknown example '" + opt.example + "' (lipschitz, ball, noncts)");
    const std::string source = "builtin:" + opt.example;
    ProblemSpec spec = ex->problem();
    return {std::move(spec), std::move(ex), source, source};
  }
  const std::string kappa_source = opt.kappa.empty() ? "0" : opt.kappa;
  const std::string g_source = opt.g.empty() ? "0" : opt.g;
  const Expression kappa(kappa_source), g(g_source);
  return {{domain_by_name(opt.domain), [kappa](Vec2 p) { return kappa(p); }, [g](Vec2 p) { return g(p); }},
          std::nullopt,
          kappa_source,
          g_source};
}

/// Rejects non-finite κ/g samples and negative κ before any solve starts.
inline void check_samples(const ProblemSpec& spec, const PointCloud& cloud) {
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto id = static_cast<PointId>(i);
    const Vec2 p = cloud.point(id);
    std::ostringstream where;
    where << " at (" << p.x << ", " << p.y << ")";
    if (cloud.is_boundary(id)) {
      if (!std::isfinite(spec.g(p))) throw Error(ErrorKind::Parse, "g is not finite" + where.str());
    } else {
      const double k = spec.kappa(p);
      if (!std::isfinite(k)) throw Error(ErrorKind::Parse, "kappa is not finite" + where.str());
      if (k < 0.0) throw Error(ErrorKind::InvalidArgument, "kappa is negative" + where.str());
    }
  }
}

inline nlohmann::json cloud_json(const PointCloud& cloud) {
  return {{"h", cloud.h()},
          {"interior_points", cloud.interior_count()},
          {"boundary_points", cloud.boundary_count()},
          {"h_boundary", cloud.h_boundary()},
          {"boundary_constant", cloud.boundary_constant()}};
}

inline nlohmann::json directions_json(const DirectionSet& d) {
  return {{"pairs", d.pairs}, {"d_theta", d.d_theta}, {"delta", d.delta}};
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(int argc, const char* const* argv) {
    CLI::App app{"Prescribed Gaussian curvature solver on point clouds", "gausscurve"};
    app.set_config("--config", "", "TOML file with option values; flags override it");
    app.require_subcommand(1);
    app.set_help_flag("--help", "Print this help message and exit");
    app.set_version_flag("--version", kVersion);

    CommonOptions solve_opt, study_opt, validate_opt;
    OneDOptions oned_opt;
    auto* solve = app.add_subcommand("solve", "Solve one problem at one spacing");
    add_problem_flags(*solve, solve_opt, false);
    auto* study = app.add_subcommand("study", "Convergence study over a list of spacings");
    add_problem_flags(*study, study_opt, true);
    auto* validate = app.add_subcommand("validate", "Check the data hypotheses and constructability");
    add_problem_flags(*validate, validate_opt, false);
    auto* solve1d = app.add_subcommand("solve1d", "One-dimensional reference solver");
    solve1d->add_option("--kappa", oned_opt.kappa, "Curvature expression in x")->capture_default_str();
    solve1d->add_option("--x-lo", oned_opt.x_lo)->capture_default_str();
    solve1d->add_option("--x-hi", oned_opt.x_hi)->capture_default_str();
    solve1d->add_option("--g-lo", oned_opt.g_lo)->capture_default_str();
    solve1d->add_option("--g-hi", oned_opt.g_hi)->capture_default_str();
    solve1d->add_option("--h", oned_opt.h, "Spacing, e.g. 2^-8")->capture_default_str();
    solve1d->add_option("--tol", oned_opt.tol, "Residual tolerance (default 1e-8/h^2)");
    solve1d->add_option("--max-iters", oned_opt.max_iters)->capture_default_str();
    solve1d->add_option("--out", oned_opt.out, "Output directory")->capture_default_str();

    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    std::vector<std::string> argv_record(argv, argv + argc);
    try {
      app.parse(args);
    } catch (const CLI::CallForHelp&) {
      out_ << app.help();
      return kOk;
    } catch (const CLI::CallForAllHelp&) {
      out_ << app.help("", CLI::AppFormatMode::All);
      return kOk;
    } catch (const CLI::CallForVersion&) {
      out_ << kVersion << '\n';
      return kOk;
    } catch (const CLI::ParseError& e) {
      err_ << "error: " << e.what() << '\n';
      return kConfigError;
    }

    try {
      if (solve->parsed()) return cmd_solve(solve_opt, argv_record);
      if (study->parsed()) return cmd_study(study_opt, argv_record);
      if (validate->parsed()) return cmd_validate(validate_opt);
      return cmd_solve1d(oned_opt, argv_record);
    } catch (const Error& e) {
      err_ << "error: " << e.what() << '\n';
      switch (e.kind()) {
        case ErrorKind::Parse:
        case ErrorKind::InvalidArgument:
        case ErrorKind::DegenerateCloud:
          return kConfigError;
        default:
          return kSolverFailure;
      }
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << '\n';
      return kSolverFailure;
    }
  }

 private:
  static void add_problem_flags(CLI::App& cmd, CommonOptions& o, bool h_list) {
    cmd.add_option("--example", o.problem.example, "Built-in example: lipschitz, ball, noncts");
    cmd.add_option("--kappa", o.problem.kappa, "Curvature expression in x, y");
    cmd.add_option("--g", o.problem.g, "Boundary data expression in x, y");
    cmd.add_option("--domain", o.problem.domain, "half-disc or full-disc")->capture_default_str();
    cmd.add_option("--h", o.h, h_list ? "Comma-separated spacings, e.g. 2^-3,2^-4" : "Spacing, e.g. 2^-3 or 0.125")
        ->capture_default_str();
    cmd.add_option("--tol", o.tol, "Residual tolerance (default 1e-8/h^2)");
    cmd.add_option("--max-iters", o.max_iters)->capture_default_str();
    cmd.add_option("--log-every", o.log_every, "Iterations between log lines")->capture_default_str();
    cmd.add_option("--out", o.out, "Output directory")->capture_default_str();
    cmd.add_flag("--force", o.force, "Proceed when the compatibility condition is not strict");
    cmd.add_option("--interior-band", o.interior_band, "Band width excluded from the interior error norm")
        ->capture_default_str();
    cmd.add_option("--dump-stencil", o.dump_stencil, "Write the stencils of this interior point id as JSON");
  }

  static std::filesystem::path prepare_out(const std::string& dir) {
    std::filesystem::path p(dir);
    std::filesystem::create_directories(p);
    return p;
  }

  /// Returns false when the run must stop for lack of strict compatibility.
  bool gate_compatibility(const Compatibility& c, bool force) {
    if (c.ok) return true;
    err_ << "warning: compatibility non-strict: integral of kappa = " << c.lhs << " is not below pi = " << c.rhs
         << " by the required margin\n";
    if (force) {
      err_ << "warning: continuing because of --force\n";
      return true;
    }
    err_ << "error: rerun with --force to proceed\n";
    return false;
  }

  SolverConfig solver_config(const CommonOptions& o, double h) const {
    SolverConfig cfg = SolverConfig::for_spacing(h);
    if (o.tol) cfg.tol = *o.tol;
    cfg.max_iters = o.max_iters;
    cfg.log_every = o.log_every;
    cfg.validate();
    return cfg;
  }

  int cmd_solve(const CommonOptions& o, const std::vector<std::string>& argv) {
    const double h = parse_spacing(o.h);
    if (!(o.interior_band >= 0.0)) throw Error(ErrorKind::InvalidArgument, "--interior-band must be non-negative");
    const ResolvedProblem prob = resolve_problem(o.problem);
    const SolverConfig cfg = solver_config(o, h);
    const Compatibility compat = check_compatibility(prob.spec);
    if (!gate_compatibility(compat, o.force)) return kConfigError;

    const PointCloud cloud = build_point_cloud(prob.spec.domain, h);
    check_samples(prob.spec, cloud);
    const StencilTable table = build_stencil_table(cloud, make_direction_set(h));
    if (o.dump_stencil && *o.dump_stencil >= cloud.interior_count())
      throw Error(ErrorKind::InvalidArgument, "--dump-stencil id is not an interior point");
    const Scheme scheme(prob.spec, cloud, table);
    const SolveResult res = solve(scheme, cfg);

    const auto dir = prepare_out(o.out);
    std::vector<std::string> files{"solution.csv", "residual.csv", "iterations.log", "manifest.json"};
    write_file((dir / "solution.csv").string(), [&](std::ostream& os) { write_solution_csv(os, cloud, res.u); });
    write_file((dir / "residual.csv").string(),
               [&](std::ostream& os) { write_grid_function_csv(os, cloud, scheme.residual(res.u)); });
    write_file((dir / "iterations.log").string(), [&](std::ostream& os) { write_iteration_log(os, res.report); });
    if (o.dump_stencil) {
      const std::string name = "stencil_" + std::to_string(*o.dump_stencil) + ".json";
      files.push_back(name);
      write_file((dir / name).string(), [&](std::ostream& os) {
        os << point_stencils_to_json(cloud, table, static_cast<PointId>(*o.dump_stencil)).dump(2) << '\n';
      });
    }

    nlohmann::json m = manifest_header("solve", argv);
    m["inputs"] = {{"example", o.problem.example},
                   {"kappa", prob.kappa_source},
                   {"g", prob.g_source},
                   {"domain", prob.spec.domain.name()},
                   {"h", h},
                   {"tol", cfg.tol},
                   {"max_iters", cfg.max_iters},
                   {"dt_safety", cfg.dt_safety},
                   {"interior_band", o.interior_band},
                   {"force", o.force}};
    m["compatibility"] = {{"lhs", compat.lhs}, {"rhs", compat.rhs}, {"ok", compat.ok}};
    m["cloud"] = cloud_json(cloud);
    m["directions"] = directions_json(table.directions());
    m["stencils"] = {{"negative_weights", table.negative_weights()}, {"build_seconds", table.build_seconds()}};
    m["report"] = report_to_json(res.report);
    if (prob.exact) {
      files.push_back("errors.csv");
      write_file((dir / "errors.csv").string(),
                 [&](std::ostream& os) { write_error_dump_csv(os, cloud, res.u, *prob.exact); });
      m["errors"] = {{"sup", error_sup(cloud, res.u, *prob.exact)},
                     {"l1", error_l1(cloud, res.u, *prob.exact)},
                     {"interior_sup", error_sup_interior(cloud, res.u, *prob.exact, o.interior_band)}};
    }
    m["files"] = files;
    write_file((dir / "manifest.json").string(), [&](std::ostream& os) { os << m.dump(2) << '\n'; });

    out_ << "points " << cloud.size() << " (" << cloud.interior_count() << " interior), directions "
         << table.directions().size() << ", iterations " << res.report.iterations << ", residual "
         << res.report.final_residual << ", " << res.report.wall_seconds << " s\n";
    if (m.contains("errors"))
      out_ << "sup error " << m["errors"]["sup"].get<double>() << ", L1 error " << m["errors"]["l1"].get<double>()
           << ", interior sup error " << m["errors"]["interior_sup"].get<double>() << '\n';
    if (!res.report.converged) {
      err_ << "error: " << res.report.message << '\n';
      return kSolverFailure;
    }
    return kOk;
  }

  int cmd_study(const CommonOptions& o, const std::vector<std::string>& argv) {
    if (o.problem.example.empty()) throw Error(ErrorKind::InvalidArgument, "study needs --example");
    const std::vector<double> hs = parse_spacing_list(o.h);
    if (hs.empty()) throw Error(ErrorKind::InvalidArgument, "empty h list");
    const ResolvedProblem prob = resolve_problem(o.problem);
    StudyOptions sopt;
    sopt.tol = o.tol;
    sopt.max_iters = o.max_iters;
    sopt.interior_band = o.interior_band;
    const ErrorTable t = convergence_study(*prob.exact, hs, sopt);

    const auto dir = prepare_out(o.out);
    write_file((dir / "error_table.csv").string(), [&](std::ostream& os) { write_error_table_csv(os, t); });
    write_file((dir / "error_table.txt").string(), [&](std::ostream& os) { write_error_table_text(os, t); });
    nlohmann::json m = manifest_header("study", argv);
    m["inputs"] = {{"example", o.problem.example}, {"h", hs}, {"max_iters", o.max_iters}, {"interior_band", o.interior_band}};
    if (o.tol) m["inputs"]["tol"] = *o.tol;
    m["table"] = error_table_to_json(t);
    m["files"] = {"error_table.csv", "error_table.txt", "manifest.json"};
    write_file((dir / "manifest.json").string(), [&](std::ostream& os) { os << m.dump(2) << '\n'; });
    write_error_table_text(out_, t);
    for (const auto& r : t.rows)
      if (!r.converged) err_ << "row h=" << format_h(r.h) << ": " << r.message << '\n';
    return t.all_converged() ? kOk : kSolverFailure;
  }

  int cmd_validate(const CommonOptions& o) {
    const double h = parse_spacing(o.h);
    const ResolvedProblem prob = resolve_problem(o.problem);
    std::vector<std::string> failures;
    auto report = [&](const std::string& tag, bool ok, const std::string& detail) {
      out_ << (ok ? "pass " : "FAIL ") << tag << ": " << detail << '\n';
      if (!ok) failures.push_back(tag);
    };

    const Domain& dom = prob.spec.domain;
    bool bounded = true;
    for (int k = 0; k < 1000; ++k) bounded = bounded && dom.bbox().contains(dom.boundary_point(k / 1000.0));
    report("H1", bounded, "domain " + dom.name() + " is convex and bounded");

    const BBox& box = dom.bbox();
    const std::size_t n = 400;
    bool g_finite = true;
    for (std::size_t k = 0; k < 4 * n; ++k) g_finite = g_finite && std::isfinite(prob.spec.g(dom.boundary_point(k / (4.0 * n))));
    report("H2", g_finite, "boundary data finite on boundary samples");

    double kappa_min = std::numeric_limits<double>::infinity();
    bool kappa_finite = true;
    for (std::size_t j = 0; j <= n; ++j) {
      for (std::size_t i = 0; i <= n; ++i) {
        const Vec2 p{box.lo.x + (box.hi.x - box.lo.x) * i / n, box.lo.y + (box.hi.y - box.lo.y) * j / n};
        if (!dom.contains(p)) continue;
        const double k = prob.spec.kappa(p);
        kappa_finite = kappa_finite && std::isfinite(k);
        kappa_min = std::min(kappa_min, k);
      }
    }
    std::ostringstream kd;
    kd << "kappa finite and non-negative on samples (min " << kappa_min << ")";
    report("H3", kappa_finite && kappa_min >= 0.0, kd.str());

    const Compatibility c = check_compatibility(prob.spec);
    std::ostringstream cd;
    cd << "integral of kappa " << c.lhs << " < pi = " << c.rhs << " (1% margin)";
    report("H4", c.ok, cd.str());

    std::string detail = "cloud and stencils at h = " + format_h(h);
    bool built = true;
    try {
      const PointCloud cloud = build_point_cloud(dom, h);
      const StencilTable table = build_stencil_table(cloud, make_direction_set(h));
      std::ostringstream d;
      d << detail << ": " << cloud.interior_count() << " interior, " << cloud.boundary_count() << " boundary, "
        << table.negative_weights() << " negative weights";
      detail = d.str();
    } catch (const Error& e) {
      built = false;
      detail += ": " + std::string(e.what());
    }
    report("constructability", built, detail);
    return failures.empty() ? kOk : kSolverFailure;
  }

  int cmd_solve1d(const OneDOptions& o, const std::vector<std::string>& argv) {
    const Expression kappa_expr(o.kappa);
    Problem1D p;
    p.x_lo = o.x_lo;
    p.x_hi = o.x_hi;
    p.g_lo = o.g_lo;
    p.g_hi = o.g_hi;
    p.h = parse_spacing(o.h);
    p.kappa = [kappa_expr](double x) { return kappa_expr(x, 0.0); };
    const std::size_t cells = p.intervals();
    for (std::size_t i = 0; i <= cells; ++i) {
      const double k = p.kappa(p.x(i));
      if (!std::isfinite(k) || k < 0.0) throw Error(ErrorKind::InvalidArgument, "kappa must be finite and non-negative");
    }
    const Compatibility1D compat = check_compatibility_1d(p);
    if (!compat.ok) err_ << "warning: integral of kappa " << compat.lhs << " is not below 2\n";
    SolverConfig cfg = SolverConfig::for_spacing(p.h);
    if (o.tol) cfg.tol = *o.tol;
    cfg.max_iters = o.max_iters;
    const Solution1D s = solve_1d(p, cfg);

    const auto dir = prepare_out(o.out);
    write_file((dir / "solution1d.csv").string(), [&](std::ostream& os) { write_solution_1d_csv(os, s); });
    nlohmann::json m = manifest_header("solve1d", argv);
    m["inputs"] = {{"kappa", o.kappa}, {"x_lo", p.x_lo}, {"x_hi", p.x_hi}, {"g_lo", p.g_lo},
                   {"g_hi", p.g_hi}, {"h", p.h}, {"tol", cfg.tol}, {"max_iters", cfg.max_iters}};
    m["compatibility"] = {{"lhs", compat.lhs}, {"rhs", compat.rhs}, {"ok", compat.ok}};
    m["report"] = report_to_json(s.report);
    m["files"] = {"solution1d.csv", "manifest.json"};
    write_file((dir / "manifest.json").string(), [&](std::ostream& os) { os << m.dump(2) << '\n'; });
    out_ << "nodes " << s.x.size() << ", iterations " << s.report.iterations << ", residual "
         << s.report.final_residual << ", " << s.report.wall_seconds << " s\n";
    if (!s.report.converged) {
      err_ << "error: " << s.report.message << '\n';
      return kSolverFailure;
    }
    return kOk;
  }

  static nlohmann::json manifest_header(const std::string& command, const std::vector<std::string>& argv) {
    return {{"tool", "gausscurve"},
            {"version", kVersion},
            {"command", command},
            {"argv", argv},
            {"threads", worker_count()},
            {"compiler", __VERSION__},
            {"cplusplus", __cplusplus}};
  }

  std::ostream& out_;
  std::ostream& err_;
};

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return Runner(out, err).run(argc, argv);
}

}  // namespace gausscurve::cli
