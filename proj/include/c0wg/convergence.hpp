#pragma once

// Convergence studies on uniformly refined meshes for the manufactured
// solution u = sin(pi x) sin(pi y) on the unit square.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "c0wg/assemble.hpp"
#include "c0wg/errnorms.hpp"
#include "c0wg/errors.hpp"
#include "c0wg/mesh.hpp"
#include "c0wg/solve.hpp"
#include "c0wg/space.hpp"
#include "c0wg/weaklap.hpp"

namespace c0wg {

enum class OutputFormat { markdown, csv };

inline OutputFormat parse_format(const std::string& s) {
  if (s == "markdown" || s == "md") return OutputFormat::markdown;
  if (s == "csv") return OutputFormat::csv;
  throw Error(ErrorKind::config, "unknown output format '" + s + "'");
}

inline constexpr const char* default_mesh_spec = "structured:8";

struct RunConfig {
  Method method = Method::sfc0wg;
  int k = 0;
  int levels = 5;
  std::string mesh = default_mesh_spec;
  std::optional<double> eta;
  SolverKind solver = SolverKind::direct;
  double tol = 1e-10;
  OutputFormat format = OutputFormat::markdown;
  std::string out;

  double penalty() const { return eta.value_or(default_eta(k)); }

  void validate() const {
    if (k < 0 || k > 1) throw Error(ErrorKind::config, "k must be 0 or 1");
    if (levels < 1) throw Error(ErrorKind::config, "levels must be >= 1");
    if (mesh.empty()) throw Error(ErrorKind::config, "mesh spec is empty");
    if (eta && !(*eta > 0.0)) throw Error(ErrorKind::config, "eta must be positive");
    if (!(tol > 0.0)) throw Error(ErrorKind::config, "tol must be positive");
  }
};

struct ConvergenceRow {
  int level = 0;
  double h = 0.0;
  int n_dofs = 0;
  /// |||Q_h u - u_h||| for the weak Galerkin methods, ||u - u_h||_dg for C0IP.
  double err_tb = 0.0;
  double err_h1 = 0.0;
  double err_l2 = 0.0;
  std::optional<double> rate_tb, rate_h1, rate_l2;
  double t_asm = 0.0;
  double t_solve = 0.0;
  SolverStats solver;
};

struct ConvergenceTable {
  Method method = Method::sfc0wg;
  int k = 0;
  std::vector<ConvergenceRow> rows;
};

/// Observed order between consecutive rows: log(e_coarse/e_fine) / log(h_coarse/h_fine).
inline void fill_rates(ConvergenceTable& table) {
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    auto& fine = table.rows[i];
    const auto& coarse = table.rows[i - 1];
    const double dh = std::log(coarse.h / fine.h);
    const auto rate = [dh](double c, double f) -> std::optional<double> {
      if (!(c > 0.0) || !(f > 0.0) || !(dh > 0.0)) return std::nullopt;
      return std::log(c / f) / dh;
    };
    fine.rate_tb = rate(coarse.err_tb, fine.err_tb);
    fine.rate_h1 = rate(coarse.err_h1, fine.err_h1);
    fine.rate_l2 = rate(coarse.err_l2, fine.err_l2);
  }
}

/// Solve one level and measure the errors against `ex`.
inline ConvergenceRow solve_level(const RunConfig& cfg, const Mesh& mesh, const ExactSolution& ex) {
  using clock = std::chrono::steady_clock;
  ConvergenceRow row;
  row.h = mesh.h;
  const auto t0 = clock::now();
  const DofMap dm =
      build_dof_map(mesh, cfg.k, uses_edge_unknowns(cfg.method) ? EdgeUnknowns::include : EdgeUnknowns::exclude);
  const SparseSystem full = assemble(cfg.method, mesh, dm, ex.f, cfg.penalty());
  const SparseSystem sys = apply_bcs(full, dm, mesh, ex.boundary());
  row.t_asm = std::chrono::duration<double>(clock::now() - t0).count();
  const Solution sol = solve_spd(sys, cfg.solver, cfg.tol);
  row.t_solve = sol.stats.seconds;
  row.solver = sol.stats;
  row.n_dofs = dm.n_total;

  const L2H1Errors e = l2_h1_errors(sol.u, ex, mesh, dm);
  row.err_l2 = e.l2;
  row.err_h1 = e.h1_semi;
  if (cfg.method == Method::c0ip) {
    row.err_tb = dg_norm_error(sol.u, ex, mesh, dm);
  } else {
    FieldVector err = interpolate_Qh(ex, mesh, dm);
    err.values -= sol.u.values;
    if (cfg.method == Method::sfc0wg) {
      const auto lifts = all_weak_laplacians(mesh, dm, cfg.k + 3);
      row.err_tb = triple_bar_norm(err, dm, lifts);
    } else {
      row.err_tb = c0wg_energy_norm(err, mesh, dm);
    }
  }
  return row;
}

inline ConvergenceTable run_convergence(const RunConfig& cfg, const ExactSolution& ex) {
  cfg.validate();
  check_exact_solution(ex);
  ConvergenceTable table;
  table.method = cfg.method;
  table.k = cfg.k;
  Mesh mesh = mesh_from_spec(cfg.mesh);
  for (int level = 1; level <= cfg.levels; ++level) {
    try {
      if (level > 1) mesh = refine_uniform(mesh);
      ConvergenceRow row = solve_level(cfg, mesh, ex);
      row.level = level;
      table.rows.push_back(row);
    } catch (const Error& err) {
      throw Error(err.kind(), "level " + std::to_string(level) + ": " + err.what());
    }
  }
  fill_rates(table);
  return table;
}

inline ConvergenceTable run_convergence(const RunConfig& cfg) {
  return run_convergence(cfg, ExactSolution::sine_product());
}

namespace detail {

inline std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline std::string first_column_label(Method m) {
  return m == Method::c0ip ? "‖u−u_h‖_dg" : "|||Q_hu−u_h|||";
}

}  // namespace detail

/// Markdown has one header row plus the alignment row and one row per
/// level; CSV uses a fixed header.
inline std::string emit_table(const ConvergenceTable& t, OutputFormat format) {
  std::ostringstream os;
  const auto rate_md = [](const std::optional<double>& r) { return r ? detail::fmt("%.4f", *r) : std::string("--"); };
  const auto rate_csv = [](const std::optional<double>& r) { return r ? detail::fmt("%.10g", *r) : std::string(); };
  if (format == OutputFormat::csv) {
    os << "level,h,ndofs,err_tb,rate_tb,err_h1,rate_h1,err_l2,rate_l2,t_asm,t_solve\n";
    for (const auto& r : t.rows) {
      os << r.level << ',' << detail::fmt("%.17g", r.h) << ',' << r.n_dofs << ',' << detail::fmt("%.17g", r.err_tb)
         << ',' << rate_csv(r.rate_tb) << ',' << detail::fmt("%.17g", r.err_h1) << ',' << rate_csv(r.rate_h1) << ','
         << detail::fmt("%.17g", r.err_l2) << ',' << rate_csv(r.rate_l2) << ',' << detail::fmt("%.6f", r.t_asm) << ','
         << detail::fmt("%.6f", r.t_solve) << '\n';
    }
    return os.str();
  }
  const bool wg = t.method != Method::c0ip;
  os << "| level | h | ndofs | " << detail::first_column_label(t.method) << " | Rate | "
     << (wg ? "‖∇(u−u₀)‖" : "‖∇(u−u_h)‖") << " | Rate | " << (wg ? "‖u−u₀‖" : "‖u−u_h‖")
     << " | Rate | assemble (s) | solve (s) |\n";
  os << "|---:|---:|---:|---:|---:|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& r : t.rows) {
    os << "| " << r.level << " | " << detail::fmt("%.4e", r.h) << " | " << r.n_dofs << " | "
       << detail::fmt("%.2E", r.err_tb) << " | " << rate_md(r.rate_tb) << " | " << detail::fmt("%.2E", r.err_h1)
       << " | " << rate_md(r.rate_h1) << " | " << detail::fmt("%.2E", r.err_l2) << " | " << rate_md(r.rate_l2)
       << " | " << detail::fmt("%.6f", r.t_asm) << " | " << detail::fmt("%.6f", r.t_solve) << " |\n";
  }
  return os.str();
}

struct ComparisonReport {
  std::vector<ConvergenceTable> tables;
};

inline ComparisonReport run_comparison(const std::vector<RunConfig>& cfgs) {
  if (cfgs.empty()) throw Error(ErrorKind::config, "no configurations to compare");
  for (const auto& c : cfgs) {
    if (c.mesh != cfgs.front().mesh || c.levels != cfgs.front().levels) {
      throw Error(ErrorKind::config, "compared runs must share the mesh spec and the number of levels");
    }
  }
  ComparisonReport report;
  for (const auto& c : cfgs) report.tables.push_back(run_convergence(c));
  return report;
}

/// A single table prints exactly like emit_table; several tables print side
/// by side, one column group per run.
inline std::string emit_comparison(const ComparisonReport& report, OutputFormat format) {
  if (report.tables.size() == 1) return emit_table(report.tables.front(), format);
  std::ostringstream os;
  const auto tag = [](const ConvergenceTable& t) { return to_string(t.method) + "_k" + std::to_string(t.k); };
  const std::size_t nrows = report.tables.front().rows.size();
  if (format == OutputFormat::csv) {
    os << "level,h";
    for (const auto& t : report.tables) {
      const auto p = tag(t);
      os << ',' << p << "_ndofs," << p << "_err_tb," << p << "_err_h1," << p << "_err_l2," << p << "_t_asm," << p
         << "_t_solve";
    }
    os << '\n';
    for (std::size_t i = 0; i < nrows; ++i) {
      os << report.tables.front().rows[i].level << ',' << detail::fmt("%.17g", report.tables.front().rows[i].h);
      for (const auto& t : report.tables) {
        const auto& r = t.rows[i];
        os << ',' << r.n_dofs << ',' << detail::fmt("%.17g", r.err_tb) << ',' << detail::fmt("%.17g", r.err_h1) << ','
           << detail::fmt("%.17g", r.err_l2) << ',' << detail::fmt("%.6f", r.t_asm) << ','
           << detail::fmt("%.6f", r.t_solve);
      }
      os << '\n';
    }
    return os.str();
  }
  os << "Timings are wall-clock seconds on this machine and depend on the environment.\n\n";
  os << "| level | h |";
  for (const auto& t : report.tables) {
    const auto p = tag(t);
    os << ' ' << p << " ndofs | " << p << ' ' << detail::first_column_label(t.method) << " | " << p << " H1 | " << p
       << " L2 | " << p << " assemble (s) | " << p << " solve (s) |";
  }
  os << "\n|---:|---:|";
  for (std::size_t i = 0; i < report.tables.size(); ++i) os << "---:|---:|---:|---:|---:|---:|";
  os << '\n';
  for (std::size_t i = 0; i < nrows; ++i) {
    os << "| " << report.tables.front().rows[i].level << " | " << detail::fmt("%.4e", report.tables.front().rows[i].h)
       << " |";
    for (const auto& t : report.tables) {
      const auto& r = t.rows[i];
      os << ' ' << r.n_dofs << " | " << detail::fmt("%.2E", r.err_tb) << " | " << detail::fmt("%.2E", r.err_h1)
         << " | " << detail::fmt("%.2E", r.err_l2) << " | " << detail::fmt("%.6f", r.t_asm) << " | "
         << detail::fmt("%.6f", r.t_solve) << " |";
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace c0wg
