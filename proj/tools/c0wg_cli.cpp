// Convergence-study driver for the biharmonic solvers.
//
//   c0wg_cli --method sfc0wg --k 1 --levels 5 --format csv --out table.csv
//   c0wg_cli --method sfc0wg,c0ip --k 1      (side-by-side comparison)

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "c0wg/c0wg.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Convergence studies for C0 weak Galerkin and C0 interior penalty biharmonic solvers"};
  std::string methods = "sfc0wg";
  int k = 0;
  int levels = 5;
  std::string mesh = c0wg::default_mesh_spec;
  double eta = 0.0;
  std::string solver = "direct";
  double tol = 1e-10;
  std::string format = "markdown";
  std::string out_path;

  app.add_option("--method", methods, "sfc0wg, c0wg or c0ip; a comma list runs a comparison")->capture_default_str();
  app.add_option("--k", k, "polynomial index k (0 or 1)")->capture_default_str();
  app.add_option("--levels", levels, "number of uniformly refined levels")->capture_default_str();
  app.add_option("--mesh", mesh, "initial mesh: structured:<n> or a mesh file")->capture_default_str();
  auto* eta_opt = app.add_option("--eta", eta, "C0IP penalty (default 2(k+2)^2)");
  app.add_option("--solver", solver, "direct or cg")->capture_default_str();
  app.add_option("--tol", tol, "CG relative residual tolerance")->capture_default_str();
  app.add_option("--format", format, "markdown or csv")->capture_default_str();
  app.add_option("--out", out_path, "write the table to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(c0wg::ErrorKind::config);
  }

  const auto names = split_list(methods);
  if (names.empty()) throw c0wg::Error(c0wg::ErrorKind::config, "no method given");
  std::vector<c0wg::RunConfig> cfgs;
  for (const auto& name : names) {
    c0wg::RunConfig cfg;
    cfg.method = c0wg::parse_method(name);
    cfg.k = k;
    cfg.levels = levels;
    cfg.mesh = mesh;
    if (eta_opt->count() > 0) cfg.eta = eta;
    cfg.solver = c0wg::parse_solver(solver);
    cfg.tol = tol;
    cfg.format = c0wg::parse_format(format);
    cfg.out = out_path;
    cfg.validate();
    cfgs.push_back(cfg);
  }

  const auto report = c0wg::run_comparison(cfgs);
  const std::string text = c0wg::emit_comparison(report, cfgs.front().format);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out || !(out << text)) {
      throw c0wg::Error(c0wg::ErrorKind::config, "cannot write '" + out_path + "'");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const c0wg::Error& e) {
    std::cerr << "c0wg_cli: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "c0wg_cli: " << e.what() << '\n';
    return 1;
  }
}
