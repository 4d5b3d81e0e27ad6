#include <CLI11.hpp>
#include <iostream>
#include <random>

#include "lsr/parallel.hpp"
#include "lsr/report.hpp"

namespace {

using namespace lsr;

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--metric", cfg.metric, "builtin name or metric config file");
  cmd->add_option("--L", cfg.L, "harmonic degree cap");
  cmd->add_option("--degree", cfg.degree, "quadrature exactness degree");
  cmd->add_option("--tol-h", cfg.tol_H_factor, "H residual tolerance factor (tol = factor/lambda)");
  cmd->add_option("--tol-v", cfg.tol_V, "relative volume error bound");
  cmd->add_option("--max-iter", cfg.max_iter, "solver iteration cap");
  cmd->add_option("--n-radial", cfg.n_radial, "radial quadrature nodes per panel");
  cmd->add_option("--fd-step", cfg.fd_step, "relative FD step for xi-derivatives");
  cmd->add_option("--format", cfg.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", cfg.out_path, "output path (default stdout)");
  cmd->add_option("--seed", cfg.seed, "random seed");
  cmd->add_option("--threads", cfg.threads, "thread count (0 = hardware, 1 = serial)");
  cmd->add_flag("--dry-run", cfg.dry_run, "print resolved parameters and exit");
  cmd->add_flag("--plot", cfg.plot, "also write a gnuplot-ready <out>.dat");
}

SolveOptions solve_options(const RunConfig& cfg) {
  SolveOptions o;
  o.L = cfg.L;
  o.tol_H_factor = cfg.tol_H_factor;
  o.tol_V = cfg.tol_V;
  o.max_iter = cfg.max_iter;
  o.n_radial = cfg.n_radial;
  o.xi_fd_step = cfg.fd_step;
  return o;
}

ScanOptions scan_options(const RunConfig& cfg) {
  ScanOptions o;
  o.solve = solve_options(cfg);
  o.points_per_unit = cfg.points_per_unit;
  o.deriv_rel_step = cfg.fd_step;
  return o;
}

int emit(const Json& j, const RunConfig& cfg, int exit_code = 0) {
  write_report(j, cfg);
  return exit_code;
}

bool dry(const RunConfig& cfg) {
  if (!cfg.dry_run) return false;
  std::cout << canonical_serialize(cfg);
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace lsr;
  CLI::App app{"Lyapunov-Schmidt reduction toolkit for large CMC spheres in "
               "asymptotically Schwarzschild metrics"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* c_ident = app.add_subcommand("verify-identities",
                                     "check the ball/sphere moment identities");
  add_common(c_ident, cfg);

  auto* c_solve = app.add_subcommand("solve", "solve one volume-constrained graph");
  add_common(c_solve, cfg);
  std::vector<double> xi_in;
  c_solve->add_option("--xi", xi_in, "center parameter xi (x,y,z)")->delimiter(',');
  c_solve->add_option("--lambda", cfg.lambda, "volume radius parameter");

  auto* c_expand = app.add_subcommand("expand", "compare measured reduced area with the expansion");
  add_common(c_expand, cfg);
  c_expand->add_option("--xi", xi_in, "center parameter xi (x,y,z)")->delimiter(',');
  c_expand->add_option("--lambda", cfg.lambda, "volume radius parameter");

  auto* c_radial = app.add_subcommand("radial-identity",
                                      "exact radial-variation identity on random sigma fields");
  add_common(c_radial, cfg);

  auto* c_fit = app.add_subcommand("fit-coefficient",
                                   "least-squares fit of the reduced-area coefficients");
  add_common(c_fit, cfg);
  c_fit->add_option("--xis", cfg.xis, "|xi| sample values")->delimiter(',');
  c_fit->add_option("--lambdas", cfg.lambdas, "lambda schedule")->delimiter(',');

  auto* c_13 = app.add_subcommand("thm13", "pulsed order-4 metric: locate the stable sphere");
  add_common(c_13, cfg);
  c_13->add_option("--j", cfg.j, "lambda = 10^j");
  c_13->add_option("--A", cfg.A, "pulse amplitude (omit for doubling search)");
  c_13->add_option("--points-per-unit", cfg.points_per_unit, "scan granularity");

  auto* c_17 = app.add_subcommand("thm17", "pulsed order-5 metric: locate the stable sphere");
  add_common(c_17, cfg);
  c_17->add_option("--k", cfg.k, "lambda = 10^k, |xi| = 10^k t");
  c_17->add_option("--points-per-unit", cfg.points_per_unit, "scan granularity");

  auto* c_scan = app.add_subcommand("scan", "radial scan of the reduced functional");
  add_common(c_scan, cfg);
  c_scan->add_option("--lambda", cfg.lambda, "volume radius parameter");
  c_scan->add_option("--t-min", cfg.t_min, "scan start");
  c_scan->add_option("--t-max", cfg.t_max, "scan end");
  c_scan->add_option("--points-per-unit", cfg.points_per_unit, "scan granularity");

  auto* c_16 = app.add_subcommand("cor16", "radial-convexity diagnostics");
  add_common(c_16, cfg);
  c_16->add_option("--xi", xi_in, "center parameter xi (x,y,z)")->delimiter(',');
  c_16->add_option("--lambda", cfg.lambda, "volume radius parameter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (xi_in.size() == 3) {
    cfg.xi_x = xi_in[0];
    cfg.xi_y = xi_in[1];
    cfg.xi_z = xi_in[2];
  } else if (!xi_in.empty()) {
    std::cerr << "--xi needs exactly three components\n";
    return 2;
  }
  set_threads(cfg.threads);
  Vec3 xi{cfg.xi_x, cfg.xi_y, cfg.xi_z};

  try {
    if (app.got_subcommand(c_ident)) {
      cfg.subcommand = "verify-identities";
      if (dry(cfg)) return 0;
      IdentityReport rep = verify_moment_identities(cfg.degree, cfg.seed);
      return emit(to_json(rep), cfg, rep.max_rel_error <= 1e-12 ? 0 : 1);
    }
    if (app.got_subcommand(c_solve)) {
      cfg.subcommand = "solve";
      if (dry(cfg)) return 0;
      MetricSpec spec = resolve_metric(cfg.metric);
      LSSolution sol = solve_graph(spec, xi, cfg.lambda, solve_options(cfg));
      return emit(to_json(sol), cfg);
    }
    if (app.got_subcommand(c_expand)) {
      cfg.subcommand = "expand";
      if (dry(cfg)) return 0;
      MetricSpec spec = resolve_metric(cfg.metric);
      ExpansionReport rep =
          predict_lsreduction(spec, xi, cfg.lambda, {}, solve_options(cfg));
      return emit(to_json(rep), cfg);
    }
    if (app.got_subcommand(c_radial)) {
      cfg.subcommand = "radial-identity";
      if (dry(cfg)) return 0;
      auto trials = radial_identity_check(cfg.seed, 5,
                                          {{2.0, 20.0}, {3.0, 50.0}}, cfg.degree + 16);
      Json j;
      j["schema_version"] = kSchemaVersion;
      j["report"] = "radial-identity";
      Json rows = Json::array();
      bool ok = true;
      for (const auto& t : trials) {
        rows.push_back({{"xi", t.xi_norm},
                        {"lambda", t.lambda},
                        {"fd", t.fd},
                        {"rhs", t.rhs},
                        {"abs_diff", t.abs_diff},
                        {"tolerance", t.tolerance}});
        ok = ok && t.abs_diff <= t.tolerance;
      }
      j["trials"] = rows;
      j["pass"] = ok;
      return emit(j, cfg, ok ? 0 : 1);
    }
    if (app.got_subcommand(c_fit)) {
      cfg.subcommand = "fit-coefficient";
      if (dry(cfg)) return 0;
      MetricSpec spec = resolve_metric(cfg.metric);
      BEFitResult res =
          fit_BE_coefficient(spec, cfg.xis, cfg.lambdas, solve_options(cfg));
      return emit(to_json(res), cfg);
    }
    if (app.got_subcommand(c_13)) {
      cfg.subcommand = "thm13";
      if (dry(cfg)) return 0;
      ScanResult res = run_thm13(cfg.A, cfg.j, scan_options(cfg));
      if (cfg.plot)
        write_plot_dat(res, (cfg.out_path.empty() ? "thm13" : cfg.out_path) + ".dat");
      return emit(to_json(res), cfg,
                  res.verdict == "stable critical point located" ? 0 : 1);
    }
    if (app.got_subcommand(c_17)) {
      cfg.subcommand = "thm17";
      if (dry(cfg)) return 0;
      ScanResult res = run_thm17(cfg.k, scan_options(cfg));
      if (cfg.plot)
        write_plot_dat(res, (cfg.out_path.empty() ? "thm17" : cfg.out_path) + ".dat");
      return emit(to_json(res), cfg,
                  res.verdict == "stable critical point located" ? 0 : 1);
    }
    if (app.got_subcommand(c_scan)) {
      cfg.subcommand = "scan";
      if (dry(cfg)) return 0;
      MetricSpec spec = resolve_metric(cfg.metric);
      int n = std::max(2, static_cast<int>(cfg.points_per_unit *
                                           (cfg.t_max - cfg.t_min)) + 1);
      ScanResult res =
          scan_radial(spec, cfg.lambda, cfg.t_min, cfg.t_max, n, scan_options(cfg));
      if (cfg.plot)
        write_plot_dat(res, (cfg.out_path.empty() ? "scan" : cfg.out_path) + ".dat");
      return emit(to_json(res), cfg);
    }
    if (app.got_subcommand(c_16)) {
      cfg.subcommand = "cor16";
      if (dry(cfg)) return 0;
      MetricSpec spec = resolve_metric(cfg.metric);
      Cor16Report rep = corollary16_diagnostics(spec, xi, cfg.lambda);
      return emit(to_json(rep), cfg);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
