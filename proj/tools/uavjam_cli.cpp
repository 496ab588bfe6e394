// uavjam: solve, sweep, compare and plot from the command line.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uavjam/uavjam.hpp"

namespace fs = std::filesystem;
using namespace uavjam;

namespace {

struct Overrides {
  AdmmConfig admm;
  BcdConfig bcd;
  std::string clip = "rescale";
  bool no_timing = false;

  void add_to(CLI::App* app) {
    app->add_option("--rho1", admm.rho1, "penalty on UAV-target consensus")->capture_default_str();
    app->add_option("--rho2", admm.rho2, "penalty on UAV-UAV consensus")->capture_default_str();
    app->add_option("--eta", admm.eta, "stop when the primal residual is at most this")->capture_default_str();
    app->add_option("--omega-chi", admm.omega_chi, "multiplier bound (targets)")->capture_default_str();
    app->add_option("--omega-mu", admm.omega_mu, "multiplier bound (UAV pairs)")->capture_default_str();
    app->add_option("--max-outer-iters", admm.max_outer_iters)->capture_default_str();
    app->add_option("--psi-starts", admm.psi_starts, "common-heading starts for the azimuth step")
        ->capture_default_str();
    app->add_option("--psi-step", admm.psi_step, "largest azimuth move per descent step (rad)")->capture_default_str();
    app->add_option("--psi-iters", admm.psi_iters)->capture_default_str();
    app->add_option("--clip", clip, "multiplier bounding: rescale or clamp")
        ->check(CLI::IsMember({"rescale", "clamp"}))
        ->capture_default_str();
    app->add_option("--feasibility-rel-tol", admm.feasibility_rel_tol)->capture_default_str();
    app->add_option("--beta-nag", admm.gradproj.beta_nag)->capture_default_str();
    app->add_option("--rho-rms", admm.gradproj.rho_rms)->capture_default_str();
    app->add_option("--eps-rms", admm.gradproj.eps_rms)->capture_default_str();
    app->add_option("--alpha-nag", admm.gradproj.alpha_nag)->capture_default_str();
    app->add_option("--alpha-search", admm.gradproj.alpha_search)->capture_default_str();
    app->add_option("--inner-max-iters", admm.gradproj.max_iters)->capture_default_str();
    app->add_option("--inner-tol", admm.gradproj.tol)->capture_default_str();
    app->add_option("--inner-patience", admm.gradproj.patience)->capture_default_str();
    app->add_option("--inner-step-tol", admm.gradproj.step_tol)->capture_default_str();
    app->add_option("--bcd-max-rounds", bcd.max_rounds)->capture_default_str();
    app->add_option("--bcd-angle-grid", bcd.angle_grid)->capture_default_str();
    app->add_option("--bcd-position-step", bcd.position_step)->capture_default_str();
    app->add_flag("--no-timing", no_timing, "write 0 for wall-clock fields (byte-stable output)");
  }

  void finish() {
    admm.clip = clip == "clamp" ? MultiplierClip::ClampAtBound : MultiplierClip::RescaleByMax;
    if (auto v = validate_config(admm); !v.empty()) throw ValidationError(std::move(v));
  }
};

void print_error(const std::exception& e) {
  std::cerr << "uavjam: error: " << e.what() << "\n";
  if (const auto* v = dynamic_cast<const ValidationError*>(&e)) {
    for (const auto& viol : v->violations()) std::cerr << "  " << viol.field << ": " << viol.message << "\n";
  }
  if (const auto* p = dynamic_cast<const ParseError*>(&e)) {
    if (p->line() > 0) std::cerr << "  at line " << p->line() << "\n";
  }
}

struct SolveArgs {
  std::string scenario;
  std::string out;
  std::string scheme = "proposed";
  std::optional<std::uint64_t> seed;
  int m = 2;
  int k = 3;
};

int cmd_solve(const SolveArgs& a, Overrides& o) {
  o.finish();
  std::optional<Scenario> s;
  if (!a.scenario.empty()) {
    s = parse_scenario(read_file(a.scenario));
  } else if (a.seed) {
    s = random_scenario(*a.seed, a.m, a.k);
  } else {
    throw Error("solve needs --scenario or --seed");
  }
  const SolverReport r = run_scheme(a.scheme, *s, o.admm, o.bcd);
  const fs::path out(a.out);
  fs::create_directories(out);
  write_file(out / "result.json", report_to_json(r, !o.no_timing).dump(2) + "\n");
  write_file(out / "deployment.csv", deployment_csv(r.deployment));
  write_file(out / "sinr.csv", sinr_csv(r));
  if (a.scenario.empty()) write_file(out / "scenario.json", serialize_scenario(*s));
  std::cout << r.scheme << ": avg SINR " << r.avg_sinr_db << " dB, " << r.iterations << " iterations, "
            << (r.converged ? "converged" : "not converged") << "\n";
  return r.converged ? 0 : 2;
}

struct SweepArgs {
  std::string out;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::vector<std::string> schemes;
  std::vector<int> m_values{1, 2, 3, 4};
  int k = 3;
  int num_seeds = 10;
};

int cmd_sweep(const SweepArgs& a, Overrides& o, bool all_schemes_forced) {
  o.finish();
  SweepSpec spec;
  spec.m_values = a.m_values;
  spec.k = a.k;
  spec.num_seeds = a.num_seeds;
  spec.base_seed = a.seed;
  if (!all_schemes_forced && !a.schemes.empty()) spec.schemes = a.schemes;
  spec.admm = o.admm;
  spec.bcd = o.bcd;
  if (auto v = validate_sweep(spec); !v.empty()) throw ValidationError(std::move(v));
  const auto rows = run_sweep(spec, a.jobs);
  const auto cells = aggregate(rows);
  const fs::path out(a.out);
  fs::create_directories(out);
  write_file(out / "sweep_detail.csv", sweep_detail_csv(rows, !o.no_timing));
  write_file(out / "sweep_aggregate.csv", sweep_aggregate_csv(cells, !o.no_timing));
  for (const auto& c : cells) {
    std::cout << c.scheme << " M=" << c.m << ": " << c.mean_avg_sinr_db << " dB (" << c.runs << " runs";
    if (c.failures > 0) std::cout << ", " << c.failures << " failed";
    std::cout << ")\n";
  }
  if (!every_cell_ran(cells)) {
    std::cerr << "uavjam: error: some (scheme, M) cells have no successful run\n";
    return 1;
  }
  return 0;
}

struct PlotArgs {
  std::string input;
  std::string scenario;
  std::string out;
  std::string kind = "auto";
};

int cmd_plot(const PlotArgs& a) {
  const CsvTable t = parse_csv(read_file(a.input));
  std::string kind = a.kind;
  if (kind == "auto") {
    const bool dep = std::find(t.header.begin(), t.header.end(), "uav_id") != t.header.end();
    kind = dep ? "deployment" : "curves";
  }
  Figure fig;
  std::string stem;
  if (kind == "deployment") {
    std::optional<Scenario> s;
    if (!a.scenario.empty()) s = parse_scenario(read_file(a.scenario));
    fig = plot_deployment(t, s);
    stem = "deployment";
  } else {
    fig = plot_curves(t);
    stem = "sinr_vs_m";
  }
  const fs::path out(a.out);
  fs::create_directories(out);
  write_file(out / (stem + ".svg"), fig.svg);
  write_file(out / (stem + "_data.csv"), fig.data_csv);
  return 0;
}

void add_sweep_options(CLI::App* app, SweepArgs& a, bool with_scheme) {
  app->add_option("--out", a.out, "output directory")->required();
  app->add_option("--seed", a.seed, "base seed; cell j uses seed + j")->capture_default_str();
  app->add_option("--jobs", a.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  if (with_scheme) {
    app->add_option("--scheme", a.schemes, "proposed, baseline1, baseline2 (repeatable; default all)")
        ->check(CLI::IsMember({"proposed", "baseline1", "baseline2"}));
  }
  app->add_option("--m", a.m_values, "UAV counts")->delimiter(',')->capture_default_str();
  app->add_option("--k", a.k, "targets per scenario")->capture_default_str();
  app->add_option("--num-seeds", a.num_seeds, "scenarios per M")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative UAV jamming: deployment and antenna-heading optimization"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  Overrides solve_o;
  auto* solve_cmd = app.add_subcommand("solve", "optimize one scenario");
  solve_cmd->add_option("--scenario", solve_args.scenario, "scenario JSON file");
  solve_cmd->add_option("--seed", solve_args.seed, "generate a random scenario instead");
  solve_cmd->add_option("--m", solve_args.m, "UAVs in a generated scenario")->capture_default_str();
  solve_cmd->add_option("--k", solve_args.k, "targets in a generated scenario")->capture_default_str();
  solve_cmd->add_option("--out", solve_args.out, "output directory")->required();
  solve_cmd->add_option("--scheme", solve_args.scheme)
      ->check(CLI::IsMember({"proposed", "baseline1", "baseline2"}))
      ->capture_default_str();
  solve_o.add_to(solve_cmd);

  SweepArgs sweep_args;
  Overrides sweep_o;
  auto* sweep_cmd = app.add_subcommand("sweep", "average SINR versus M over seeded scenarios");
  add_sweep_options(sweep_cmd, sweep_args, true);
  sweep_o.add_to(sweep_cmd);

  SweepArgs cmp_args;
  Overrides cmp_o;
  auto* cmp_cmd = app.add_subcommand("compare", "sweep with every scheme");
  add_sweep_options(cmp_cmd, cmp_args, false);
  cmp_o.add_to(cmp_cmd);

  PlotArgs plot_args;
  auto* plot_cmd = app.add_subcommand("plot", "SVG figure from a deployment or aggregate CSV");
  plot_cmd->add_option("--input", plot_args.input, "deployment.csv or sweep_aggregate.csv")->required();
  plot_cmd->add_option("--scenario", plot_args.scenario, "scenario JSON (targets for deployment plots)");
  plot_cmd->add_option("--out", plot_args.out, "output directory")->required();
  plot_cmd->add_option("--kind", plot_args.kind)
      ->check(CLI::IsMember({"auto", "deployment", "curves"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*solve_cmd) return cmd_solve(solve_args, solve_o);
    if (*sweep_cmd) return cmd_sweep(sweep_args, sweep_o, false);
    if (*cmp_cmd) return cmd_sweep(cmp_args, cmp_o, true);
    if (*plot_cmd) return cmd_plot(plot_args);
  } catch (const std::exception& e) {
    print_error(e);
    return 1;
  }
  return 1;
}
