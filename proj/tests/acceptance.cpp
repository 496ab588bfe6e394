// Acceptance checks 1-9. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Geometry>

#include "support.hpp"
#include "uavjam/uavjam.hpp"

namespace fs = std::filesystem;
using namespace uavjam;
using testsupport::rel_err;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// 1. Analytic gradients of the Smooth objective and of the augmented
//    Lagrangian against central differences.
Outcome gradients() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int n = 0; n < 20; ++n) {
    const int m = 1 + n % 4, k = 1 + n % 3;
    const Scenario s = testsupport::near_scenario(1000 + n, m, k);
    const Deployment d = testsupport::random_feasible_deployment(s, rng, true);
    const auto maps = build_maps(m, k);
    std::normal_distribution<double> nd(0.0, 30.0);
    AuxState aux;
    aux.B = Eigen::MatrixX3d::NullaryExpr(m * k, 3, [&] { return 500 + nd(rng); });
    aux.C = Eigen::MatrixX3d::NullaryExpr(m * (m - 1) / 2, 3, [&] { return 50 + nd(rng); });
    aux.chi = Eigen::MatrixX3d::NullaryExpr(m * k, 3, [&] { return nd(rng); });
    aux.mu = Eigen::MatrixX3d::NullaryExpr(m * (m - 1) / 2, 3, [&] { return nd(rng); });
    const AdmmConfig cfg;

    const SinrEvaluation ev = evaluate_avg_sinr(s, d, GainMode::Smooth);
    const AlEvaluation al = evaluate_augmented_lagrangian(s, maps, d, aux, cfg);
    Eigen::MatrixX2d fd_q(m, 2), fd_al(m, 2);
    Eigen::VectorXd fd_psi(m);
    for (int i = 0; i < m; ++i) {
      for (int a = 0; a < 2; ++a) {
        Eigen::MatrixX2d xp = d.horizontal(), xm = d.horizontal();
        xp(i, a) += 1e-3;
        xm(i, a) -= 1e-3;
        const Deployment dp = make_deployment(s, xp, d.azimuths), dm = make_deployment(s, xm, d.azimuths);
        fd_q(i, a) = (avg_sinr(s, dp, GainMode::Smooth) - avg_sinr(s, dm, GainMode::Smooth)) / 2e-3;
        fd_al(i, a) = (evaluate_augmented_lagrangian(s, maps, dp, aux, cfg).value -
                       evaluate_augmented_lagrangian(s, maps, dm, aux, cfg).value) /
                      2e-3;
      }
      Deployment pp = d, pm = d;
      pp.azimuths[i] += 1e-5;
      pm.azimuths[i] -= 1e-5;
      fd_psi[i] = (avg_sinr(s, pp, GainMode::Smooth) - avg_sinr(s, pm, GainMode::Smooth)) / 2e-5;
    }
    const auto rel = [](const auto& a, const auto& b) {
      return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), 1e-300);
    };
    worst = std::max({worst, rel(ev.grad_q, fd_q), rel(ev.grad_psi, fd_psi), rel(al.grad_q, fd_al),
                      rel(al.grad_psi, fd_psi)});
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-5 && t <= 30.0, "worst relative error " + fmt("%.3g", worst) + ", " + fmt("%.2f", t) + " s"};
}

// 2. Closed-form exterior projection against a numerical projection.
Outcome projection() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> rad(50.0, 800.0);
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const double r = rad(rng);
    Eigen::Vector3d v;
    do {
      v = Eigen::Vector3d(u(rng), u(rng), u(rng)) * (1.5 * r);
    } while (v.norm() < 1e-3 * r);
    worst = std::max(worst, (project_min_norm(v, r) - testsupport::numerical_exterior_projection(v, r)).norm());
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-9 && t <= 10.0, "max deviation " + fmt("%.3g", worst) + " m, " + fmt("%.2f", t) + " s"};
}

// 3. Step-1 rows minimize their subproblem over feasible samples.
Outcome step1_optimality() {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const Scenario s = random_scenario(3, 3, 3);
  const auto maps = build_maps(3, 3);
  int violations = 0;
  double worst_gap = -std::numeric_limits<double>::infinity();
  for (int n = 0; n < 100; ++n) {
    Eigen::MatrixX3d q(3, 3);
    for (int i = 0; i < 3; ++i) q.row(i) << 1600 - 900 * u01(rng), 1500 * (2 * u01(rng) - 1), 600;
    AuxState aux;
    aux.B = Eigen::MatrixX3d::Zero(9, 3);
    aux.C = Eigen::MatrixX3d::Zero(3, 3);
    aux.chi = Eigen::MatrixX3d::NullaryExpr(9, 3, [&] { return 2500 * nd(rng); });
    aux.mu = Eigen::MatrixX3d::NullaryExpr(3, 3, [&] { return 60 * nd(rng); });
    const AuxState out = step1_update(maps, q, s.target_positions(), aux, s);
    // One B row and one C row per instance, alternating which pair is probed.
    const int vb = n % 9, vc = n % 3;
    const auto [bi, bk] = maps.target_pairs[static_cast<std::size_t>(vb)];
    const auto [ci, cj] = maps.uav_pairs[static_cast<std::size_t>(vc)];
    const Eigen::Vector3d target_b = (q.row(bi) - s.target_positions().row(bk) + aux.chi.row(vb)).transpose();
    const Eigen::Vector3d target_c = (q.row(ci) - q.row(cj) + aux.mu.row(vc)).transpose();
    struct Row {
      Eigen::Vector3d sol, v;
      double r;
    };
    for (const Row& row : {Row{out.B.row(vb).transpose(), target_b, s.min_target_sep()},
                           Row{out.C.row(vc).transpose(), target_c, s.min_uav_sep()}}) {
      const double best = (row.sol - row.v).squaredNorm();
      for (int j = 0; j < 10000; ++j) {
        Eigen::Vector3d dir(nd(rng), nd(rng), nd(rng));
        dir.normalize();
        // Half the samples hug the sphere, half spread out to 3r.
        const double len = j % 2 == 0 ? row.r * (1 + 1e-3 * u01(rng)) : row.r * (1 + 2 * u01(rng));
        const Eigen::Vector3d x = dir * len;
        const double val = (x - row.v).squaredNorm();
        worst_gap = std::max(worst_gap, best - val);
        if (val < best - 1e-9) ++violations;
      }
    }
  }
  return {violations == 0, std::to_string(violations) + " better samples out of 2,000,000 (largest gain " +
                               fmt("%.3g", std::max(worst_gap, 0.0)) + ")"};
}

// 4. Convergence and constraint satisfaction on seeded scenarios.
Outcome convergence() {
  int converged = 0;
  bool feasible = true;
  double slowest = 0.0;
  std::string notes;
  for (int n = 0; n < 10; ++n) {
    const Scenario s = random_scenario(static_cast<std::uint64_t>(n), n % 2 == 0 ? 2 : 3, 3);
    const auto t0 = Clock::now();
    const SolverReport r = solve(s);
    slowest = std::max(slowest, seconds_since(t0));
    if (r.converged && r.final_residual <= 1e-3 && r.iterations <= 300) ++converged;
    const Feasibility& f = r.feasibility;
    const bool ok = r.deployment.positions.col(0).maxCoeff() <= 1600.0 &&
                    f.min_uav_distance >= 50.0 * (1 - 1e-6) && f.min_target_distance >= 500.0 * (1 - 1e-6);
    if (!ok) {
      feasible = false;
      notes += " infeasible seed " + std::to_string(n) + ";";
    }
  }
  return {converged >= 8 && feasible && slowest <= 10.0,
          std::to_string(converged) + "/10 converged, constraints " + (feasible ? "held" : "violated") +
              ", slowest solve " + fmt("%.2f", slowest) + " s" + notes};
}

// 5. Single UAV against a single target beyond the deployable edge.
Outcome edge_geometry() {
  Eigen::MatrixX3d t(1, 3);
  t << 2100, 800, 0;
  const Scenario s = Scenario::create(ScenarioParams::with_defaults(1, t, Vec3(3000, 800, 20)));
  const SolverReport r = solve(s);
  const double x = r.deployment.positions(0, 0), y = r.deployment.positions(0, 1), psi = r.deployment.azimuths[0];
  const bool ok = x >= 1590 && x <= 1600 && std::abs(y - 800) <= 10 && std::abs(psi) <= 0.05;
  std::ostringstream os;
  os << "x = " << x << ", y = " << y << ", psi = " << psi << " (" << r.avg_sinr_db << " dB, "
     << (r.converged ? "converged" : "not converged") << " after " << r.iterations << " iterations)";
  return {ok, os.str()};
}

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepCell> cells;
  double seconds = 0.0;
};

SweepResult reference_sweep(int jobs) {
  SweepSpec spec;  // M = 1..4, K = 3, 10 seeds, all schemes
  const auto t0 = Clock::now();
  SweepResult r;
  r.rows = run_sweep(spec, jobs);
  r.cells = aggregate(r.rows);
  r.seconds = seconds_since(t0);
  return r;
}

std::map<std::string, std::map<int, double>> means(const SweepResult& r) {
  std::map<std::string, std::map<int, double>> out;
  for (const auto& c : r.cells) out[c.scheme][c.m] = c.runs > 0 ? c.mean_avg_sinr_db : std::nan("");
  return out;
}

// 6. Mean average SINR strictly decreasing in M for every scheme.
Outcome trend(const SweepResult& r) {
  const auto mu = means(r);
  bool ok = every_cell_ran(r.cells) && r.seconds <= 900.0;
  std::ostringstream os;
  for (const auto& name : all_schemes()) {
    const auto& row = mu.at(name);
    os << name << " [";
    for (int m = 1; m <= 4; ++m) {
      os << (m > 1 ? ", " : "") << fmt("%.4f", row.at(m));
      if (m > 1 && !(row.at(m) < row.at(m - 1))) ok = false;
    }
    os << "] ";
  }
  os << fmt("(%.1f s)", r.seconds);
  return {ok, os.str()};
}

// 7. proposed <= baseline2 <= baseline1 at every M; proposed beats baseline1
//    by at least 0.5 dB at M = 4.
Outcome ordering(const SweepResult& r) {
  const auto mu = means(r);
  bool ok = true;
  std::ostringstream os;
  for (int m = 1; m <= 4; ++m) {
    const double p = mu.at("proposed").at(m), b2 = mu.at("baseline2").at(m), b1 = mu.at("baseline1").at(m);
    const bool cell = p <= b2 && b2 <= b1;
    ok = ok && cell;
    os << "M=" << m << (cell ? " ok" : " out of order") << " (" << fmt("%+.4f", p - b2) << "/"
       << fmt("%+.4f", b2 - b1) << " dB); ";
  }
  const double margin = mu.at("baseline1").at(4) - mu.at("proposed").at(4);
  ok = ok && margin >= 0.5;
  os << "M=4 margin over baseline1 " << fmt("%.4f", margin) << " dB (need 0.5)";
  return {ok, os.str()};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(UAVJAM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 8. Repeated solve and sweep runs give byte-identical outputs.
Outcome determinism(const SweepResult& first) {
  bool ok = true;
  std::string notes;
  const SweepResult again = reference_sweep(1);
  if (sweep_detail_csv(first.rows, false) != sweep_detail_csv(again.rows, false) ||
      sweep_aggregate_csv(first.cells, false) != sweep_aggregate_csv(again.cells, false)) {
    ok = false;
    notes += " library sweep differs;";
  }
  const Scenario s = random_scenario(11, 3, 3);
  if (report_to_json(solve(s), false).dump() != report_to_json(solve(s), false).dump()) {
    ok = false;
    notes += " library solve differs;";
  }

  const fs::path dir = fs::temp_directory_path() / "uavjam_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_file(dir / "s.json", serialize_scenario(s));
  for (const char* out : {"solve_a", "solve_b"}) {
    run_cli("solve --no-timing --scenario " + (dir / "s.json").string() + " --out " + (dir / out).string());
  }
  for (const char* f : {"result.json", "deployment.csv", "sinr.csv"}) {
    if (!fs::exists(dir / "solve_a" / f) || read_file(dir / "solve_a" / f) != read_file(dir / "solve_b" / f)) {
      ok = false;
      notes += std::string(" cli solve ") + f + " differs;";
    }
  }
  const std::string sweep = " --no-timing --m 1,2 --k 3 --num-seeds 3 --seed 40";
  run_cli("compare --jobs 1 --out " + (dir / "sweep_a").string() + sweep);
  run_cli("compare --jobs 4 --out " + (dir / "sweep_b").string() + sweep);
  for (const char* f : {"sweep_detail.csv", "sweep_aggregate.csv"}) {
    if (!fs::exists(dir / "sweep_a" / f) || read_file(dir / "sweep_a" / f) != read_file(dir / "sweep_b" / f)) {
      ok = false;
      notes += std::string(" cli sweep ") + f + " differs;";
    }
  }
  fs::remove_all(dir);
  return {ok, ok ? "library and command-line outputs byte-identical" : notes};
}

// 9. Rotation equivariance of the signal model and reflection antisymmetry
//    of the gradients.
Outcome symmetry() {
  std::mt19937_64 rng(515);
  std::uniform_real_distribution<double> ua(-std::numbers::pi, std::numbers::pi);
  double worst_rot = 0.0, worst_ref = 0.0;
  for (int n = 0; n < 50; ++n) {
    const Scenario s = testsupport::near_scenario(2000 + n, 1 + n % 4, 1 + n % 3);
    const Deployment d = testsupport::random_feasible_deployment(s, rng, n % 2 == 0);

    const double a = ua(rng);
    const Eigen::Matrix3d rot = Eigen::AngleAxisd(a, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    ScenarioParams pr = s.params();
    pr.target_positions = (pr.target_positions * rot.transpose()).eval();
    pr.control_center = rot * pr.control_center;
    const Scenario sr = Scenario::create(pr);
    Deployment dr;
    dr.positions = (d.positions * rot.transpose()).eval();
    dr.azimuths = d.azimuths.array() + a;
    for (int k = 0; k < s.num_targets(); ++k) {
      worst_rot = std::max(worst_rot, rel_err(sinr_target(s, d, k, GainMode::Smooth),
                                              sinr_target(sr, dr, k, GainMode::Smooth)));
    }

    ScenarioParams pm = s.params();
    pm.target_positions.col(1) *= -1.0;
    pm.control_center.y() *= -1.0;
    const Scenario sm = Scenario::create(pm);
    Deployment dm = d;
    dm.positions.col(1) *= -1.0;
    dm.azimuths *= -1.0;
    const auto e = evaluate_avg_sinr(s, d, GainMode::Smooth);
    const auto em = evaluate_avg_sinr(sm, dm, GainMode::Smooth);
    const double sq = std::max(e.grad_q.cwiseAbs().maxCoeff(), 1e-300);
    const double sp = std::max(e.grad_psi.cwiseAbs().maxCoeff(), 1e-300);
    worst_ref = std::max({worst_ref, (e.grad_q.col(0) - em.grad_q.col(0)).cwiseAbs().maxCoeff() / sq,
                          (e.grad_q.col(1) + em.grad_q.col(1)).cwiseAbs().maxCoeff() / sq,
                          (e.grad_psi + em.grad_psi).cwiseAbs().maxCoeff() / sp});
  }
  return {worst_rot <= 1e-10 && worst_ref <= 1e-10,
          "rotation " + fmt("%.3g", worst_rot) + ", reflection " + fmt("%.3g", worst_ref)};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const Outcome& o) {
    std::printf("criterion %d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  };
  auto guarded = [](const std::function<Outcome()>& f) {
    try {
      return f();
    } catch (const std::exception& e) {
      return Outcome{false, std::string("exception: ") + e.what()};
    }
  };

  report(1, guarded(gradients));
  report(2, guarded(projection));
  report(3, guarded(step1_optimality));
  report(4, guarded(convergence));
  report(5, guarded(edge_geometry));
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  SweepResult sweep;
  try {
    sweep = reference_sweep(static_cast<int>(hw));
  } catch (const std::exception& e) {
    std::printf("reference sweep failed: %s\n", e.what());
  }
  report(6, guarded([&] { return trend(sweep); }));
  report(7, guarded([&] { return ordering(sweep); }));
  report(8, guarded([&] { return determinism(sweep); }));
  report(9, guarded(symmetry));
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
