#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "uavjam/admm.hpp"
#include "uavjam/constraints.hpp"
#include "uavjam/placement.hpp"
#include "uavjam/scenario.hpp"
#include "uavjam/signal_model.hpp"

namespace uavjam {

// Controls shared by both block-coordinate-descent comparison schemes.
struct BcdConfig {
  int max_rounds = 50;
  double coord_tol = 1e-6;      // relative improvement of one round
  int angle_grid = 360;
  double position_step = 10.0;  // metres
  int max_moves_per_uav = 200;  // pattern-search moves per UAV per round
};

namespace detail {

inline double hard_objective(const Scenario& s, const Deployment& d) { return avg_sinr(s, d, GainMode::Hard); }

// 1-D minimization of the Hard objective over psi_i: grid, then golden
// section inside the bracketing cells. Only strict improvements are kept.
inline double minimize_heading(const Scenario& s, Deployment& d, int i, int grid) {
  double best = hard_objective(s, d);
  double best_psi = d.azimuths[i];
  const double cell = 2.0 * std::numbers::pi / grid;
  auto eval = [&](double psi) {
    d.azimuths[i] = wrap_angle(psi);
    return hard_objective(s, d);
  };
  double grid_best = std::numeric_limits<double>::infinity();
  double grid_psi = 0.0;
  for (int g = 0; g < grid; ++g) {
    const double psi = -std::numbers::pi + (g + 1) * cell;
    const double v = eval(psi);
    if (v < grid_best) {
      grid_best = v;
      grid_psi = psi;
    }
  }
  if (grid_best < best) {
    best = grid_best;
    best_psi = wrap_angle(grid_psi);
  }
  // Golden section on [centre - cell, centre + cell].
  const double centre = best_psi;
  constexpr double kInvPhi = 0.6180339887498949;
  double a = centre - cell;
  double b = centre + cell;
  double c = b - kInvPhi * (b - a);
  double e = a + kInvPhi * (b - a);
  double fc = eval(c);
  double fe = eval(e);
  for (int it = 0; it < 60 && (b - a) > 1e-10; ++it) {
    if (fc < fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - kInvPhi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + kInvPhi * (b - a);
      fe = eval(e);
    }
  }
  for (double psi : {c, e}) {
    const double v = eval(psi);
    if (v < best) {
      best = v;
      best_psi = wrap_angle(psi);
    }
  }
  d.azimuths[i] = best_psi;
  return best;
}

// Round-robin nearest-feasible placement with coverage-maximizing headings.
inline Deployment baseline1_start(const Scenario& s, const BcdConfig& cfg) {
  const int m = s.num_uavs();
  std::vector<Eigen::Vector2d> placed;
  Eigen::MatrixX2d xy(m, 2);
  Eigen::VectorXd psi(m);
  for (int i = 0; i < m; ++i) {
    const int k = i % s.num_targets();
    const Eigen::Vector2d p = separated_candidates(s, nearest_feasible_point(s, k), placed).front();
    placed.push_back(p);
    xy.row(i) = p.transpose();
    psi[i] = coverage_heading(s, p, k, cfg.angle_grid);
  }
  return make_deployment(s, xy, psi);
}

inline bool improved_enough(double before, double after, double tol) {
  return before - after > tol * std::abs(before);
}

// Pattern search over (x_i, y_i): +-step moves on each axis, accepted only if
// the deployment stays exactly feasible and the objective strictly drops.
inline double search_position(const Scenario& s, Deployment& d, int i, const BcdConfig& cfg, double current) {
  static constexpr int kMoves[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (int move = 0; move < cfg.max_moves_per_uav; ++move) {
    double best = current;
    Eigen::RowVector3d best_row = d.positions.row(i);
    for (const auto& mv : kMoves) {
      Deployment trial = d;
      trial.positions(i, 0) += mv[0] * cfg.position_step;
      trial.positions(i, 1) += mv[1] * cfg.position_step;
      if (!check_feasibility(s, trial.positions).ok(s)) continue;
      const double v = hard_objective(s, trial);
      if (v < best) {
        best = v;
        best_row = trial.positions.row(i);
      }
    }
    if (!(best < current)) break;
    d.positions.row(i) = best_row;
    current = best;
  }
  return current;
}

}  // namespace detail

// Fixed nearest-target placement; antenna headings by cyclic BCD.
inline SolverReport baseline1(const Scenario& s, const BcdConfig& cfg = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  Deployment d = detail::baseline1_start(s, cfg);
  double f = detail::hard_objective(s, d);
  SolverReport rep;
  rep.scheme = "baseline1";
  rep.objective_history.push_back(f);
  for (int round = 0; round < cfg.max_rounds; ++round) {
    const double before = f;
    for (int i = 0; i < d.size(); ++i) f = detail::minimize_heading(s, d, i, cfg.angle_grid);
    rep.objective_history.push_back(f);
    rep.iterations = round + 1;
    if (!detail::improved_enough(before, f, cfg.coord_tol)) {
      rep.converged = true;
      break;
    }
  }
  rep.deployment = std::move(d);
  finalize_report(s, rep);
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

// Alternating BCD over headings and positions, started from baseline1.
inline SolverReport baseline2(const Scenario& s, const BcdConfig& cfg = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  Deployment d = baseline1(s, cfg).deployment;
  double f = detail::hard_objective(s, d);
  SolverReport rep;
  rep.scheme = "baseline2";
  rep.objective_history.push_back(f);
  for (int round = 0; round < cfg.max_rounds; ++round) {
    const double before = f;
    for (int i = 0; i < d.size(); ++i) f = detail::minimize_heading(s, d, i, cfg.angle_grid);
    for (int i = 0; i < d.size(); ++i) f = detail::search_position(s, d, i, cfg, f);
    rep.objective_history.push_back(f);
    rep.iterations = round + 1;
    if (!detail::improved_enough(before, f, cfg.coord_tol)) {
      rep.converged = true;
      break;
    }
  }
  rep.deployment = std::move(d);
  finalize_report(s, rep);
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace uavjam
