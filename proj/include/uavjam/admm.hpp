#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "uavjam/constraints.hpp"
#include "uavjam/errors.hpp"
#include "uavjam/gradproj.hpp"
#include "uavjam/placement.hpp"
#include "uavjam/scenario.hpp"
#include "uavjam/signal_model.hpp"

namespace uavjam {

// How the multipliers are bounded once their largest entry reaches omega.
//   RescaleByMax: divide the candidate by its max-abs entry.
//   ClampAtBound: clamp every entry to [-omega, omega].
enum class MultiplierClip { RescaleByMax, ClampAtBound };

struct AdmmConfig {
  double rho1 = 0.01;
  double rho2 = 0.01;
  double eta = 1e-3;
  double omega_chi = 200.0;
  double omega_mu = 200.0;
  int max_outer_iters = 300;
  int psi_starts = 8;
  double psi_step = 0.2;   // largest angular move of one descent step, rad
  int psi_iters = 100;
  MultiplierClip clip = MultiplierClip::RescaleByMax;
  double feasibility_rel_tol = 1e-6;
  GradProjConfig gradproj;
};

inline std::vector<Violation> validate_config(const AdmmConfig& c) {
  std::vector<Violation> out;
  auto need = [&](bool ok, const char* field, const char* msg) {
    if (!ok) out.push_back({field, msg});
  };
  need(c.rho1 >= 0.0, "rho1", "rho1 must be nonnegative");
  need(c.rho2 >= 0.0, "rho2", "rho2 must be nonnegative");
  need(c.eta > 0.0, "eta", "eta must be positive");
  need(c.omega_chi > 0.0, "omega_chi", "omega_chi must be positive");
  need(c.omega_mu > 0.0, "omega_mu", "omega_mu must be positive");
  need(c.max_outer_iters >= 1, "max_outer_iters", "max_outer_iters must be ≥ 1");
  need(c.psi_starts >= 1, "psi_starts", "psi_starts must be ≥ 1");
  need(c.psi_step > 0.0, "psi_step", "psi_step must be positive");
  need(c.psi_iters >= 1, "psi_iters", "psi_iters must be ≥ 1");
  const auto& g = c.gradproj;
  need(g.beta_nag >= 0.0 && g.beta_nag < 1.0, "beta_nag", "beta_nag must lie in [0, 1)");
  need(g.rho_rms > 0.0 && g.rho_rms < 1.0, "rho_rms", "rho_rms must lie in (0, 1)");
  need(g.eps_rms > 0.0, "eps_rms", "eps_rms must be positive");
  need(g.alpha_nag > 0.0, "alpha_nag", "alpha_nag must be positive");
  need(g.alpha_search > 0.0 && g.alpha_search <= 1.0, "alpha_search", "alpha_search must lie in (0, 1]");
  need(g.max_iters >= 1, "max_iters", "max_iters must be ≥ 1");
  return out;
}

struct AdmmState {
  Deployment deployment;
  AuxState aux;
  std::vector<double> residual_history;
  std::vector<double> objective_history;  // Hard-mode average SINR
  std::vector<double> smooth_history;     // Smooth-mode average SINR
  int iter = 0;
};

struct SolverReport {
  std::string scheme;
  Deployment deployment;
  Eigen::VectorXd sinr_linear;
  Eigen::VectorXd sinr_db;
  double avg_sinr_linear = 0.0;
  double avg_sinr_db = 0.0;
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  double wall_time_s = 0.0;
  Feasibility feasibility;
  std::vector<double> residual_history;
  std::vector<double> objective_history;
  std::vector<double> smooth_history;
};

// Fills the SINR fields of a report from its deployment (Hard mode).
inline void finalize_report(const Scenario& s, SolverReport& r) {
  r.sinr_linear = sinr_per_target(s, r.deployment, GainMode::Hard);
  r.sinr_db = r.sinr_linear.unaryExpr([](double v) { return linear_to_db(v); });
  r.avg_sinr_linear = r.sinr_linear.mean();
  r.avg_sinr_db = linear_to_db(r.avg_sinr_linear);
  r.feasibility = check_feasibility(s, r.deployment.positions);
}

// ---------------------------------------------------------------------------
// Augmented Lagrangian (scaled form).

struct AlEvaluation {
  double value = 0.0;
  Eigen::MatrixX2d grad_q;
  Eigen::VectorXd grad_psi;
};

inline AlEvaluation evaluate_augmented_lagrangian(const Scenario& s, const ConstraintMaps& maps,
                                                  const Deployment& d, const AuxState& aux,
                                                  const AdmmConfig& cfg) {
  const SinrEvaluation ev = evaluate_avg_sinr(s, d, GainMode::Smooth);
  const Eigen::MatrixX3d r1 = target_differences(maps, d.positions, s.target_positions()) - aux.B + aux.chi;
  const Eigen::MatrixX3d r2 = uav_differences(maps, d.positions) - aux.C + aux.mu;

  AlEvaluation al;
  al.value = ev.value + 0.5 * cfg.rho1 * (r1.squaredNorm() - aux.chi.squaredNorm()) +
             0.5 * cfg.rho2 * (r2.squaredNorm() - aux.mu.squaredNorm());
  al.grad_q = ev.grad_q;
  for (std::size_t v = 0; v < maps.target_pairs.size(); ++v) {
    const int i = maps.target_pairs[v].first;
    al.grad_q.row(i) += cfg.rho1 * r1.row(static_cast<Eigen::Index>(v)).leftCols<2>();
  }
  for (std::size_t v = 0; v < maps.uav_pairs.size(); ++v) {
    const auto [i, j] = maps.uav_pairs[v];
    const Eigen::RowVector2d g = cfg.rho2 * r2.row(static_cast<Eigen::Index>(v)).leftCols<2>();
    al.grad_q.row(i) += g;
    al.grad_q.row(j) -= g;
  }
  al.grad_psi = ev.grad_psi;
  return al;
}

inline double augmented_lagrangian(const Scenario& s, const AdmmState& st, const AdmmConfig& cfg) {
  const auto maps = build_maps(s.num_uavs(), s.num_targets());
  return evaluate_augmented_lagrangian(s, maps, st.deployment, st.aux, cfg).value;
}

// ---------------------------------------------------------------------------
// The four update steps.

// Positions: accelerated gradient projection on the augmented Lagrangian with
// psi and the auxiliaries held fixed.
inline AdmmState update_q(const Scenario& s, const ConstraintMaps& maps, const AdmmState& st, const AdmmConfig& cfg) {
  auto objective = [&](const Eigen::MatrixX2d& xy, Eigen::MatrixX2d& grad) {
    const Deployment d = make_deployment(s, xy, st.deployment.azimuths);
    const AlEvaluation al = evaluate_augmented_lagrangian(s, maps, d, st.aux, cfg);
    grad = al.grad_q;
    return al.value;
  };
  const GradProjResult r = gradient_projection(objective, st.deployment.horizontal(), s.deploy_x_max(), cfg.gradproj);
  AdmmState out = st;
  out.deployment = make_deployment(s, r.q, st.deployment.azimuths);
  return out;
}

inline AdmmState update_q(const Scenario& s, const AdmmState& st, const AdmmConfig& cfg) {
  return update_q(s, build_maps(s.num_uavs(), s.num_targets()), st, cfg);
}

namespace detail {

// Normalized gradient descent with backtracking over the azimuths; angles are
// left unwrapped. In Hard mode the step never crosses a lobe edge that makes
// things worse, so it refines headings without losing coverage.
inline std::pair<Eigen::VectorXd, double> descend_psi(const Scenario& s, const Eigen::MatrixX2d& xy,
                                                      Eigen::VectorXd psi, const AdmmConfig& cfg, GainMode mode) {
  auto eval = [&](const Eigen::VectorXd& p) {
    Deployment d;
    d.positions.resize(xy.rows(), 3);
    d.positions.leftCols<2>() = xy;
    d.positions.col(2).setConstant(s.altitude());
    d.azimuths = p;
    return evaluate_avg_sinr_ae(s, d, mode);
  };
  SinrEvaluation cur = eval(psi);
  double step = cfg.psi_step;
  for (int it = 0; it < cfg.psi_iters; ++it) {
    const double gmax = cur.grad_psi.cwiseAbs().maxCoeff();
    if (!(gmax > 0.0) || !std::isfinite(gmax)) break;
    const Eigen::VectorXd dir = -cur.grad_psi / gmax;
    const double slope = cur.grad_psi.dot(dir);  // negative
    bool accepted = false;
    while (step > 1e-12) {
      const Eigen::VectorXd trial = psi + step * dir;
      SinrEvaluation next = eval(trial);
      if (next.value <= cur.value + 1e-4 * step * slope) {
        psi = trial;
        cur = std::move(next);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    step = std::min(2.0 * step, cfg.psi_step);
  }
  return {psi, cur.value};
}

}  // namespace detail

// Azimuths: multi-start descent. Starts are the incumbent plus psi_starts
// evenly spaced common headings. Each start descends on the Smooth objective
// and is then polished on the Hard one; the incumbent itself is also polished
// without the Smooth stage. Candidates are ranked by Hard value, Smooth
// breaking ties, and the incumbent wins unless beaten.
inline AdmmState update_psi(const Scenario& s, const AdmmState& st, const AdmmConfig& cfg) {
  const Eigen::MatrixX2d xy = st.deployment.horizontal();
  const Eigen::Index m = xy.rows();
  AdmmState out = st;
  double best_hard = avg_sinr(s, st.deployment, GainMode::Hard);
  double best_smooth = avg_sinr(s, st.deployment, GainMode::Smooth);
  auto consider = [&](const Eigen::VectorXd& psi) {
    Deployment d = make_deployment(s, xy, psi);
    const double hard = avg_sinr(s, d, GainMode::Hard);
    const double smooth = avg_sinr(s, d, GainMode::Smooth);
    if (hard < best_hard || (hard == best_hard && smooth < best_smooth)) {
      best_hard = hard;
      best_smooth = smooth;
      out.deployment = std::move(d);
    }
  };
  auto run = [&](const Eigen::VectorXd& start) {
    const Eigen::VectorXd smooth = detail::descend_psi(s, xy, start, cfg, GainMode::Smooth).first;
    consider(smooth);
    consider(detail::descend_psi(s, xy, smooth, cfg, GainMode::Hard).first);
  };
  consider(detail::descend_psi(s, xy, st.deployment.azimuths, cfg, GainMode::Hard).first);
  run(st.deployment.azimuths);
  for (int j = 0; j < cfg.psi_starts; ++j) {
    const double heading = wrap_angle(2.0 * std::numbers::pi * j / cfg.psi_starts);
    run(Eigen::VectorXd::Constant(m, heading));
  }
  out.deployment.azimuths = out.deployment.azimuths.unaryExpr([](double a) { return wrap_angle(a); });
  return out;
}

namespace detail {
inline Eigen::MatrixX3d bound_multiplier(Eigen::MatrixX3d cand, double omega, MultiplierClip clip) {
  if (cand.size() == 0) return cand;
  const double mx = cand.cwiseAbs().maxCoeff();
  if (mx < omega) return cand;
  if (clip == MultiplierClip::RescaleByMax) return cand / mx;
  return cand.cwiseMax(-omega).cwiseMin(omega);
}
}  // namespace detail

inline AdmmState update_multipliers(const AdmmState& st, const AdmmConfig& cfg, const ConstraintMaps& maps,
                                    const Eigen::MatrixX3d& qt) {
  AdmmState out = st;
  const Eigen::MatrixX3d& q = st.deployment.positions;
  const Eigen::MatrixX3d chi = st.aux.chi + target_differences(maps, q, qt) - st.aux.B;
  const Eigen::MatrixX3d mu = st.aux.mu + uav_differences(maps, q) - st.aux.C;
  out.aux.chi = detail::bound_multiplier(chi, cfg.omega_chi, cfg.clip);
  out.aux.mu = detail::bound_multiplier(mu, cfg.omega_mu, cfg.clip);
  return out;
}

// ---------------------------------------------------------------------------
// Driver.

// Default start: greedy nearest-target placement, antennas on boresight.
inline Deployment default_initial_deployment(const Scenario& s) { return greedy_nearest_deployment(s); }

inline SolverReport solve(const Scenario& s, const std::optional<Deployment>& init = std::nullopt,
                          const AdmmConfig& cfg = {}) {
  if (auto v = validate_config(cfg); !v.empty()) throw ValidationError(std::move(v));
  const auto t0 = std::chrono::steady_clock::now();
  const ConstraintMaps maps = build_maps(s.num_uavs(), s.num_targets());
  const Eigen::MatrixX3d& qt = s.target_positions();

  AdmmState st;
  if (init) {
    if (!deployment_well_formed(s, *init)) throw Error("solve: initial deployment has the wrong shape");
    if (!check_feasibility(s, init->positions).ok(s)) throw Error("solve: initial deployment is infeasible");
    st.deployment = *init;
  } else {
    st.deployment = default_initial_deployment(s);
  }
  st.aux = initial_aux(maps, st.deployment.positions, s);

  SolverReport rep;
  rep.scheme = "proposed";
  Deployment incumbent = st.deployment;
  double incumbent_val = avg_sinr(s, incumbent, GainMode::Hard);

  auto consider = [&](const Deployment& d) {
    Deployment cand = d;
    cand.positions = restore_feasibility(s, d.positions);
    cand.positions.col(2).setConstant(s.altitude());
    if (!check_feasibility(s, cand.positions).ok(s, cfg.feasibility_rel_tol)) return;
    const double v = avg_sinr(s, cand, GainMode::Hard);
    if (v < incumbent_val) {
      incumbent_val = v;
      incumbent = std::move(cand);
    }
  };

  for (int l = 0; l < cfg.max_outer_iters; ++l) {
    st.aux = step1_update(maps, st.deployment.positions, qt, st.aux, s);
    try {
      st = update_q(s, maps, st, cfg);
    } catch (const NumericalError& e) {
      throw NumericalError("outer iteration " + std::to_string(l) + ": " + e.what(), e.iterate());
    }
    st = update_psi(s, st, cfg);
    st = update_multipliers(st, cfg, maps, qt);
    st.iter = l + 1;

    const double eps = primal_residual(maps, st.deployment.positions, qt, st.aux);
    st.residual_history.push_back(eps);
    st.objective_history.push_back(avg_sinr(s, st.deployment, GainMode::Hard));
    st.smooth_history.push_back(avg_sinr(s, st.deployment, GainMode::Smooth));
    consider(st.deployment);
    if (eps <= cfg.eta) {
      rep.converged = true;
      break;
    }
  }

  rep.deployment = std::move(incumbent);
  rep.iterations = st.iter;
  rep.final_residual = st.residual_history.empty() ? 0.0 : st.residual_history.back();
  rep.residual_history = std::move(st.residual_history);
  rep.objective_history = std::move(st.objective_history);
  rep.smooth_history = std::move(st.smooth_history);
  finalize_report(s, rep);
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace uavjam
