#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "uavjam/errors.hpp"

namespace uavjam {

// Controls of the accelerated gradient-projection inner solver.
struct GradProjConfig {
  double beta_nag = 0.9;
  double rho_rms = 0.9;
  double eps_rms = 1e-8;
  double alpha_nag = 1.0;     // base step, metres
  double alpha_search = 1.0;  // step along Q_proj - Q, in (0, 1]
  int max_iters = 500;
  double tol = 1e-6;          // relative objective change
  int patience = 10;          // consecutive quiet iterations needed to stop
  double step_tol = 1e-4;     // metres; a quiet iteration also moves less than this
};

// Optimizer memory. v_x and v_y are single scalars per axis (they accumulate
// the squared norm of the whole x / y gradient column), not per-coordinate.
struct GradProjState {
  Eigen::MatrixX2d d_last;
  Eigen::MatrixX2d g_last;
  double v_x = 0.0;
  double v_y = 0.0;
  int t = 1;
  int t_last = 0;  // kept for parity with the reference procedure; unused

  static GradProjState zeros(Eigen::Index m) {
    GradProjState st;
    st.d_last = Eigen::MatrixX2d::Zero(m, 2);
    st.g_last = Eigen::MatrixX2d::Zero(m, 2);
    return st;
  }
};

// One hybrid NAG/RMSProp descent step on the horizontal coordinates.
// Returns the unprojected trial point and the advanced state.
inline std::pair<Eigen::MatrixX2d, GradProjState> hybrid_step(const Eigen::MatrixX2d& q, const Eigen::MatrixX2d& g,
                                                              const GradProjState& st, const GradProjConfig& cfg) {
  const double beta = cfg.beta_nag;
  const double rho = cfg.rho_rms;
  const Eigen::MatrixX2d d = beta * st.d_last + g + beta * (g - st.g_last);
  const double bias = 1.0 - std::pow(rho, st.t);
  const double v_x = (rho * st.v_x + (1.0 - rho) * g.col(0).squaredNorm()) / bias;
  const double v_y = (rho * st.v_y + (1.0 - rho) * g.col(1).squaredNorm()) / bias;

  Eigen::MatrixX2d q_bar(q.rows(), 2);
  q_bar.col(0) = q.col(0) - cfg.alpha_nag * d.col(0) / (std::sqrt(v_x) + cfg.eps_rms);
  q_bar.col(1) = q.col(1) - cfg.alpha_nag * d.col(1) / (std::sqrt(v_y) + cfg.eps_rms);

  GradProjState next;
  next.d_last = d;
  next.g_last = g;
  next.v_x = v_x;
  next.v_y = v_y;
  next.t_last = st.t;
  next.t = st.t + 1;
  return {std::move(q_bar), std::move(next)};
}

// Projection onto the deployable half-plane x <= x_max.
inline Eigen::MatrixX2d project_deploy(Eigen::MatrixX2d q, double x_max) {
  q.col(0) = q.col(0).cwiseMin(x_max);
  return q;
}

// f(Q, grad) returns the objective at Q and writes its gradient into grad.
template <typename F>
concept HorizontalObjective = requires(F f, const Eigen::MatrixX2d& q, Eigen::MatrixX2d& g) {
  { f(q, g) } -> std::convertible_to<double>;
};

struct GradProjResult {
  Eigen::MatrixX2d q;          // best iterate seen
  double value = 0.0;          // objective at q
  std::vector<double> trace;   // objective after each iteration (trace[0] = start)
  int iterations = 0;
};

// Gradient projection with the hybrid step. Iterates stay in the half-plane
// because each update is a convex combination of the current point and its
// projected trial point. Returns the best iterate by objective value.
template <HorizontalObjective F>
GradProjResult gradient_projection(F&& objective, const Eigen::MatrixX2d& q0, double x_max,
                                   const GradProjConfig& cfg = {}) {
  Eigen::MatrixX2d q = q0;
  Eigen::MatrixX2d g(q.rows(), 2);
  double f = objective(q, g);
  if (!std::isfinite(f) || !g.allFinite()) throw NumericalError("gradient_projection: nonfinite start", q);

  GradProjResult res;
  res.q = q;
  res.value = f;
  res.trace.push_back(f);
  GradProjState st = GradProjState::zeros(q.rows());
  int quiet = 0;

  while (st.t <= cfg.max_iters) {
    auto [q_bar, next] = hybrid_step(q, g, st, cfg);
    st = std::move(next);
    const Eigen::MatrixX2d q_proj = project_deploy(std::move(q_bar), x_max);
    const Eigen::MatrixX2d q_prev = q;
    q = q + cfg.alpha_search * (q_proj - q);
    // Rounding in the convex combination must not leave the half-plane.
    q.col(0) = q.col(0).cwiseMin(x_max);

    const double f_prev = f;
    f = objective(q, g);
    ++res.iterations;
    if (!std::isfinite(f) || !g.allFinite()) throw NumericalError("gradient_projection: nonfinite iterate", q);
    res.trace.push_back(f);
    if (f < res.value) {
      res.value = f;
      res.q = q;
    }
    const double scale = std::max(std::abs(f_prev), std::numeric_limits<double>::min());
    const bool small_change = std::abs(f - f_prev) <= cfg.tol * scale;
    const bool small_move = (q - q_prev).cwiseAbs().maxCoeff() <= cfg.step_tol;
    quiet = small_change && small_move ? quiet + 1 : 0;
    if (quiet >= cfg.patience) break;
  }
  return res;
}

}  // namespace uavjam
