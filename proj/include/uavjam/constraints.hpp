#pragma once

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "uavjam/errors.hpp"
#include "uavjam/scenario.hpp"

namespace uavjam {

// Index realization of the selection/difference operators that map the UAV
// positions onto the UAV-target differences (rows of B) and the UAV-UAV
// differences (rows of C). target_pairs is UAV-major: (0,0), (0,1), ...,
// (1,0), ...; uav_pairs lists (i, j), i < j, in lexicographic order.
struct ConstraintMaps {
  std::vector<std::pair<int, int>> target_pairs;
  std::vector<std::pair<int, int>> uav_pairs;
};

inline ConstraintMaps build_maps(int m, int k) {
  ConstraintMaps maps;
  for (int i = 0; i < m; ++i) {
    for (int t = 0; t < k; ++t) maps.target_pairs.emplace_back(i, t);
  }
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) maps.uav_pairs.emplace_back(i, j);
  }
  return maps;
}

// Auxiliary consensus variables and their scaled multipliers.
struct AuxState {
  Eigen::MatrixX3d B;
  Eigen::MatrixX3d C;
  Eigen::MatrixX3d chi;
  Eigen::MatrixX3d mu;
};

// Consensus values A1 Q - A2 Qt (rows q_i - q_t,k).
inline Eigen::MatrixX3d target_differences(const ConstraintMaps& maps, const Eigen::MatrixX3d& q,
                                           const Eigen::MatrixX3d& qt) {
  Eigen::MatrixX3d out(static_cast<Eigen::Index>(maps.target_pairs.size()), 3);
  for (std::size_t v = 0; v < maps.target_pairs.size(); ++v) {
    const auto [i, k] = maps.target_pairs[v];
    out.row(static_cast<Eigen::Index>(v)) = q.row(i) - qt.row(k);
  }
  return out;
}

// Consensus values A3 Q (rows q_i - q_j).
inline Eigen::MatrixX3d uav_differences(const ConstraintMaps& maps, const Eigen::MatrixX3d& q) {
  Eigen::MatrixX3d out(static_cast<Eigen::Index>(maps.uav_pairs.size()), 3);
  for (std::size_t v = 0; v < maps.uav_pairs.size(); ++v) {
    const auto [i, j] = maps.uav_pairs[v];
    out.row(static_cast<Eigen::Index>(v)) = q.row(i) - q.row(j);
  }
  return out;
}

// Euclidean projection onto {x : |x| >= radius}.
inline Vec3 project_min_norm(const Vec3& v, double radius) {
  if (!(radius > 0.0)) throw Error("project_min_norm: radius must be positive");
  const double n = v.norm();
  if (n == 0.0) throw ZeroVectorError("project_min_norm: zero vector has no projection direction");
  if (n >= radius) return v;
  // Rounding may leave the scaled norm a hair short; nudge it outward so the
  // result is a fixed point.
  Vec3 out = v * (radius / n);
  while (out.norm() < radius) out *= 1.0 + std::numeric_limits<double>::epsilon();
  return out;
}

namespace detail {
// A zero row has every point of the sphere as a minimizer; +x keeps the
// update deterministic.
inline Vec3 project_row(const Vec3& v, double radius) {
  try {
    return project_min_norm(v, radius);
  } catch (const ZeroVectorError&) {
    std::clog << "uavjam: warning: zero consensus row, projecting along +x\n";
    return Vec3(radius, 0.0, 0.0);
  }
}
}  // namespace detail

// B, C update: each row is the projection of its shifted consensus value.
// Multipliers are left untouched.
inline AuxState step1_update(const ConstraintMaps& maps, const Eigen::MatrixX3d& q, const Eigen::MatrixX3d& qt,
                             const AuxState& aux, const Scenario& s) {
  AuxState out = aux;
  const Eigen::MatrixX3d b_raw = target_differences(maps, q, qt) + aux.chi;
  for (Eigen::Index v = 0; v < b_raw.rows(); ++v) {
    out.B.row(v) = detail::project_row(b_raw.row(v).transpose(), s.min_target_sep()).transpose();
  }
  const Eigen::MatrixX3d c_raw = uav_differences(maps, q) + aux.mu;
  for (Eigen::Index v = 0; v < c_raw.rows(); ++v) {
    out.C.row(v) = detail::project_row(c_raw.row(v).transpose(), s.min_uav_sep()).transpose();
  }
  return out;
}

// Sum of the Frobenius norms of both consensus gaps.
inline double primal_residual(const ConstraintMaps& maps, const Eigen::MatrixX3d& q, const Eigen::MatrixX3d& qt,
                              const AuxState& aux) {
  const double rb = (target_differences(maps, q, qt) - aux.B).norm();
  const double rc = maps.uav_pairs.empty() ? 0.0 : (uav_differences(maps, q) - aux.C).norm();
  return rb + rc;
}

// Aux state at consensus with Q, projected to feasibility; zero multipliers.
inline AuxState initial_aux(const ConstraintMaps& maps, const Eigen::MatrixX3d& q, const Scenario& s) {
  AuxState zero;
  zero.B = Eigen::MatrixX3d::Zero(static_cast<Eigen::Index>(maps.target_pairs.size()), 3);
  zero.C = Eigen::MatrixX3d::Zero(static_cast<Eigen::Index>(maps.uav_pairs.size()), 3);
  zero.chi = zero.B;
  zero.mu = zero.C;
  return step1_update(maps, q, s.target_positions(), zero, s);
}

// ---------------------------------------------------------------------------
// Feasibility of a deployment with respect to the original constraints.

struct Feasibility {
  double max_x_excess = 0.0;          // max(x_i - x_max), <= 0 when inside
  double min_target_distance = std::numeric_limits<double>::infinity();
  double min_uav_distance = std::numeric_limits<double>::infinity();

  // rel_tol is the accepted relative shortfall on both distance bounds.
  bool ok(const Scenario& s, double rel_tol = 0.0) const {
    return max_x_excess <= 0.0 && min_target_distance >= s.min_target_sep() * (1.0 - rel_tol) &&
           min_uav_distance >= s.min_uav_sep() * (1.0 - rel_tol);
  }
};

inline Feasibility check_feasibility(const Scenario& s, const Eigen::MatrixX3d& q) {
  Feasibility f;
  f.max_x_excess = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    f.max_x_excess = std::max(f.max_x_excess, q(i, 0) - s.deploy_x_max());
    for (int k = 0; k < s.num_targets(); ++k) {
      f.min_target_distance = std::min(f.min_target_distance, (q.row(i) - s.target_positions().row(k)).norm());
    }
    for (Eigen::Index j = i + 1; j < q.rows(); ++j) {
      f.min_uav_distance = std::min(f.min_uav_distance, (q.row(i) - q.row(j)).norm());
    }
  }
  return f;
}

// Pushes UAVs apart (and away from targets) in the horizontal plane until the
// distance bounds hold exactly, then clamps x. Intended for the tiny
// consensus slack left by a converged run; large violations may not resolve
// and the result must be re-checked.
inline Eigen::MatrixX3d restore_feasibility(const Scenario& s, Eigen::MatrixX3d q, int sweeps = 50) {
  const double pad = 1.0 + 1e-12;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    bool moved = false;
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      for (int k = 0; k < s.num_targets(); ++k) {
        const Eigen::RowVector3d diff = q.row(i) - s.target_positions().row(k);
        const double dist = diff.norm();
        if (dist >= s.min_target_sep()) continue;
        const double dz = diff.z();
        const double need_h = std::sqrt(std::max(0.0, s.min_target_sep() * s.min_target_sep() - dz * dz)) * pad;
        Eigen::Vector2d h(diff.x(), diff.y());
        if (h.norm() == 0.0) h = Eigen::Vector2d(-1.0, 0.0);
        h *= need_h / h.norm();
        q(i, 0) = s.target_positions()(k, 0) + h.x();
        q(i, 1) = s.target_positions()(k, 1) + h.y();
        moved = true;
      }
      for (Eigen::Index j = i + 1; j < q.rows(); ++j) {
        Eigen::Vector2d h(q(i, 0) - q(j, 0), q(i, 1) - q(j, 1));
        const double dist = h.norm();
        if (dist >= s.min_uav_sep()) continue;
        if (dist == 0.0) h = Eigen::Vector2d(0.0, 1.0);
        const double shift = 0.5 * (s.min_uav_sep() * pad - dist);
        h.normalize();
        q(i, 0) += shift * h.x();
        q(i, 1) += shift * h.y();
        q(j, 0) -= shift * h.x();
        q(j, 1) -= shift * h.y();
        moved = true;
      }
    }
    for (Eigen::Index i = 0; i < q.rows(); ++i) q(i, 0) = std::min(q(i, 0), s.deploy_x_max());
    if (!moved) break;
  }
  return q;
}

}  // namespace uavjam
