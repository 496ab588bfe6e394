#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "uavjam/errors.hpp"
#include "uavjam/scenario.hpp"
#include "uavjam/signal_model.hpp"

namespace uavjam {

namespace detail {
inline constexpr double kClearance = 1.0 + 1e-9;

// Largest x <= x0 at which (x, y) clears every target by S_l.
inline double pull_back_x(const Scenario& s, double x0, double y) {
  const double need = s.min_target_sep() * kClearance;
  double x = x0;
  for (int pass = 0; pass < 2; ++pass) {
    for (int k = 0; k < s.num_targets(); ++k) {
      const Vec3 t = s.target(k);
      const double dz = s.altitude() - t.z();
      const double dy = y - t.y();
      const double h2 = need * need - dz * dz - dy * dy;
      if (h2 > 0.0 && std::abs(x - t.x()) < std::sqrt(h2)) x = std::min(x, t.x() - std::sqrt(h2));
    }
  }
  return x;
}
}  // namespace detail

// Point of the deployable region nearest to target k (horizontally) that
// keeps S_l from every target: straight back along -x from the target.
inline Eigen::Vector2d nearest_feasible_point(const Scenario& s, int k) {
  const Vec3 t = s.target(k);
  const double dz = s.altitude() - t.z();
  const double r_min = std::sqrt(std::max(0.0, s.min_target_sep() * s.min_target_sep() - dz * dz)) * detail::kClearance;
  const double x = std::min(s.deploy_x_max(), t.x() - r_min);
  return {detail::pull_back_x(s, x, t.y()), t.y()};
}

// Collision-free spots for a UAV that wants p: p itself if it is R_l away
// from every placed UAV, else the nearest clear shifts of p in y by multiples
// of R_l (both signs when both are clear), re-clearing targets after each
// shift.
inline std::vector<Eigen::Vector2d> separated_candidates(const Scenario& s, const Eigen::Vector2d& p,
                                                         const std::vector<Eigen::Vector2d>& placed) {
  const double r = s.min_uav_sep() * detail::kClearance;
  auto clear = [&](const Eigen::Vector2d& c) {
    return std::all_of(placed.begin(), placed.end(), [&](const Eigen::Vector2d& o) { return (c - o).norm() >= r; });
  };
  if (clear(p)) return {p};
  for (int n = 1; n < 10000; ++n) {
    std::vector<Eigen::Vector2d> out;
    for (int sign : {+1, -1}) {
      Eigen::Vector2d c(p.x(), p.y() + sign * n * r);
      c.x() = detail::pull_back_x(s, p.x(), c.y());
      if (clear(c)) out.push_back(c);
    }
    if (!out.empty()) return out;
  }
  throw Error("separated_candidates: no collision-free offset found");
}

// Indices of targets inside the Hard main lobe of a UAV at xy heading psi.
inline int lobe_coverage(const Scenario& s, const Eigen::Vector2d& xy, double psi) {
  const Vec3 uav(xy.x(), xy.y(), s.altitude());
  int n = 0;
  for (int k = 0; k < s.num_targets(); ++k) {
    if (boresight_offset(angles(uav, s.target(k)), psi) < s.half_beamwidth()) ++n;
  }
  return n;
}

inline double azimuth_to(const Scenario& s, const Eigen::Vector2d& xy, int k) {
  return std::atan2(s.target(k).y() - xy.y(), s.target(k).x() - xy.x());
}

// Heading that puts the most targets inside the Hard lobe; ties go to the
// heading closest to the assigned target.
inline double coverage_heading(const Scenario& s, const Eigen::Vector2d& xy, int assigned, int grid) {
  const double aim = azimuth_to(s, xy, assigned);
  int best_count = lobe_coverage(s, xy, aim);
  double best_psi = aim;
  double best_dev = 0.0;
  for (int g = 0; g < grid; ++g) {
    const double psi = -std::numbers::pi + (g + 1) * 2.0 * std::numbers::pi / grid;
    const int n = lobe_coverage(s, xy, psi);
    const double dev = std::abs(wrap_angle(psi - aim));
    if (n > best_count || (n == best_count && dev < best_dev)) {
      best_count = n;
      best_psi = psi;
      best_dev = dev;
    }
  }
  return wrap_angle(best_psi);
}

// Greedy placement: UAVs are added one at a time at the nearest feasible
// point of some target, with the antenna aimed at that target or at one of
// heading_grid evenly spaced headings. Each UAV takes the (spot, heading)
// pair that lowers the Hard average SINR of the partial swarm most; Smooth
// breaks ties, then the earlier candidate.
inline Deployment greedy_nearest_deployment(const Scenario& s, int heading_grid = 360) {
  const int m = s.num_uavs();
  std::vector<Eigen::Vector2d> placed;
  std::vector<double> headings;
  for (int i = 0; i < m; ++i) {
    const Scenario partial = s.with_num_uavs(i + 1);
    Eigen::MatrixX2d xy(i + 1, 2);
    Eigen::VectorXd az(i + 1);
    for (int j = 0; j < i; ++j) {
      xy.row(j) = placed[static_cast<std::size_t>(j)].transpose();
      az[j] = headings[static_cast<std::size_t>(j)];
    }
    double best_hard = std::numeric_limits<double>::infinity();
    double best_smooth = std::numeric_limits<double>::infinity();
    Eigen::Vector2d best_p = Eigen::Vector2d::Zero();
    double best_psi = 0.0;
    for (int k = 0; k < s.num_targets(); ++k) {
      for (const Eigen::Vector2d& p : separated_candidates(s, nearest_feasible_point(s, k), placed)) {
        for (int g = -1; g < heading_grid; ++g) {
          const double psi =
              g < 0 ? azimuth_to(s, p, k) : -std::numbers::pi + (g + 1) * 2.0 * std::numbers::pi / heading_grid;
          xy.row(i) = p.transpose();
          az[i] = psi;
          const Deployment d = make_deployment(partial, xy, az);
          const double hard = avg_sinr(partial, d, GainMode::Hard);
          const double smooth = avg_sinr(partial, d, GainMode::Smooth);
          if (hard < best_hard || (hard == best_hard && smooth < best_smooth)) {
            best_hard = hard;
            best_smooth = smooth;
            best_p = p;
            best_psi = psi;
          }
        }
      }
    }
    placed.push_back(best_p);
    headings.push_back(best_psi);
  }
  Eigen::MatrixX2d xy(m, 2);
  Eigen::VectorXd az(m);
  for (int i = 0; i < m; ++i) {
    xy.row(i) = placed[static_cast<std::size_t>(i)].transpose();
    az[i] = headings[static_cast<std::size_t>(i)];
  }
  return make_deployment(s, xy, az);
}

}  // namespace uavjam
