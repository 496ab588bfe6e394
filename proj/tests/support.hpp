#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "uavjam/uavjam.hpp"

namespace testsupport {

using uavjam::Deployment;
using uavjam::Scenario;

// Independent reference evaluation of the average SINR, written straight from
// the model formulas (acos form of the boresight offset, no shared helpers).
inline double reference_avg_sinr(const Scenario& s, const Deployment& d, bool hard) {
  const double theta = s.half_beamwidth();
  double sum = 0.0;
  for (int k = 0; k < s.num_targets(); ++k) {
    const Eigen::Vector3d t = s.target_positions().row(k).transpose();
    const double ds2 = (t - s.control_center()).squaredNorm();
    const double signal = s.tx_power_ctrl() * s.channel_ref_gain() / ds2;
    double jam = 0.0;
    for (int i = 0; i < d.size(); ++i) {
      const Eigen::Vector3d q = d.positions.row(i).transpose();
      const double dx = t.x() - q.x();
      const double dy = t.y() - q.y();
      const double dz = t.z() - q.z();
      const double phi = std::atan2(dy, dx);
      const double pitch = std::atan2(dz, std::hypot(dx, dy));
      const double c = std::clamp(std::cos(phi - d.azimuths[i]) * std::cos(pitch), -1.0, 1.0);
      const double alpha = std::acos(c);
      double g = std::exp(-alpha * alpha / (2.0 * theta * theta));
      if (hard && !(alpha < theta)) g = 0.0;
      const double d2 = dx * dx + dy * dy + dz * dz;
      jam += s.channel_ref_gain() * s.jam_power(i) * s.antenna_elements(i) * g / d2;
    }
    sum += signal / (jam + s.noise_power(k));
  }
  return sum / s.num_targets();
}

// Random deployment in the deployable region within a few km of the targets,
// redrawn until it clears every target by S_l and every other UAV by R_l.
// With aimed = true each heading points within 0.3 rad of a random target, so
// lobes actually touch targets and gradients are well above rounding noise.
inline Deployment random_feasible_deployment(const Scenario& s, std::mt19937_64& rng, bool aimed = false) {
  std::uniform_real_distribution<double> ux(s.deploy_x_max() - 2500.0, s.deploy_x_max());
  std::uniform_real_distribution<double> uy(-1500.0, 1500.0);
  std::uniform_real_distribution<double> ua(-3.14159, 3.14159);
  const int m = s.num_uavs();
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Eigen::MatrixX2d xy(m, 2);
    Eigen::VectorXd psi(m);
    for (int i = 0; i < m; ++i) {
      xy(i, 0) = ux(rng);
      xy(i, 1) = uy(rng);
      psi[i] = ua(rng);
      if (aimed) {
        std::uniform_int_distribution<int> pick(0, s.num_targets() - 1);
        const Eigen::Vector3d t = s.target_positions().row(pick(rng)).transpose();
        psi[i] = std::atan2(t.y() - xy(i, 1), t.x() - xy(i, 0)) + 0.3 * psi[i] / 3.14159;
      }
    }
    Deployment d = uavjam::make_deployment(s, xy, psi);
    if (uavjam::check_feasibility(s, d.positions).ok(s)) return d;
  }
  throw uavjam::Error("could not draw a feasible deployment");
}

// Scenario with targets close enough that some lobes land on targets.
inline Scenario near_scenario(std::uint64_t seed, int m, int k) {
  uavjam::TargetRegion r;
  r.x_min = 1700.0;
  r.x_max = 4500.0;
  return uavjam::random_scenario(seed, m, k, r);
}

// Numerical projection onto {x : |x| >= r}: keep v if it is outside,
// otherwise dense sampling of the sphere by squared distance, then
// pattern-search refinement of the first-order optimality condition (no
// tangential component of v at the optimum, measured by |v x u|), which stays
// well conditioned where the squared distance is flat.
inline Eigen::Vector3d numerical_exterior_projection(const Eigen::Vector3d& v, double r) {
  if (v.norm() >= r) return v;
  const auto point = [r](double th, double ph) {
    return Eigen::Vector3d(r * std::sin(th) * std::cos(ph), r * std::sin(th) * std::sin(ph), r * std::cos(th));
  };
  const auto cost = [&](double th, double ph) { return (point(th, ph) - v).squaredNorm(); };
  const int n = 4000;
  const double golden = 3.0 - std::sqrt(5.0);
  double best_th = 0.0, best_ph = 0.0, best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double th = std::acos(z);
    const double ph = 3.14159265358979323846 * golden * i;
    const double c = cost(th, ph);
    if (c < best) {
      best = c;
      best_th = th;
      best_ph = ph;
    }
  }
  const auto unit = [&](double th, double ph) { return Eigen::Vector3d(point(th, ph) / r); };
  best = v.cross(unit(best_th, best_ph)).norm();
  for (double step = 0.1; step > 1e-17; step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      const double cand[4][2] = {{step, 0}, {-step, 0}, {0, step}, {0, -step}};
      for (const auto& c : cand) {
        const double val = v.cross(unit(best_th + c[0], best_ph + c[1])).norm();
        if (val < best) {
          best = val;
          best_th += c[0];
          best_ph += c[1];
          improved = true;
        }
      }
    }
  }
  return point(best_th, best_ph);
}

inline double rel_err(double a, double b, double floor = 1e-300) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace testsupport
