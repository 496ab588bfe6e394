#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>
#include <numbers>
#include <optional>

#include <Eigen/Core>

#include "uavjam/errors.hpp"
#include "uavjam/scenario.hpp"

namespace uavjam {

// Hard: Gaussian main lobe cut to zero outside (-theta, theta).
// Smooth: the same Gaussian without the cutoff (used for gradients).
enum class GainMode { Hard, Smooth };

struct AngleGeometry {
  double azimuth_to_target = 0.0;  // from +x, counterclockwise
  double pitch_to_target = 0.0;    // negative when the target is below
  std::optional<double> boresight_offset;
};

// Azimuth is atan2(dy, dx); pitch is atan2(dz, horizontal distance). A target
// directly below (or above) the UAV gets azimuth 0 and pitch -pi/2 (+pi/2).
inline AngleGeometry angles(const Vec3& uav, const Vec3& target) {
  const Vec3 d = target - uav;
  const double horiz = std::hypot(d.x(), d.y());
  if (horiz == 0.0 && d.z() == 0.0) throw GeometryError("angles: UAV and target coincide");
  AngleGeometry g;
  g.azimuth_to_target = horiz == 0.0 ? 0.0 : std::atan2(d.y(), d.x());
  g.pitch_to_target = std::atan2(d.z(), horiz);
  return g;
}

inline double boresight_offset(const AngleGeometry& g, double heading) {
  const double c = std::cos(g.azimuth_to_target - heading) * std::cos(g.pitch_to_target);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

// Linear gain exp(-a^2 / (2 theta^2)); Hard mode zeroes it for a >= theta.
inline double gain(double offset, double half_beamwidth, GainMode mode) {
  if (mode == GainMode::Hard && !(std::abs(offset) < half_beamwidth)) return 0.0;
  return std::exp(-offset * offset / (2.0 * half_beamwidth * half_beamwidth));
}

// Free-space gain ref_gain / |a - b|^2.
inline double channel_gain(const Vec3& a, const Vec3& b, double ref_gain) {
  const double d2 = (a - b).squaredNorm();
  if (d2 == 0.0) throw GeometryError("channel_gain: coincident endpoints");
  return ref_gain / d2;
}

inline double channel_gain_ctrl(const Vec3& target, const Scenario& s) {
  return channel_gain(target, s.control_center(), s.channel_ref_gain());
}

namespace detail {

// Per (UAV, target) quantities. With u = (cos psi, sin psi, 0) and
// delta = target - uav, the boresight offset is the angle between u and
// delta: cos = n/d, sin = sqrt(dz^2 + w^2)/d with n = u.delta_h and
// w = u x delta_h. This equals acos(cos(phi - psi) cos(pitch)) but stays
// accurate near 0 and pi.
struct PairTerms {
  double jam = 0.0;         // beta0 P N G / d^2
  double djam_dx = 0.0;     // w.r.t. UAV x
  double djam_dy = 0.0;
  double djam_dpsi = 0.0;
};

inline PairTerms pair_terms(const Scenario& s, const Vec3& uav, double psi, int i, int k, GainMode mode,
                            bool want_grad) {
  const Vec3 tgt = s.target(k);
  const double dx = tgt.x() - uav.x();
  const double dy = tgt.y() - uav.y();
  const double dz = tgt.z() - uav.z();
  const double d2 = dx * dx + dy * dy + dz * dz;
  if (d2 == 0.0) throw GeometryError("UAV " + std::to_string(i) + " coincides with target " + std::to_string(k));
  const double d = std::sqrt(d2);
  const double cp = std::cos(psi);
  const double sp = std::sin(psi);
  const double n = cp * dx + sp * dy;
  const double w = cp * dy - sp * dx;
  const double sin_num = std::sqrt(dz * dz + w * w);
  const double alpha = std::atan2(sin_num, n);
  const double theta = s.half_beamwidth();
  const double g = gain(alpha, theta, mode);
  const double kappa = s.channel_ref_gain() * s.jam_power(i) * s.antenna_elements(i);

  PairTerms t;
  t.jam = kappa * g / d2;
  if (!want_grad || g == 0.0) return t;

  // dG/dc with c = cos(alpha): G * alpha / (theta^2 sin(alpha)).
  const double sin_a = sin_num / d;
  double ratio;  // alpha / sin(alpha)
  if (sin_a > 1e-300) {
    ratio = alpha / sin_a;
  } else {
    ratio = alpha < 1.0 ? 1.0 : 0.0;
  }
  const double dg_dc = g * ratio / (theta * theta);
  const double d3 = d2 * d;
  const double dc_dx = -cp / d + n * dx / d3;
  const double dc_dy = -sp / d + n * dy / d3;
  const double dc_dpsi = w / d;
  const double d4 = d2 * d2;
  t.djam_dx = kappa * (dg_dc * dc_dx / d2 + g * 2.0 * dx / d4);
  t.djam_dy = kappa * (dg_dc * dc_dy / d2 + g * 2.0 * dy / d4);
  t.djam_dpsi = kappa * dg_dc * dc_dpsi / d2;
  return t;
}

inline void require_shape(const Scenario& s, const Deployment& d) {
  if (d.size() != s.num_uavs() || d.azimuths.size() != d.size()) {
    throw Error("deployment size does not match scenario");
  }
}

}  // namespace detail

inline double sinr_target(const Scenario& s, const Deployment& d, int k, GainMode mode) {
  detail::require_shape(s, d);
  const double signal = s.tx_power_ctrl() * channel_gain_ctrl(s.target(k), s);
  double jam = 0.0;
  for (int i = 0; i < d.size(); ++i) {
    jam += detail::pair_terms(s, d.positions.row(i).transpose(), d.azimuths[i], i, k, mode, false).jam;
  }
  return signal / (jam + s.noise_power(k));
}

inline Eigen::VectorXd sinr_per_target(const Scenario& s, const Deployment& d, GainMode mode) {
  Eigen::VectorXd out(s.num_targets());
  for (int k = 0; k < s.num_targets(); ++k) out[k] = sinr_target(s, d, k, mode);
  return out;
}

inline double avg_sinr(const Scenario& s, const Deployment& d, GainMode mode) {
  double sum = 0.0;
  for (int k = 0; k < s.num_targets(); ++k) sum += sinr_target(s, d, k, mode);
  return sum / s.num_targets();
}

// Average SINR together with its gradients (Smooth mode only).
struct SinrEvaluation {
  double value = 0.0;
  Eigen::MatrixX2d grad_q;   // d gamma / d(x_i, y_i)
  Eigen::VectorXd grad_psi;  // d gamma / d psi_i
};

namespace detail {
// Also accepts Hard mode, where the gradient is the almost-everywhere one
// (zero outside the lobe, jumps at its edge ignored).
inline SinrEvaluation evaluate_avg_sinr_ae(const Scenario& s, const Deployment& d, GainMode mode) {
  require_shape(s, d);
  const int m = d.size();
  const int kk = s.num_targets();
  SinrEvaluation ev;
  ev.grad_q = Eigen::MatrixX2d::Zero(m, 2);
  ev.grad_psi = Eigen::VectorXd::Zero(m);
  std::vector<PairTerms> terms(static_cast<std::size_t>(m));
  for (int k = 0; k < kk; ++k) {
    const double signal = s.tx_power_ctrl() * channel_gain_ctrl(s.target(k), s);
    double den = s.noise_power(k);
    for (int i = 0; i < m; ++i) {
      terms[static_cast<std::size_t>(i)] =
          pair_terms(s, d.positions.row(i).transpose(), d.azimuths[i], i, k, mode, true);
      den += terms[static_cast<std::size_t>(i)].jam;
    }
    ev.value += signal / den;
    const double dgamma_djam = -signal / (den * den) / kk;
    for (int i = 0; i < m; ++i) {
      const auto& t = terms[static_cast<std::size_t>(i)];
      ev.grad_q(i, 0) += dgamma_djam * t.djam_dx;
      ev.grad_q(i, 1) += dgamma_djam * t.djam_dy;
      ev.grad_psi[i] += dgamma_djam * t.djam_dpsi;
    }
  }
  ev.value /= kk;
  return ev;
}
}  // namespace detail

inline SinrEvaluation evaluate_avg_sinr(const Scenario& s, const Deployment& d, GainMode mode) {
  if (mode != GainMode::Smooth) throw UnsupportedModeError("gradients require GainMode::Smooth");
  return detail::evaluate_avg_sinr_ae(s, d, mode);
}

inline Eigen::MatrixX2d grad_avg_sinr_q(const Scenario& s, const Deployment& d, GainMode mode) {
  return evaluate_avg_sinr(s, d, mode).grad_q;
}

inline Eigen::VectorXd grad_avg_sinr_psi(const Scenario& s, const Deployment& d, GainMode mode) {
  return evaluate_avg_sinr(s, d, mode).grad_psi;
}

}  // namespace uavjam
