#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "uavjam/errors.hpp"

namespace uavjam {

using Vec3 = Eigen::Vector3d;

// Physical constants of the reference deployment.
namespace defaults {
inline constexpr double kAltitude = 600.0;             // m
inline constexpr double kJamPower = 4e-3;              // W
inline constexpr int kAntennaElements = 5;
inline constexpr double kHalfBeamwidthDeg = 15.0;      // 2*theta = 30 deg
inline constexpr double kTxPowerCtrl = 2e-2;           // W
inline constexpr double kRefGainDb = -30.0;
inline constexpr double kNoiseDbm = -110.0;
inline constexpr double kMinTargetSep = 500.0;         // m
inline constexpr double kMinUavSep = 50.0;             // m
inline constexpr double kDeployXMax = 1600.0;          // m
}  // namespace defaults

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double r = std::remainder(a, kTwoPi);  // [-pi, pi]
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

// Raw, unvalidated problem data. All quantities are linear-scale SI.
struct ScenarioParams {
  int num_uavs = 1;
  double altitude = defaults::kAltitude;
  Eigen::MatrixX3d target_positions;
  Vec3 control_center = Vec3::Zero();
  double tx_power_ctrl = defaults::kTxPowerCtrl;
  std::vector<double> jam_power;      // one per UAV
  std::vector<int> antenna_elements;  // one per UAV
  double half_beamwidth = deg_to_rad(defaults::kHalfBeamwidthDeg);
  double channel_ref_gain = db_to_linear(defaults::kRefGainDb);
  std::vector<double> noise_power;    // one per target
  double min_target_sep = defaults::kMinTargetSep;
  double min_uav_sep = defaults::kMinUavSep;
  double deploy_x_max = defaults::kDeployXMax;

  int num_targets() const { return static_cast<int>(target_positions.rows()); }

  // Reference constants for M UAVs against the given targets.
  static ScenarioParams with_defaults(int m, Eigen::MatrixX3d targets, const Vec3& center) {
    ScenarioParams p;
    p.num_uavs = m;
    p.target_positions = std::move(targets);
    p.control_center = center;
    const auto mm = static_cast<std::size_t>(std::max(m, 0));
    p.jam_power.assign(mm, defaults::kJamPower);
    p.antenna_elements.assign(mm, defaults::kAntennaElements);
    p.noise_power.assign(static_cast<std::size_t>(p.num_targets()), dbm_to_watts(defaults::kNoiseDbm));
    return p;
  }

  bool operator==(const ScenarioParams& o) const {
    return num_uavs == o.num_uavs && altitude == o.altitude &&
           target_positions.rows() == o.target_positions.rows() &&
           target_positions == o.target_positions && control_center == o.control_center &&
           tx_power_ctrl == o.tx_power_ctrl && jam_power == o.jam_power &&
           antenna_elements == o.antenna_elements && half_beamwidth == o.half_beamwidth &&
           channel_ref_gain == o.channel_ref_gain && noise_power == o.noise_power &&
           min_target_sep == o.min_target_sep && min_uav_sep == o.min_uav_sep &&
           deploy_x_max == o.deploy_x_max;
  }
};

// Returns every violated invariant (empty means valid).
inline std::vector<Violation> validate_scenario(const ScenarioParams& p) {
  std::vector<Violation> out;
  auto bad = [&](std::string field, std::string msg) { out.push_back({std::move(field), std::move(msg)}); };
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  auto non_negative = [](double v) { return std::isfinite(v) && v >= 0.0; };

  if (p.num_uavs < 1) bad("num_uavs", "num_uavs must be ≥ 1");
  if (p.num_targets() < 1) bad("num_targets", "num_targets must be ≥ 1");
  if (!positive(p.altitude)) bad("altitude", "altitude must be positive");
  if (!p.target_positions.allFinite()) bad("target_positions", "target_positions must be finite");
  if (!p.control_center.allFinite()) bad("control_center", "control_center must be finite");
  if (!positive(p.tx_power_ctrl)) bad("tx_power_ctrl", "tx_power_ctrl must be positive");

  const auto m = static_cast<std::size_t>(std::max(p.num_uavs, 0));
  if (p.jam_power.size() != m) {
    bad("jam_power", "jam_power must have one entry per UAV");
  } else if (!std::all_of(p.jam_power.begin(), p.jam_power.end(), non_negative)) {
    bad("jam_power", "jam_power must be non-negative");
  }
  if (p.antenna_elements.size() != m) {
    bad("antenna_elements", "antenna_elements must have one entry per UAV");
  } else if (!std::all_of(p.antenna_elements.begin(), p.antenna_elements.end(), [](int n) { return n >= 1; })) {
    bad("antenna_elements", "antenna_elements must be ≥ 1");
  }
  if (!(std::isfinite(p.half_beamwidth) && p.half_beamwidth > 0.0 && p.half_beamwidth < std::numbers::pi / 2)) {
    bad("half_beamwidth", "half_beamwidth must lie in (0, pi/2)");
  }
  if (!positive(p.channel_ref_gain)) bad("channel_ref_gain", "channel_ref_gain must be positive");
  if (p.noise_power.size() != static_cast<std::size_t>(std::max(p.num_targets(), 0))) {
    bad("noise_power", "noise_power must have one entry per target");
  } else if (!std::all_of(p.noise_power.begin(), p.noise_power.end(), positive)) {
    bad("noise_power", "noise_power must be positive");
  }
  if (!positive(p.min_target_sep)) bad("min_target_sep", "min_target_sep must be positive");
  if (!positive(p.min_uav_sep)) bad("min_uav_sep", "min_uav_sep must be positive");
  if (!std::isfinite(p.deploy_x_max)) bad("deploy_x_max", "deploy_x_max must be finite");

  if (p.target_positions.allFinite() && p.control_center.allFinite()) {
    for (int k = 0; k < p.num_targets(); ++k) {
      if ((p.target_positions.row(k).transpose() - p.control_center).norm() == 0.0) {
        bad("control_center", "control_center coincides with target " + std::to_string(k));
        break;
      }
    }
  }
  return out;
}

// Validated, immutable problem instance. The only way to obtain one is
// through create(), which rejects invalid parameters.
class Scenario {
 public:
  static Scenario create(ScenarioParams p) {
    auto violations = validate_scenario(p);
    if (!violations.empty()) throw ValidationError(std::move(violations));
    return Scenario(std::move(p));
  }

  const ScenarioParams& params() const { return p_; }

  int num_uavs() const { return p_.num_uavs; }
  int num_targets() const { return p_.num_targets(); }
  double altitude() const { return p_.altitude; }
  const Eigen::MatrixX3d& target_positions() const { return p_.target_positions; }
  Vec3 target(int k) const { return p_.target_positions.row(k).transpose(); }
  const Vec3& control_center() const { return p_.control_center; }
  double tx_power_ctrl() const { return p_.tx_power_ctrl; }
  double jam_power(int i) const { return p_.jam_power[static_cast<std::size_t>(i)]; }
  int antenna_elements(int i) const { return p_.antenna_elements[static_cast<std::size_t>(i)]; }
  double half_beamwidth() const { return p_.half_beamwidth; }
  double channel_ref_gain() const { return p_.channel_ref_gain; }
  double noise_power(int k) const { return p_.noise_power[static_cast<std::size_t>(k)]; }
  double min_target_sep() const { return p_.min_target_sep; }
  double min_uav_sep() const { return p_.min_uav_sep; }
  double deploy_x_max() const { return p_.deploy_x_max; }

  // Same physical setup with a different swarm size (per-UAV fields are
  // filled from UAV 0).
  Scenario with_num_uavs(int m) const {
    ScenarioParams q = p_;
    q.num_uavs = m;
    const auto mm = static_cast<std::size_t>(std::max(m, 0));
    q.jam_power.assign(mm, p_.jam_power.front());
    q.antenna_elements.assign(mm, p_.antenna_elements.front());
    return create(std::move(q));
  }

  bool operator==(const Scenario& o) const { return p_ == o.p_; }

 private:
  explicit Scenario(ScenarioParams p) : p_(std::move(p)) {}
  ScenarioParams p_;
};

// Decision variables: UAV positions (altitude pinned) and antenna azimuths.
struct Deployment {
  Eigen::MatrixX3d positions;
  Eigen::VectorXd azimuths;

  int size() const { return static_cast<int>(positions.rows()); }
  Eigen::MatrixX2d horizontal() const { return positions.leftCols<2>(); }

  bool operator==(const Deployment& o) const {
    return positions.rows() == o.positions.rows() && azimuths.size() == o.azimuths.size() &&
           positions == o.positions && azimuths == o.azimuths;
  }
};

// Builds a deployment at the scenario altitude with wrapped azimuths.
inline Deployment make_deployment(const Scenario& s, const Eigen::MatrixX2d& xy, const Eigen::VectorXd& psi) {
  if (xy.rows() != psi.size()) throw Error("make_deployment: position/azimuth count mismatch");
  Deployment d;
  d.positions.resize(xy.rows(), 3);
  d.positions.leftCols<2>() = xy;
  d.positions.col(2).setConstant(s.altitude());
  d.azimuths = psi.unaryExpr([](double a) { return wrap_angle(a); });
  return d;
}

// Shape invariants only: altitude exact and azimuths in (-pi, pi].
inline bool deployment_well_formed(const Scenario& s, const Deployment& d) {
  if (d.size() != s.num_uavs() || d.azimuths.size() != d.size()) return false;
  for (int i = 0; i < d.size(); ++i) {
    if (d.positions(i, 2) != s.altitude()) return false;
    const double a = d.azimuths[i];
    if (!(a > -std::numbers::pi && a <= std::numbers::pi)) return false;
  }
  return d.positions.allFinite();
}

// ---------------------------------------------------------------------------
// Scenario documents (JSON).
//
//   uavs           {count, altitude_m, jam_power_w, antenna_elements,
//                   half_beamwidth_deg | half_beamwidth_rad}
//   targets        {positions_m: [[x,y,z], ...]}
//   control_center {position_m, tx_power_w}
//   channel        {ref_gain_db | ref_gain_linear, noise_dbm | noise_w}
//   geometry       {min_target_sep_m, min_uav_sep_m, deploy_x_max_m}
//
// jam_power_w, antenna_elements, noise_dbm and noise_w accept a scalar
// (uniform) or an array. The linear/radian keys exist so that serialization
// round-trips exactly.

namespace detail {

using nlohmann::json;

inline const json* find(const json& obj, std::string_view key) {
  auto it = obj.find(std::string(key));
  return it == obj.end() ? nullptr : &*it;
}

inline double get_number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ParseError("field '" + field + "' must be a number", 0, field);
  return v.get<double>();
}

inline const json& get_object(const json& root, const std::string& key, bool required) {
  static const json kEmpty = json::object();
  const json* v = find(root, key);
  if (v == nullptr) {
    if (required) throw ParseError("missing section '" + key + "'", 0, key);
    return kEmpty;
  }
  if (!v->is_object()) throw ParseError("section '" + key + "' must be an object", 0, key);
  return *v;
}

inline double opt_number(const json& sec, const std::string& sec_name, const std::string& key, double fallback) {
  const json* v = find(sec, key);
  return v ? get_number(*v, sec_name + "." + key) : fallback;
}

inline Vec3 get_vec3(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 3) throw ParseError("field '" + field + "' must be [x, y, z]", 0, field);
  return {get_number(v[0], field), get_number(v[1], field), get_number(v[2], field)};
}

template <typename T>
std::vector<T> scalar_or_array(const json& v, const std::string& field, std::size_t n) {
  if (v.is_array()) {
    std::vector<T> out;
    for (const auto& e : v) out.push_back(static_cast<T>(get_number(e, field)));
    return out;
  }
  return std::vector<T>(n, static_cast<T>(get_number(v, field)));
}

inline std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace detail

// Parses and validates a scenario document.
inline Scenario parse_scenario(std::string_view text) {
  using detail::json;
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto line = detail::line_of(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("malformed scenario document at line " + std::to_string(line) + ": " + e.what(), line);
  }
  if (!root.is_object()) throw ParseError("scenario document must be an object", 1);

  ScenarioParams p;
  const json& uavs = detail::get_object(root, "uavs", true);
  const json* count = detail::find(uavs, "count");
  if (count == nullptr) throw ParseError("missing field 'uavs.count'", 0, "uavs.count");
  if (!count->is_number_integer()) throw ParseError("field 'uavs.count' must be an integer", 0, "uavs.count");
  p.num_uavs = count->get<int>();
  const auto m = static_cast<std::size_t>(std::max(p.num_uavs, 0));
  p.altitude = detail::opt_number(uavs, "uavs", "altitude_m", defaults::kAltitude);
  p.jam_power = detail::find(uavs, "jam_power_w")
                    ? detail::scalar_or_array<double>(uavs["jam_power_w"], "uavs.jam_power_w", m)
                    : std::vector<double>(m, defaults::kJamPower);
  p.antenna_elements = detail::find(uavs, "antenna_elements")
                           ? detail::scalar_or_array<int>(uavs["antenna_elements"], "uavs.antenna_elements", m)
                           : std::vector<int>(m, defaults::kAntennaElements);
  const bool has_deg = detail::find(uavs, "half_beamwidth_deg") != nullptr;
  const bool has_rad = detail::find(uavs, "half_beamwidth_rad") != nullptr;
  if (has_deg && has_rad) throw ParseError("give only one of half_beamwidth_deg / half_beamwidth_rad", 0, "uavs");
  if (has_rad) {
    p.half_beamwidth = detail::get_number(uavs["half_beamwidth_rad"], "uavs.half_beamwidth_rad");
  } else {
    p.half_beamwidth = deg_to_rad(detail::opt_number(uavs, "uavs", "half_beamwidth_deg", defaults::kHalfBeamwidthDeg));
  }

  const json& targets = detail::get_object(root, "targets", true);
  const json* pos = detail::find(targets, "positions_m");
  if (pos == nullptr || !pos->is_array()) {
    throw ParseError("field 'targets.positions_m' must be an array of [x, y, z]", 0, "targets.positions_m");
  }
  p.target_positions.resize(static_cast<Eigen::Index>(pos->size()), 3);
  for (std::size_t k = 0; k < pos->size(); ++k) {
    p.target_positions.row(static_cast<Eigen::Index>(k)) =
        detail::get_vec3((*pos)[k], "targets.positions_m[" + std::to_string(k) + "]").transpose();
  }
  const auto kk = pos->size();

  const json& cc = detail::get_object(root, "control_center", true);
  const json* cpos = detail::find(cc, "position_m");
  if (cpos == nullptr) throw ParseError("missing field 'control_center.position_m'", 0, "control_center.position_m");
  p.control_center = detail::get_vec3(*cpos, "control_center.position_m");
  p.tx_power_ctrl = detail::opt_number(cc, "control_center", "tx_power_w", defaults::kTxPowerCtrl);

  const json& ch = detail::get_object(root, "channel", false);
  if (detail::find(ch, "ref_gain_db") && detail::find(ch, "ref_gain_linear")) {
    throw ParseError("give only one of ref_gain_db / ref_gain_linear", 0, "channel");
  }
  p.channel_ref_gain = detail::find(ch, "ref_gain_linear")
                           ? detail::get_number(ch["ref_gain_linear"], "channel.ref_gain_linear")
                           : db_to_linear(detail::opt_number(ch, "channel", "ref_gain_db", defaults::kRefGainDb));
  if (detail::find(ch, "noise_dbm") && detail::find(ch, "noise_w")) {
    throw ParseError("give only one of noise_dbm / noise_w", 0, "channel");
  }
  if (detail::find(ch, "noise_w")) {
    p.noise_power = detail::scalar_or_array<double>(ch["noise_w"], "channel.noise_w", kk);
  } else {
    std::vector<double> dbm = detail::find(ch, "noise_dbm")
                                  ? detail::scalar_or_array<double>(ch["noise_dbm"], "channel.noise_dbm", kk)
                                  : std::vector<double>(kk, defaults::kNoiseDbm);
    for (double& v : dbm) v = dbm_to_watts(v);
    p.noise_power = std::move(dbm);
  }

  const json& geo = detail::get_object(root, "geometry", false);
  p.min_target_sep = detail::opt_number(geo, "geometry", "min_target_sep_m", defaults::kMinTargetSep);
  p.min_uav_sep = detail::opt_number(geo, "geometry", "min_uav_sep_m", defaults::kMinUavSep);
  p.deploy_x_max = detail::opt_number(geo, "geometry", "deploy_x_max_m", defaults::kDeployXMax);

  return Scenario::create(std::move(p));
}

inline nlohmann::json scenario_to_json(const Scenario& s) {
  using nlohmann::json;
  const auto& p = s.params();
  json targets = json::array();
  for (int k = 0; k < p.num_targets(); ++k) {
    targets.push_back({p.target_positions(k, 0), p.target_positions(k, 1), p.target_positions(k, 2)});
  }
  return json{
      {"uavs",
       {{"count", p.num_uavs},
        {"altitude_m", p.altitude},
        {"jam_power_w", p.jam_power},
        {"antenna_elements", p.antenna_elements},
        {"half_beamwidth_rad", p.half_beamwidth}}},
      {"targets", {{"positions_m", targets}}},
      {"control_center",
       {{"position_m", {p.control_center.x(), p.control_center.y(), p.control_center.z()}},
        {"tx_power_w", p.tx_power_ctrl}}},
      {"channel", {{"ref_gain_linear", p.channel_ref_gain}, {"noise_w", p.noise_power}}},
      {"geometry",
       {{"min_target_sep_m", p.min_target_sep},
        {"min_uav_sep_m", p.min_uav_sep},
        {"deploy_x_max_m", p.deploy_x_max}}},
  };
}

inline std::string serialize_scenario(const Scenario& s) { return scenario_to_json(s).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Seeded random instances.

// Axis-aligned box (ground plane, z = target_z) from which targets are drawn.
// It must lie strictly beyond the deployable half-plane.
struct TargetRegion {
  double x_min = defaults::kDeployXMax + 2600.0;
  double x_max = defaults::kDeployXMax + 4200.0;
  double y_min = -1200.0;
  double y_max = 1200.0;
  double target_z = 0.0;
  double center_behind = 1000.0;  // control center offset past the farthest target
  double center_z = 20.0;
};

namespace detail {
// splitmix64: portable, so instances are identical across standard libraries.
struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
};
}  // namespace detail

// Targets depend only on (seed, k, region), so the same seed gives the same
// targets for every swarm size m.
inline Scenario random_scenario(std::uint64_t seed, int m, int k, const TargetRegion& region = {}) {
  if (m < 1 || k < 1) throw Error("random_scenario: m and k must be ≥ 1");
  if (!(region.x_min < region.x_max) || !(region.y_min < region.y_max)) {
    throw Error("random_scenario: empty or inverted target region");
  }
  if (region.x_min <= defaults::kDeployXMax) {
    throw Error("random_scenario: target region must lie beyond the deployable half-plane");
  }
  detail::SplitMix64 rng{seed};
  Eigen::MatrixX3d targets(k, 3);
  for (int t = 0; t < k; ++t) {
    targets(t, 0) = rng.uniform(region.x_min, region.x_max);
    targets(t, 1) = rng.uniform(region.y_min, region.y_max);
    targets(t, 2) = region.target_z;
  }
  const Vec3 center(targets.col(0).maxCoeff() + region.center_behind, targets.col(1).mean(), region.center_z);
  return Scenario::create(ScenarioParams::with_defaults(m, std::move(targets), center));
}

}  // namespace uavjam
