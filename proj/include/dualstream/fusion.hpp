#ifndef DUALSTREAM_FUSION_HPP
#define DUALSTREAM_FUSION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "autoencoder/model.hpp"
#include "error.hpp"
#include "physics.hpp"
#include "telemetry.hpp"
#include "text.hpp"

namespace dualstream::fusion {

enum class Channel : std::size_t { AMl = 0, ESusp, ELat, WDrive, EBrake };
inline constexpr std::size_t kChannelCount = 5;
inline constexpr std::array<Channel, kChannelCount> kAllChannels = {
    Channel::AMl, Channel::ESusp, Channel::ELat, Channel::WDrive, Channel::EBrake};
inline constexpr std::array<Channel, 4> kProxyChannels = {Channel::ESusp, Channel::ELat,
                                                          Channel::WDrive, Channel::EBrake};

inline std::string_view to_string(Channel c) {
  switch (c) {
  case Channel::AMl: return "a_ml";
  case Channel::ESusp: return "e_susp";
  case Channel::ELat: return "e_lat";
  case Channel::WDrive: return "w_drive";
  case Channel::EBrake: return "e_brake";
  }
  return "?";
}

inline Channel channel_from_string(std::string_view name) {
  for (auto c : kAllChannels)
    if (to_string(c) == name) return c;
  throw ContractError("unknown channel '" + std::string(name) + "'");
}

inline double proxy_value(const physics::PhysicsProxies& p, Channel c) {
  switch (c) {
  case Channel::ESusp: return p.e_susp;
  case Channel::ELat: return p.e_lat;
  case Channel::WDrive: return p.w_drive;
  case Channel::EBrake: return p.e_brake;
  case Channel::AMl: break;
  }
  throw ContractError("a_ml is not a physics proxy channel");
}

/// Raw outputs of both streams for one window.
struct StreamOutputs {
  std::string mission_id;
  std::size_t window_idx = 0;
  double a_ml = 0.0;
  physics::PhysicsProxies proxies;

  double value(Channel c) const { return c == Channel::AMl ? a_ml : proxy_value(proxies, c); }
};

struct ChannelRange {
  double min = 0.0;
  double max = 0.0;
  bool degenerate = false;

  static ChannelRange from_values(std::span<const double> values) {
    if (values.empty()) throw CalibrationError("no values to calibrate");
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return {*lo, *hi, !(*hi > *lo)};
  }
};

struct Calibration {
  std::array<ChannelRange, kChannelCount> ranges{};
  std::size_t window_count = 0;
  std::size_t mission_count = 0;

  const ChannelRange& range(Channel c) const { return ranges[static_cast<std::size_t>(c)]; }
  ChannelRange& range(Channel c) { return ranges[static_cast<std::size_t>(c)]; }
};

inline constexpr std::size_t kMinCalibrationWindows = 100;
inline constexpr std::size_t kMinCalibrationMissions = 2;

/// Per-channel min/max over the calibration windows.
inline Calibration calibrate(std::span<const StreamOutputs> windows) {
  std::set<std::string> missions;
  for (const auto& w : windows) missions.insert(w.mission_id);
  if (windows.size() < kMinCalibrationWindows)
    throw CalibrationError("calibration needs >= " + std::to_string(kMinCalibrationWindows) +
                           " windows, got " + std::to_string(windows.size()));
  if (missions.size() < kMinCalibrationMissions)
    throw CalibrationError("calibration needs windows from >= 2 missions");
  Calibration cal;
  cal.window_count = windows.size();
  cal.mission_count = missions.size();
  std::vector<double> values(windows.size());
  for (auto c : kAllChannels) {
    for (std::size_t i = 0; i < windows.size(); ++i) values[i] = windows[i].value(c);
    cal.range(c) = ChannelRange::from_values(values);
  }
  return cal;
}

/// Min-max scaling clamped to [0, 1]; a degenerate channel maps to 0.
inline double normalize(double value, const ChannelRange& r) {
  if (r.degenerate) return 0.0;
  if (std::isnan(value)) throw ContractError("cannot normalize NaN");
  return std::clamp((value - r.min) / (r.max - r.min), 0.0, 1.0);
}

inline double normalize(double value, Channel c, const Calibration& cal) {
  return normalize(value, cal.range(c));
}

inline double normalize(double value, std::string_view channel, const Calibration& cal) {
  return normalize(value, channel_from_string(channel), cal);
}

enum class Aggregate { Max, Mean };

/// W_Phys: worst normalized proxy channel (or their mean, for sensitivity runs).
inline double aggregate_physics(const physics::PhysicsProxies& p, const Calibration& cal,
                                Aggregate mode = Aggregate::Max) {
  double max = 0.0;
  double sum = 0.0;
  for (auto c : kProxyChannels) {
    const double n = normalize(proxy_value(p, c), c, cal);
    max = std::max(max, n);
    sum += n;
  }
  return mode == Aggregate::Max ? max : sum / static_cast<double>(kProxyChannels.size());
}

/// Max-pooling fusion of the two normalized stream scores.
inline double fuse(double a_ml_norm, double w_phys_norm) {
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(a_ml_norm) || !in_unit(w_phys_norm))
    throw ContractError("fuse: inputs must lie in [0, 1]");
  return std::max(a_ml_norm, w_phys_norm);
}

enum class Quadrant { NormalMonitoring, DrivetrainFatigue, SuspensionChassisRisk, ImmediateInspection };

inline std::string_view to_string(Quadrant q) {
  switch (q) {
  case Quadrant::NormalMonitoring: return "NormalMonitoring";
  case Quadrant::DrivetrainFatigue: return "DrivetrainFatigue";
  case Quadrant::SuspensionChassisRisk: return "SuspensionChassisRisk";
  case Quadrant::ImmediateInspection: return "ImmediateInspection";
  }
  return "?";
}

inline Quadrant quadrant_from_string(std::string_view s) {
  for (auto q : {Quadrant::NormalMonitoring, Quadrant::DrivetrainFatigue,
                 Quadrant::SuspensionChassisRisk, Quadrant::ImmediateInspection})
    if (to_string(q) == s) return q;
  throw ContractError("unknown quadrant '" + std::string(s) + "'");
}

struct Thresholds {
  double ml = 0.5;
  double phys = 0.5;

  void validate() const {
    if (!(ml > 0.0 && ml < 1.0 && phys > 0.0 && phys < 1.0))
      throw InvalidParams("thresholds must lie in (0, 1)");
  }
};

/// Decision matrix: (ML low, phys low) normal; (low, high) drivetrain fatigue;
/// (high, low) suspension/chassis risk; (high, high) immediate inspection.
inline Quadrant classify(double a_ml_norm, double w_phys_norm, Thresholds t = {}) {
  const bool ml_high = a_ml_norm >= t.ml;
  const bool phys_high = w_phys_norm >= t.phys;
  if (ml_high) return phys_high ? Quadrant::ImmediateInspection : Quadrant::SuspensionChassisRisk;
  return phys_high ? Quadrant::DrivetrainFatigue : Quadrant::NormalMonitoring;
}

struct HealthVector {
  std::string mission_id;
  std::size_t window_idx = 0;
  double a_ml_raw = 0.0;
  physics::PhysicsProxies proxies;
  double a_ml_norm = 0.0;
  double w_phys_norm = 0.0;
  double score = 0.0;
  Quadrant quadrant = Quadrant::NormalMonitoring;
};

struct FusionOptions {
  Thresholds thresholds;
  Aggregate aggregate = Aggregate::Max;
};

/// Normalizes, fuses and classifies already-computed stream outputs.
inline HealthVector fuse_outputs(const StreamOutputs& s, const Calibration& cal,
                                 const FusionOptions& opt = {}) {
  HealthVector hv;
  hv.mission_id = s.mission_id;
  hv.window_idx = s.window_idx;
  hv.a_ml_raw = s.a_ml;
  hv.proxies = s.proxies;
  hv.a_ml_norm = normalize(s.a_ml, Channel::AMl, cal);
  hv.w_phys_norm = aggregate_physics(s.proxies, cal, opt.aggregate);
  hv.score = fuse(hv.a_ml_norm, hv.w_phys_norm);
  hv.quadrant = classify(hv.a_ml_norm, hv.w_phys_norm, opt.thresholds);
  return hv;
}

inline StreamOutputs run_streams(const Window& w, const ae::AutoencoderModel& model,
                                 const physics::PhysicsParams& params) {
  StreamOutputs s;
  s.mission_id = w.mission_id;
  s.window_idx = w.index;
  s.a_ml = ae::score(model, w);
  s.proxies = physics::physics_vector(w, params).proxies;
  return s;
}

/// Both streams, normalization, fusion and classification for one window.
inline HealthVector health_pipeline(const Window& w, const ae::AutoencoderModel& model,
                                    const physics::PhysicsParams& params, const Calibration& cal,
                                    const FusionOptions& opt = {}) {
  return fuse_outputs(run_streams(w, model, params), cal, opt);
}

// ---- text formats ------------------------------------------------------------

inline constexpr std::string_view kHealthCsvHeader =
    "mission_id,window_idx,a_ml_raw,e_susp,e_lat,w_drive,e_brake,a_ml_norm,w_phys_norm,score,quadrant";

inline std::string format_health_record(const HealthVector& h) {
  std::string out = h.mission_id;
  out += ',' + std::to_string(h.window_idx);
  for (double x : {h.a_ml_raw, h.proxies.e_susp, h.proxies.e_lat, h.proxies.w_drive,
                   h.proxies.e_brake, h.a_ml_norm, h.w_phys_norm, h.score})
    out += ',' + text::format_double(x);
  out += ',';
  out += to_string(h.quadrant);
  return out;
}

inline HealthVector parse_health_record(std::string_view line, std::size_t line_no = 0) {
  const auto f = text::split(text::trim(line), ',');
  if (f.size() != 11)
    throw ParseError(ParseErrorKind::WrongFieldCount, line_no,
                     "health record needs 11 fields, got " + std::to_string(f.size()));
  auto num = [&](std::size_t i) {
    const auto v = text::parse_double(f[i]);
    if (!v) throw ParseError(ParseErrorKind::MalformedField, line_no, std::string(f[i]));
    return *v;
  };
  HealthVector h;
  h.mission_id = std::string(f[0]);
  const auto idx = text::parse_u64(f[1]);
  if (!idx) throw ParseError(ParseErrorKind::MalformedField, line_no, std::string(f[1]));
  h.window_idx = static_cast<std::size_t>(*idx);
  h.a_ml_raw = num(2);
  h.proxies = {num(3), num(4), num(5), num(6)};
  h.a_ml_norm = num(7);
  h.w_phys_norm = num(8);
  h.score = num(9);
  try {
    h.quadrant = quadrant_from_string(text::trim(f[10]));
  } catch (const ContractError& e) {
    throw ParseError(ParseErrorKind::MalformedField, line_no, e.what());
  }
  return h;
}

inline std::vector<HealthVector> read_health_csv(std::istream& in) {
  std::vector<HealthVector> out;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (!header) {
      if (body != kHealthCsvHeader)
        throw ParseError(ParseErrorKind::MissingHeader, line_no, "expected health CSV header");
      header = true;
      continue;
    }
    out.push_back(parse_health_record(body, line_no));
  }
  return out;
}

/// `<channel>.min=`, `<channel>.max=`, `<channel>.degenerate=` lines.
inline void write_calibration(std::ostream& out, const Calibration& cal) {
  out << "# min-max calibration\n";
  out << "windows=" << cal.window_count << '\n';
  out << "missions=" << cal.mission_count << '\n';
  for (auto c : kAllChannels) {
    const auto& r = cal.range(c);
    out << to_string(c) << ".min=" << text::format_double(r.min) << '\n';
    out << to_string(c) << ".max=" << text::format_double(r.max) << '\n';
    out << to_string(c) << ".degenerate=" << (r.degenerate ? 1 : 0) << '\n';
  }
}

inline Calibration read_calibration(std::istream& in) {
  Calibration cal;
  std::array<int, kChannelCount> seen{};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw CalibrationError("calibration line " + std::to_string(line_no) + ": expected key=value");
    const auto key = text::trim(body.substr(0, eq));
    const auto value = text::trim(body.substr(eq + 1));
    if (key == "windows" || key == "missions") {
      const auto n = text::parse_u64(value);
      if (!n) throw CalibrationError("calibration line " + std::to_string(line_no) + ": bad count");
      (key == "windows" ? cal.window_count : cal.mission_count) = static_cast<std::size_t>(*n);
      continue;
    }
    const auto dot = key.rfind('.');
    if (dot == std::string_view::npos) throw CalibrationError("calibration line " + std::to_string(line_no) + ": bad key");
    Channel c{};
    try {
      c = channel_from_string(key.substr(0, dot));
    } catch (const ContractError& e) {
      throw CalibrationError(e.what());
    }
    const auto field = key.substr(dot + 1);
    const auto num = text::parse_double(value);
    if (!num) throw CalibrationError("calibration line " + std::to_string(line_no) + ": bad number");
    auto& r = cal.range(c);
    auto& mask = seen[static_cast<std::size_t>(c)];
    if (field == "min") { r.min = *num; mask |= 1; }
    else if (field == "max") { r.max = *num; mask |= 2; }
    else if (field == "degenerate") { r.degenerate = *num != 0.0; mask |= 4; }
    else throw CalibrationError("calibration line " + std::to_string(line_no) + ": unknown field");
  }
  for (auto c : kAllChannels)
    if (seen[static_cast<std::size_t>(c)] != 7)
      throw CalibrationError("calibration is missing entries for channel " + std::string(to_string(c)));
  return cal;
}

} // namespace dualstream::fusion

#endif // DUALSTREAM_FUSION_HPP
