#ifndef DUALSTREAM_PHYSICS_HPP
#define DUALSTREAM_PHYSICS_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "telemetry.hpp"
#include "text.hpp"

namespace dualstream::physics {

inline constexpr double kStandardGravity = 9.80665;

struct PhysicsParams {
  double g = kStandardGravity;
  double c_rr = 0.008; ///< rolling-resistance coefficient, F_drag = c_rr * m * g
  double dt = kSamplePeriod;

  void validate() const {
    if (!(g > 0.0) || !std::isfinite(g)) throw InvalidParams("g must be positive");
    if (!(c_rr >= 0.0 && c_rr <= 0.05)) throw InvalidParams("c_rr must lie in [0, 0.05]");
    if (dt != kSamplePeriod) throw InvalidParams("dt is fixed at 0.1 s");
  }
};

/// Stream B output for one window. Units: e_susp/e_lat in (m/s^3)^2 * s, w_drive/e_brake in J.
struct PhysicsProxies {
  double e_susp = 0.0;
  double e_lat = 0.0;
  double w_drive = 0.0;
  double e_brake = 0.0;

  friend bool operator==(const PhysicsProxies&, const PhysicsProxies&) = default;
};

enum class ThetaSource { Measured, Estimated };

inline std::string_view to_string(ThetaSource s) {
  return s == ThetaSource::Measured ? "measured" : "estimated";
}

struct PitchEstimate {
  std::vector<double> theta;
  ThetaSource source = ThetaSource::Measured;
};

// ---- series primitives -------------------------------------------------------

/// Symmetric central difference at interior points, one-sided first differences
/// at the two endpoints. Output has the input's length.
inline std::vector<double> central_diff(std::span<const double> x, double dt) {
  const auto n = x.size();
  if (n < 3) throw SeriesTooShort("central_diff needs at least 3 samples");
  std::vector<double> d(n);
  d[0] = (x[1] - x[0]) / dt;
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (x[i + 1] - x[i - 1]) / (2.0 * dt);
  d[n - 1] = (x[n - 1] - x[n - 2]) / dt;
  return d;
}

/// Zero-phase 5-point moving average; near the edges the mean runs over the
/// neighbours that exist.
inline std::vector<double> smooth_ma5(std::span<const double> x) {
  const auto n = x.size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= 2 ? i - 2 : 0;
    const std::size_t hi = std::min(n - 1, i + 2);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += x[j];
    y[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return y;
}

inline double trapezoid(std::span<const double> y, double dt) {
  if (y.size() < 2) return 0.0;
  double sum = 0.5 * (y.front() + y.back());
  for (std::size_t i = 1; i + 1 < y.size(); ++i) sum += y[i];
  return sum * dt;
}

/// Smoothed central-difference jerk, squared and integrated.
inline double squared_jerk_integral(std::span<const double> accel, double dt) {
  auto jerk = smooth_ma5(central_diff(accel, dt));
  for (auto& j : jerk) j *= j;
  return trapezoid(jerk, dt);
}

inline std::vector<double> gravity_compensate(std::span<const double> a_z,
                                              std::span<const double> theta, double g) {
  if (a_z.size() != theta.size()) throw ShapeError("gravity_compensate: length mismatch");
  std::vector<double> out(a_z.size());
  for (std::size_t i = 0; i < a_z.size(); ++i) out[i] = a_z[i] - g * std::cos(theta[i]);
  return out;
}

inline std::vector<double> gravity_compensate(std::span<const double> a_z,
                                              std::span<const double> theta,
                                              const PhysicsParams& params) {
  return gravity_compensate(a_z, theta, params.g);
}

// ---- window channel extraction --------------------------------------------

template <class Field>
std::vector<double> channel(const Window& w, Field field) {
  std::vector<double> out(kWindowLength);
  for (std::size_t i = 0; i < kWindowLength; ++i) out[i] = field(w.samples[i]);
  return out;
}

inline std::vector<double> channel_ax(const Window& w) {
  return channel(w, [](const Sample& s) { return s.a_x; });
}
inline std::vector<double> channel_ay(const Window& w) {
  return channel(w, [](const Sample& s) { return s.a_y; });
}
inline std::vector<double> channel_az(const Window& w) {
  return channel(w, [](const Sample& s) { return s.a_z; });
}
inline std::vector<double> channel_v(const Window& w) {
  return channel(w, [](const Sample& s) { return s.v; });
}

// ---- pitch -----------------------------------------------------------------

/// Measured pitch when every sample has one. Otherwise a quasi-static estimate:
/// the longitudinal specific force minus the GNSS speed derivative is attributed
/// to gravity, theta = asin((a_x - dv/dt) / g), then smoothed.
inline PitchEstimate estimate_pitch(const Window& w, const PhysicsParams& params) {
  PitchEstimate est;
  if (w.has_full_pitch()) {
    est.theta = channel(w, [](const Sample& s) { return *s.theta; });
    est.source = ThetaSource::Measured;
    return est;
  }
  const auto v_dot = smooth_ma5(central_diff(channel_v(w), params.dt));
  std::vector<double> raw(kWindowLength);
  for (std::size_t i = 0; i < kWindowLength; ++i) {
    const double s = (w.samples[i].a_x - v_dot[i]) / params.g;
    raw[i] = std::asin(std::clamp(s, -1.0, 1.0));
  }
  est.theta = smooth_ma5(raw);
  est.source = ThetaSource::Estimated;
  return est;
}

// ---- proxies ---------------------------------------------------------------

namespace detail {

inline double suspension_from(const Window& w, std::span<const double> theta,
                              const PhysicsParams& params) {
  const auto a_gc = gravity_compensate(channel_az(w), theta, params.g);
  return squared_jerk_integral(a_gc, params.dt);
}

inline std::vector<double> drive_power_from(const Window& w, std::span<const double> theta,
                                            const PhysicsParams& params) {
  const double m = w.mass;
  const double f_drag = params.c_rr * m * params.g;
  std::vector<double> p(kWindowLength);
  for (std::size_t i = 0; i < kWindowLength; ++i) {
    const auto& s = w.samples[i];
    const double force = m * (s.a_x + params.g * std::sin(theta[i])) + f_drag;
    p[i] = std::max(0.0, force * s.v);
  }
  return p;
}

inline double braking_from(const Window& w, const PhysicsParams& params) {
  std::vector<double> p(kWindowLength);
  for (std::size_t i = 0; i < kWindowLength; ++i) {
    const auto& s = w.samples[i];
    p[i] = std::max(0.0, -w.mass * s.a_x) * s.v;
  }
  return trapezoid(p, params.dt);
}

} // namespace detail

inline double suspension_stress(const Window& w, const PhysicsParams& params) {
  const auto pitch = estimate_pitch(w, params);
  return detail::suspension_from(w, pitch.theta, params);
}

inline double lateral_stress(const Window& w, const PhysicsParams& params) {
  return squared_jerk_integral(channel_ay(w), params.dt);
}

/// Instantaneous positive tractive power per sample (W), for diagnostics.
inline std::vector<double> drive_power_series(const Window& w, const PhysicsParams& params) {
  const auto pitch = estimate_pitch(w, params);
  return detail::drive_power_from(w, pitch.theta, params);
}

inline double drivetrain_stress(const Window& w, const PhysicsParams& params) {
  return trapezoid(drive_power_series(w, params), params.dt);
}

inline double braking_stress(const Window& w, const PhysicsParams& params) {
  return detail::braking_from(w, params);
}

struct PhysicsResult {
  PhysicsProxies proxies;
  ThetaSource theta_source = ThetaSource::Measured;
};

/// All four proxies over one shared pitch pass.
inline PhysicsResult physics_vector(const Window& w, const PhysicsParams& params) {
  const auto pitch = estimate_pitch(w, params);
  PhysicsResult r;
  r.theta_source = pitch.source;
  r.proxies.e_susp = detail::suspension_from(w, pitch.theta, params);
  r.proxies.e_lat = squared_jerk_integral(channel_ay(w), params.dt);
  r.proxies.w_drive = trapezoid(detail::drive_power_from(w, pitch.theta, params), params.dt);
  r.proxies.e_brake = detail::braking_from(w, params);
  return r;
}

inline constexpr std::string_view kProxyCsvHeader =
    "mission_id,window_idx,e_susp,e_lat,w_drive,e_brake,theta_source";

inline std::string format_proxy_record(const Window& w, const PhysicsResult& r) {
  std::string out = w.mission_id;
  out += ',' + std::to_string(w.index);
  for (double x : {r.proxies.e_susp, r.proxies.e_lat, r.proxies.w_drive, r.proxies.e_brake})
    out += ',' + text::format_double(x);
  out += ',';
  out += to_string(r.theta_source);
  return out;
}

} // namespace dualstream::physics

#endif // DUALSTREAM_PHYSICS_HPP
