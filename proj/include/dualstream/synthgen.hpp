#ifndef DUALSTREAM_SYNTHGEN_HPP
#define DUALSTREAM_SYNTHGEN_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "physics.hpp"
#include "random.hpp"
#include "telemetry.hpp"
#include "text.hpp"

namespace dualstream::synth {

enum class Scenario { Cruise, Pothole, SpeedBump, Ramp, RoughTerrain };

inline constexpr std::array<Scenario, 5> kAllScenarios = {
    Scenario::Cruise, Scenario::Pothole, Scenario::SpeedBump, Scenario::Ramp, Scenario::RoughTerrain};

inline constexpr std::array<double, 3> kPaperMasses = {8300.0, 10900.0, 13500.0};

inline std::string_view to_string(Scenario s) {
  switch (s) {
  case Scenario::Cruise: return "cruise";
  case Scenario::Pothole: return "pothole";
  case Scenario::SpeedBump: return "speedbump";
  case Scenario::Ramp: return "ramp";
  case Scenario::RoughTerrain: return "rough";
  }
  return "?";
}

inline Scenario scenario_from_string(std::string_view s) {
  for (auto sc : kAllScenarios)
    if (to_string(sc) == s) return sc;
  throw InvalidParams("unknown scenario '" + std::string(s) + "'");
}

// Signal-shape constants. None of these come from measured traces; they are
// chosen so each context has the qualitative signature described for it.

/// Slow speed wander amplitude around the base speed (m/s).
inline constexpr double kSpeedJitter = 0.3;
inline constexpr double kJitterPeriodMin = 20.0;
inline constexpr double kJitterPeriodMax = 60.0;

/// Pothole: biphasic vertical spike, +A then -0.8A, optional +0.25A rebound.
inline constexpr double kPotholeAmplitudeMin = 6.0;
inline constexpr double kPotholeAmplitudeMax = 10.0;
inline constexpr double kPotholeReboundRatio = 0.8;
inline constexpr double kPotholeTailRatio = 0.25;
/// Lateral transient accompanying the spike, as a fraction of A.
inline constexpr double kPotholeLateralRatio = 0.4;

/// Speed bump: single vertical half-sine, lower and longer than a pothole.
inline constexpr double kBumpAmplitudeMin = 3.5;
inline constexpr double kBumpAmplitudeMax = 4.5;
inline constexpr double kBumpDurationMin = 0.8;
inline constexpr double kBumpDurationMax = 1.2;

/// Rough terrain: body heave/roll oscillation in the 0.6-1.2 Hz band plus
/// broadband noise on a_y/a_z and fore-aft jolts on a_x.
inline constexpr double kRoughHeaveMin = 1.6;
inline constexpr double kRoughHeaveMax = 2.2;
inline constexpr double kRoughRollRatio = 0.8;
inline constexpr double kRoughFreqMin = 0.6;
inline constexpr double kRoughFreqMax = 1.2;
inline constexpr double kRoughNoiseFactor = 6.0; ///< broadband std = factor * noise_std
inline constexpr double kRoughLongitudinalStd = 1.0;

/// Dynamic (gravity-free) acceleration bound applied to every channel.
inline constexpr double kAccelBound = 15.0;

/// Base speed ranges used by the corpus generator (m/s).
struct SpeedRange {
  double lo;
  double hi;
};

inline SpeedRange corpus_speed_range(Scenario s) {
  switch (s) {
  case Scenario::Cruise: return {15.0, 25.0};
  case Scenario::Pothole: return {10.0, 20.0};
  case Scenario::SpeedBump: return {5.0, 10.0};
  case Scenario::Ramp: return {10.0, 10.0};
  case Scenario::RoughTerrain: return {6.0, 10.0};
  }
  return {10.0, 10.0};
}

struct MissionSpec {
  Scenario scenario = Scenario::Cruise;
  double duration = 120.0; ///< s
  double mass = 10900.0;   ///< kg
  double base_speed = 15.0;
  std::uint64_t seed = 1;
  double noise_std = 0.05; ///< IMU noise, m/s^2
  double speed_jitter = kSpeedJitter;
  double grade = 0.08;     ///< rad, Ramp only
  double event_rate = 4.0; ///< events/min, Pothole and SpeedBump
  bool emit_theta = true;
  std::string mission_id; ///< empty: derived from scenario, mass and seed

  void validate() const {
    if (!(duration >= 30.0)) throw InvalidParams("mission duration must be >= 30 s");
    if (!(base_speed > 0.0)) throw InvalidParams("base_speed must be > 0");
    if (!(mass > 0.0)) throw InvalidParams("mass must be > 0");
    if (!(noise_std >= 0.0) || !(speed_jitter >= 0.0)) throw InvalidParams("noise levels must be >= 0");
    if (!(std::abs(grade) < 0.5)) throw InvalidParams("grade must be below 0.5 rad");
    if (!(event_rate >= 0.0)) throw InvalidParams("event_rate must be >= 0");
    if (speed_jitter >= base_speed) throw InvalidParams("speed_jitter must stay below base_speed");
  }

  std::string resolved_id() const {
    if (!mission_id.empty()) return mission_id;
    return std::string(to_string(scenario)) + "-m" + std::to_string(std::lround(mass)) + "-s" +
           std::to_string(seed);
  }
};

struct Mission {
  std::string mission_id;
  Scenario scenario = Scenario::Cruise;
  double mass = 0.0;
  std::vector<Sample> samples;
  std::vector<Label> labels; ///< one per full window

  MissionMeta meta() const {
    MissionMeta m;
    m.mission_id = mission_id;
    m.mass_kg = mass;
    m.label_track = labels;
    m.extra["scenario"] = std::string(to_string(scenario));
    return m;
  }

  WindowingResult windows() const { return window_stream(samples, mission_id, mass, labels); }
};

namespace detail {

inline double clamp_dynamic(double a) { return std::clamp(a, -kAccelBound, kAccelBound); }

} // namespace detail

/// Deterministic 10 Hz mission for one scenario. Events (potholes, bumps) are
/// placed wholly inside a window so every labeled window carries a full event.
inline Mission generate_mission(const MissionSpec& spec) {
  spec.validate();
  const double g = physics::kStandardGravity;
  const auto n = static_cast<std::size_t>(std::llround(spec.duration / kSamplePeriod));
  const std::size_t n_windows = n / kWindowLength;

  Rng kin(derive_seed(spec.seed, 1));   // speed profile and terrain shape
  Rng noise(derive_seed(spec.seed, 2)); // IMU noise
  Rng events(derive_seed(spec.seed, 3));

  std::array<double, 2> periods{}, phases{};
  for (std::size_t k = 0; k < 2; ++k) {
    periods[k] = kin.uniform(kJitterPeriodMin, kJitterPeriodMax);
    phases[k] = kin.uniform(0.0, 2.0 * std::numbers::pi);
  }
  constexpr std::array<double, 2> weights = {0.6, 0.4};

  const bool ramp = spec.scenario == Scenario::Ramp;
  const bool rough = spec.scenario == Scenario::RoughTerrain;
  const double theta = ramp ? spec.grade : 0.0;

  double heave = 0.0, roll = 0.0, f_heave = 0.0, f_roll = 0.0, p_heave = 0.0, p_roll = 0.0;
  if (rough) {
    heave = kin.uniform(kRoughHeaveMin, kRoughHeaveMax);
    roll = kRoughRollRatio * heave;
    f_heave = kin.uniform(kRoughFreqMin, kRoughFreqMax);
    f_roll = kin.uniform(kRoughFreqMin, kRoughFreqMax);
    p_heave = kin.uniform(0.0, 2.0 * std::numbers::pi);
    p_roll = kin.uniform(0.0, 2.0 * std::numbers::pi);
  }

  // Dynamic parts of each channel (gravity added at the end).
  std::vector<double> ax(n), ay(n), az(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * kSamplePeriod;
    double dv = 0.0, dv_dt = 0.0;
    for (std::size_t k = 0; k < 2; ++k) {
      const double w = 2.0 * std::numbers::pi / periods[k];
      dv += weights[k] * std::sin(w * t + phases[k]);
      dv_dt += weights[k] * w * std::cos(w * t + phases[k]);
    }
    v[i] = std::max(0.0, spec.base_speed + spec.speed_jitter * dv);
    ax[i] = spec.speed_jitter * dv_dt + noise.normal(0.0, spec.noise_std);
    ay[i] = noise.normal(0.0, spec.noise_std);
    az[i] = noise.normal(0.0, spec.noise_std);
    if (rough) {
      const double bb = kRoughNoiseFactor * spec.noise_std;
      az[i] += heave * std::sin(2.0 * std::numbers::pi * f_heave * t + p_heave) + noise.normal(0.0, bb);
      ay[i] += roll * std::sin(2.0 * std::numbers::pi * f_roll * t + p_roll) + noise.normal(0.0, bb);
      ax[i] += noise.normal(0.0, kRoughLongitudinalStd);
    }
  }

  Label base_label = Label::Normal;
  if (ramp) base_label = Label::Ramp;
  if (rough) base_label = Label::RoughTerrain;
  std::vector<Label> labels(n_windows, base_label);

  const bool potholes = spec.scenario == Scenario::Pothole;
  const bool bumps = spec.scenario == Scenario::SpeedBump;
  if (potholes || bumps) {
    const double p_event = std::min(1.0, spec.event_rate / (60.0 / (kWindowLength * kSamplePeriod)));
    for (std::size_t wi = 0; wi < n_windows; ++wi) {
      if (!(events.uniform() < p_event)) continue;
      labels[wi] = Label::Pothole;
      const std::size_t base = wi * kWindowLength;
      if (potholes) {
        const double amp = events.uniform(kPotholeAmplitudeMin, kPotholeAmplitudeMax);
        const bool tail = events.uniform() < 0.5;
        const double side = events.uniform() < 0.5 ? -1.0 : 1.0;
        const std::size_t k = base + 2 + events.below(kWindowLength - 5);
        az[k] += amp;
        az[k + 1] -= kPotholeReboundRatio * amp;
        if (tail) az[k + 2] += kPotholeTailRatio * amp;
        ay[k] += side * kPotholeLateralRatio * amp;
        ay[k + 1] -= side * kPotholeLateralRatio * kPotholeReboundRatio * amp;
      } else {
        const double amp = events.uniform(kBumpAmplitudeMin, kBumpAmplitudeMax);
        const double dur = events.uniform(kBumpDurationMin, kBumpDurationMax);
        const auto len = static_cast<std::size_t>(std::lround(dur / kSamplePeriod));
        const std::size_t k = base + 1 + events.below(kWindowLength - len - 1);
        for (std::size_t j = 0; j <= len; ++j)
          az[k + j] += amp * std::sin(std::numbers::pi * static_cast<double>(j) / static_cast<double>(len));
      }
    }
  }

  Mission m;
  m.mission_id = spec.resolved_id();
  m.scenario = spec.scenario;
  m.mass = spec.mass;
  m.labels = std::move(labels);
  m.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& s = m.samples[i];
    s.t = static_cast<double>(i) * kSamplePeriod;
    s.a_x = detail::clamp_dynamic(ax[i]);
    s.a_y = detail::clamp_dynamic(ay[i]);
    s.a_z = g * std::cos(theta) + detail::clamp_dynamic(az[i]);
    s.v = v[i];
    if (spec.emit_theta) s.theta = theta;
  }
  return m;
}

struct CorpusSpec {
  int per_cell = 2;
  double duration = 120.0;
  std::uint64_t seed = 1;
  std::vector<Scenario> scenarios{kAllScenarios.begin(), kAllScenarios.end()};
  std::vector<double> masses{kPaperMasses.begin(), kPaperMasses.end()};
  double noise_std = 0.05;
  bool emit_theta = true;
};

/// Mission specs of a balanced scenario x mass grid. Kinematics (speed, terrain,
/// events, noise) depend only on (scenario, replicate), so the same replicate at
/// different masses differs in mass alone.
inline std::vector<MissionSpec> corpus_specs(const CorpusSpec& cs) {
  if (cs.per_cell < 1) throw InvalidParams("per_cell must be >= 1");
  std::vector<MissionSpec> specs;
  for (std::size_t si = 0; si < cs.scenarios.size(); ++si) {
    const auto sc = cs.scenarios[si];
    for (double mass : cs.masses) {
      for (int rep = 0; rep < cs.per_cell; ++rep) {
        const auto kin_seed =
            derive_seed(cs.seed, static_cast<std::uint64_t>(si) * 100003u + static_cast<std::uint64_t>(rep));
        Rng pick(derive_seed(kin_seed, 7));
        const auto range = corpus_speed_range(sc);
        MissionSpec spec;
        spec.scenario = sc;
        spec.duration = cs.duration;
        spec.mass = mass;
        spec.base_speed = pick.uniform(range.lo, range.hi);
        if (range.lo == range.hi) spec.base_speed = range.lo;
        spec.seed = kin_seed;
        spec.noise_std = cs.noise_std;
        spec.emit_theta = cs.emit_theta;
        spec.mission_id = std::string(to_string(sc)) + "-m" + std::to_string(std::lround(mass)) +
                          "-r" + std::to_string(rep);
        specs.push_back(std::move(spec));
      }
    }
  }
  return specs;
}

inline std::vector<Mission> generate_corpus(const CorpusSpec& cs) {
  std::vector<Mission> out;
  for (const auto& spec : corpus_specs(cs)) out.push_back(generate_mission(spec));
  return out;
}

/// Digest over the serialized telemetry and metadata of every mission, in order.
inline std::string corpus_digest(const std::vector<Mission>& missions) {
  text::Fnv1a64 h;
  for (const auto& m : missions) {
    std::ostringstream tel, meta;
    write_telemetry(tel, m.samples);
    write_metadata(meta, m.meta());
    h.update(tel.str());
    h.update(meta.str());
  }
  return text::hex64(h.digest());
}

/// Windows of every mission, concatenated in mission order.
inline std::vector<Window> corpus_windows(const std::vector<Mission>& missions) {
  std::vector<Window> out;
  for (const auto& m : missions) {
    auto r = m.windows();
    std::move(r.windows.begin(), r.windows.end(), std::back_inserter(out));
  }
  return out;
}

} // namespace dualstream::synth

#endif // DUALSTREAM_SYNTHGEN_HPP
