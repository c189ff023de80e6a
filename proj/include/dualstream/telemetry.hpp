#ifndef DUALSTREAM_TELEMETRY_HPP
#define DUALSTREAM_TELEMETRY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "random.hpp"
#include "text.hpp"

namespace dualstream {

inline constexpr std::size_t kWindowLength = 30;
/// Nominal sample period of the 10 Hz stream; operators always use this value.
inline constexpr double kSamplePeriod = 0.1;
inline constexpr double kMaxGap = 0.3;
inline constexpr std::string_view kTelemetryHeader = "t,ax,ay,az,v,theta";

/// One timestamped telemetry record. a_z includes gravity; theta is vehicle pitch.
struct Sample {
  double t = 0.0;
  double a_x = 0.0;
  double a_y = 0.0;
  double a_z = 0.0;
  double v = 0.0;
  std::optional<double> theta;

  friend bool operator==(const Sample&, const Sample&) = default;
};

enum class Label { Normal, Pothole, Ramp, RoughTerrain };

inline constexpr std::array<Label, 4> kAllLabels = {Label::Normal, Label::Pothole, Label::Ramp,
                                                    Label::RoughTerrain};

inline std::string_view to_string(Label label) {
  switch (label) {
  case Label::Normal: return "Normal";
  case Label::Pothole: return "Pothole";
  case Label::Ramp: return "Ramp";
  case Label::RoughTerrain: return "RoughTerrain";
  }
  return "Normal";
}

inline std::optional<Label> label_from_string(std::string_view s) {
  s = text::trim(s);
  for (auto label : kAllLabels)
    if (s == to_string(label)) return label;
  return std::nullopt;
}

/// 30 consecutive samples of one mission.
struct Window {
  std::array<Sample, kWindowLength> samples{};
  std::string mission_id;
  std::size_t index = 0; ///< position of the window within its mission
  std::optional<Label> label;
  double mass = 0.0; ///< kg, constant per mission

  bool has_full_pitch() const {
    return std::all_of(samples.begin(), samples.end(),
                       [](const Sample& s) { return s.theta.has_value(); });
  }
};

namespace detail {

inline double require_number(std::string_view token, std::size_t line, const char* name) {
  const auto value = text::parse_double(token);
  if (!value)
    throw ParseError(ParseErrorKind::MalformedField, line,
                     std::string(name) + " = '" + std::string(token) + "'");
  if (!std::isfinite(*value))
    throw ParseError(ParseErrorKind::NonFinite, line, std::string(name) + " is not finite");
  return *value;
}

} // namespace detail

/// Parses one `t,a_x,a_y,a_z,v,theta` record. `line_no` is reported in errors.
inline Sample parse_record(std::string_view line, std::size_t line_no = 0) {
  const auto fields = text::split(text::trim(line), ',');
  if (fields.size() != 6)
    throw ParseError(ParseErrorKind::WrongFieldCount, line_no,
                     "expected 6 fields, got " + std::to_string(fields.size()));

  Sample s;
  s.t = detail::require_number(fields[0], line_no, "t");
  s.a_x = detail::require_number(fields[1], line_no, "a_x");
  s.a_y = detail::require_number(fields[2], line_no, "a_y");
  s.a_z = detail::require_number(fields[3], line_no, "a_z");
  s.v = detail::require_number(fields[4], line_no, "v");
  if (s.v < 0.0)
    throw ParseError(ParseErrorKind::NegativeSpeed, line_no, "v = " + text::format_double(s.v));
  if (!text::trim(fields[5]).empty()) {
    const double theta = detail::require_number(fields[5], line_no, "theta");
    if (!(std::abs(theta) < std::numbers::pi / 2))
      throw ParseError(ParseErrorKind::PitchOutOfRange, line_no,
                       "theta = " + text::format_double(theta));
    s.theta = theta;
  }
  return s;
}

inline std::string format_record(const Sample& s) {
  std::string out;
  out.reserve(96);
  for (double x : {s.t, s.a_x, s.a_y, s.a_z, s.v}) {
    out += text::format_double(x);
    out += ',';
  }
  if (s.theta) out += text::format_double(*s.theta);
  return out;
}

/// Reads a telemetry file body. The header line is mandatory; '#' lines and blank
/// lines are skipped.
inline std::vector<Sample> read_telemetry(std::istream& in) {
  std::vector<Sample> samples;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (!header_seen) {
      if (body != kTelemetryHeader)
        throw ParseError(ParseErrorKind::MissingHeader, line_no,
                         "expected header '" + std::string(kTelemetryHeader) + "'");
      header_seen = true;
      continue;
    }
    samples.push_back(parse_record(body, line_no));
  }
  if (!header_seen) throw ParseError(ParseErrorKind::MissingHeader, line_no, "empty telemetry file");
  return samples;
}

inline void write_telemetry(std::ostream& out, std::span<const Sample> samples) {
  out << kTelemetryHeader << '\n';
  for (const auto& s : samples) out << format_record(s) << '\n';
}

/// Sidecar metadata of one mission (key=value lines).
struct MissionMeta {
  std::string mission_id;
  double mass_kg = 0.0;
  std::vector<Label> label_track; ///< optional per-window ground truth
  std::map<std::string, std::string> extra; ///< unrecognised keys, kept verbatim
};

inline MissionMeta read_metadata(std::istream& in) {
  MissionMeta meta;
  bool have_id = false;
  bool have_mass = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(ParseErrorKind::BadMetadata, line_no, "expected key=value");
    const auto key = text::trim(body.substr(0, eq));
    const auto value = text::trim(body.substr(eq + 1));
    if (key == "mission_id") {
      meta.mission_id = std::string(value);
      have_id = !value.empty();
    } else if (key == "mass_kg") {
      const auto mass = text::parse_double(value);
      if (!mass || !std::isfinite(*mass) || *mass <= 0.0)
        throw ParseError(ParseErrorKind::BadMetadata, line_no, "mass_kg must be positive");
      meta.mass_kg = *mass;
      have_mass = true;
    } else if (key == "label_track") {
      meta.label_track.clear();
      if (value.empty()) continue;
      for (auto token : text::split(value, ',')) {
        const auto label = label_from_string(token);
        if (!label)
          throw ParseError(ParseErrorKind::BadMetadata, line_no,
                           "unknown label '" + std::string(token) + "'");
        meta.label_track.push_back(*label);
      }
    } else {
      meta.extra.emplace(std::string(key), std::string(value));
    }
  }
  if (!have_id || !have_mass)
    throw ParseError(ParseErrorKind::BadMetadata, line_no, "mission_id and mass_kg are required");
  return meta;
}

inline void write_metadata(std::ostream& out, const MissionMeta& meta) {
  out << "mission_id=" << meta.mission_id << '\n';
  out << "mass_kg=" << text::format_double(meta.mass_kg) << '\n';
  out << "label_track=";
  for (std::size_t i = 0; i < meta.label_track.size(); ++i)
    out << (i ? "," : "") << to_string(meta.label_track[i]);
  out << '\n';
  for (const auto& [k, v] : meta.extra) out << k << '=' << v << '\n';
}

struct WindowingResult {
  std::vector<Window> windows;
  std::size_t discarded_samples = 0;         ///< trailing remainder < 30 samples
  std::vector<std::size_t> gap_flagged;      ///< window indices dropped for a timestamp gap
};

/// Cuts a single mission into non-overlapping 30-sample windows. Window k covers
/// samples [30k, 30k+30); a window containing a step > 0.3 s (or a backwards step)
/// is dropped and flagged, the rest of the stream continues.
inline WindowingResult window_stream(std::span<const Sample> samples, std::string_view mission_id,
                                     double mass, std::span<const Label> label_track = {}) {
  WindowingResult result;
  const std::size_t count = samples.size() / kWindowLength;
  result.discarded_samples = samples.size() - count * kWindowLength;
  result.windows.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto chunk = samples.subspan(k * kWindowLength, kWindowLength);
    bool gap = false;
    for (std::size_t i = 1; i < chunk.size() && !gap; ++i) {
      const double step = chunk[i].t - chunk[i - 1].t;
      gap = !(step >= 0.0 && step <= kMaxGap);
    }
    if (gap) {
      result.gap_flagged.push_back(k);
      continue;
    }
    Window w;
    std::copy(chunk.begin(), chunk.end(), w.samples.begin());
    w.mission_id = std::string(mission_id);
    w.index = k;
    w.mass = mass;
    if (k < label_track.size()) w.label = label_track[k];
    result.windows.push_back(std::move(w));
  }
  return result;
}

struct MissionSplit {
  std::vector<Window> train;
  std::vector<Window> val;
  std::vector<Window> test;
  std::vector<std::string> train_missions;
  std::vector<std::string> val_missions;
  std::vector<std::string> test_missions;
};

struct SplitRatios {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;
};

/// Assigns whole missions to train/val/test. Missions are sorted by id, shuffled
/// with the seed, then cut at rounded ratio counts (each split gets at least one).
inline MissionSplit split_by_mission(std::span<const Window> windows, SplitRatios ratios,
                                     std::uint64_t seed) {
  std::set<std::string> unique;
  for (const auto& w : windows) unique.insert(w.mission_id);
  if (unique.size() < 3)
    throw InsufficientMissions("split_by_mission needs at least 3 missions, got " +
                               std::to_string(unique.size()));
  if (!(ratios.train > 0 && ratios.val > 0 && ratios.test > 0))
    throw InvalidParams("split ratios must be positive");

  std::vector<std::string> missions(unique.begin(), unique.end());
  Rng rng(seed);
  rng.shuffle(missions.begin(), missions.end());

  const double total = ratios.train + ratios.val + ratios.test;
  const auto n = static_cast<long>(missions.size());
  auto n_train = std::lround(static_cast<double>(n) * ratios.train / total);
  auto n_val = std::lround(static_cast<double>(n) * ratios.val / total);
  n_train = std::clamp(n_train, 1L, n - 2);
  n_val = std::clamp(n_val, 1L, n - n_train - 1);

  MissionSplit split;
  std::map<std::string, int> bucket;
  for (long i = 0; i < n; ++i) {
    const auto& id = missions[static_cast<std::size_t>(i)];
    const int b = i < n_train ? 0 : (i < n_train + n_val ? 1 : 2);
    bucket[id] = b;
    (b == 0 ? split.train_missions : b == 1 ? split.val_missions : split.test_missions).push_back(id);
  }
  for (const auto& w : windows) {
    const int b = bucket.at(w.mission_id);
    (b == 0 ? split.train : b == 1 ? split.val : split.test).push_back(w);
  }
  return split;
}

} // namespace dualstream

#endif // DUALSTREAM_TELEMETRY_HPP
