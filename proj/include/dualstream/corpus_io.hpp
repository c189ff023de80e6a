#ifndef DUALSTREAM_CORPUS_IO_HPP
#define DUALSTREAM_CORPUS_IO_HPP

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "synthgen.hpp"
#include "telemetry.hpp"

// A corpus on disk is a directory of `<mission_id>.csv` telemetry files, each
// with a `<mission_id>.meta` sidecar.

namespace dualstream {

namespace fs = std::filesystem;

inline void write_mission_files(const fs::path& dir, const std::vector<Sample>& samples, const MissionMeta& meta) {
  fs::create_directories(dir);
  const auto base = dir / meta.mission_id;
  std::ofstream tel(fs::path(base).concat(".csv"));
  std::ofstream md(fs::path(base).concat(".meta"));
  if (!tel || !md) throw Error("cannot write mission files under " + dir.string());
  write_telemetry(tel, samples);
  write_metadata(md, meta);
  if (!tel || !md) throw Error("write failed for " + base.string());
}

inline void write_corpus(const fs::path& dir, const std::vector<synth::Mission>& missions) {
  for (const auto& m : missions) write_mission_files(dir, m.samples, m.meta());
}

struct LoadedMission {
  MissionMeta meta;
  std::vector<Sample> samples;
};

/// Reads `<stem>.csv` and, if present, `<stem>.meta`. Without a sidecar the
/// mission id is the file stem and `fallback_mass` must be positive.
inline LoadedMission load_mission(const fs::path& csv, double fallback_mass = 0.0) {
  std::ifstream in(csv);
  if (!in) throw Error("cannot open " + csv.string());
  LoadedMission m;
  m.samples = read_telemetry(in);
  auto meta_path = csv;
  meta_path.replace_extension(".meta");
  if (fs::exists(meta_path)) {
    std::ifstream md(meta_path);
    m.meta = read_metadata(md);
  } else {
    if (!(fallback_mass > 0.0))
      throw InvalidParams("no metadata next to " + csv.string() + " and no mass given");
    m.meta.mission_id = csv.stem().string();
    m.meta.mass_kg = fallback_mass;
  }
  return m;
}

/// Every mission in the directory, sorted by file name.
inline std::vector<LoadedMission> load_corpus(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("corpus directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<LoadedMission> out;
  for (const auto& f : files) out.push_back(load_mission(f));
  if (out.empty()) throw Error("no telemetry files in " + dir.string());
  return out;
}

inline std::vector<Window> mission_windows(const LoadedMission& m) {
  return window_stream(m.samples, m.meta.mission_id, m.meta.mass_kg, m.meta.label_track).windows;
}

inline std::vector<Window> corpus_windows(const std::vector<LoadedMission>& missions) {
  std::vector<Window> out;
  for (const auto& m : missions) {
    auto w = mission_windows(m);
    std::move(w.begin(), w.end(), std::back_inserter(out));
  }
  return out;
}

} // namespace dualstream

#endif // DUALSTREAM_CORPUS_IO_HPP
