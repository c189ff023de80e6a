// dualstream: command-line front end for corpus generation, training,
// calibration, scoring, analysis and latency benchmarking.

#include <CLI11.hpp>

#include <dualstream/dualstream.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ds = dualstream;
namespace fs = std::filesystem;

namespace {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2, kParse = 3, kCalibration = 4, kModelFormat = 5 };

struct Globals {
  std::uint64_t seed = 1;
  std::string config;
  std::string output_dir = ".";
};

ds::RunConfig load_run_config(const Globals& g) {
  if (g.config.empty()) return {};
  std::ifstream in(g.config);
  if (!in) throw ds::Error("cannot open config " + g.config);
  return ds::read_config(in);
}

fs::path out_path(const Globals& g, const std::string& explicit_path, const char* default_name) {
  if (!explicit_path.empty()) return explicit_path;
  fs::create_directories(g.output_dir);
  return fs::path(g.output_dir) / default_name;
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw ds::Error("cannot write " + p.string());
  return out;
}

ds::fusion::Calibration load_calibration(const std::string& path) {
  if (path.empty()) throw ds::CalibrationError("no calibration file given (run `calibrate` first)");
  std::ifstream in(path);
  if (!in) throw ds::CalibrationError("cannot open calibration file " + path);
  return ds::fusion::read_calibration(in);
}

ds::ae::Topology topology_from(const std::string& name) {
  if (name == "desk") return ds::ae::Topology::desk();
  if (name == "paper") return ds::ae::Topology::paper();
  throw ds::InvalidParams("topology must be desk or paper");
}

// ---- generate ----------------------------------------------------------------

struct GenerateArgs {
  bool corpus = false;
  int per_cell = 2;
  std::string scenario = "cruise";
  double mass = 10900.0;
  double duration = 120.0;
  std::optional<double> base_speed;
  double noise_std = 0.05;
  bool no_theta = false;
};

int cmd_generate(const Globals& g, const GenerateArgs& a) {
  std::vector<ds::synth::Mission> missions;
  if (a.corpus) {
    ds::synth::CorpusSpec cs;
    cs.per_cell = a.per_cell;
    cs.duration = a.duration;
    cs.seed = g.seed;
    cs.noise_std = a.noise_std;
    cs.emit_theta = !a.no_theta;
    missions = ds::synth::generate_corpus(cs);
  } else {
    ds::synth::MissionSpec spec;
    spec.scenario = ds::synth::scenario_from_string(a.scenario);
    spec.mass = a.mass;
    spec.duration = a.duration;
    spec.seed = g.seed;
    spec.noise_std = a.noise_std;
    spec.emit_theta = !a.no_theta;
    const auto range = ds::synth::corpus_speed_range(spec.scenario);
    spec.base_speed = a.base_speed.value_or(0.5 * (range.lo + range.hi));
    missions.push_back(ds::synth::generate_mission(spec));
  }
  ds::write_corpus(g.output_dir, missions);
  std::cout << "missions " << missions.size() << '\n';
  std::cout << "digest " << ds::synth::corpus_digest(missions) << '\n';
  return kOk;
}

// ---- train -------------------------------------------------------------------

struct TrainArgs {
  std::string corpus;
  std::string topology = "desk";
  std::optional<int> epochs;
  std::optional<int> batch_size;
  std::optional<double> learning_rate;
  std::size_t max_windows = 0;
  std::string model_out;
  std::string loss_out;
};

std::vector<ds::Window> normal_only(const std::vector<ds::Window>& ws) {
  std::vector<ds::Window> out;
  for (const auto& w : ws)
    if (w.label == ds::Label::Normal) out.push_back(w);
  return out;
}

// Evenly spaced subsample, keeps the mission mix.
std::vector<ds::Window> thin(std::vector<ds::Window> ws, std::size_t limit) {
  if (limit == 0 || ws.size() <= limit) return ws;
  std::vector<ds::Window> out;
  const double step = static_cast<double>(ws.size()) / static_cast<double>(limit);
  for (std::size_t i = 0; i < limit; ++i) out.push_back(ws[static_cast<std::size_t>(i * step)]);
  return out;
}

int cmd_train(const Globals& g, const TrainArgs& a) {
  auto cfg = load_run_config(g);
  if (a.epochs) cfg.train.epochs = *a.epochs;
  if (a.batch_size) cfg.train.batch_size = *a.batch_size;
  if (a.learning_rate) cfg.train.learning_rate = *a.learning_rate;
  cfg.train.seed = g.seed;
  cfg.train.validate();

  const auto missions = ds::load_corpus(a.corpus);
  const auto windows = ds::corpus_windows(missions);
  const auto split = ds::split_by_mission(windows, {}, g.seed);
  const auto train_set = thin(normal_only(split.train), a.max_windows);
  const auto val_set = normal_only(split.val);
  if (train_set.empty()) throw ds::CorpusError("no Normal-labelled windows in the training split");

  const auto topo = topology_from(a.topology);
  auto model = ds::ae::init_model(topo, g.seed);
  std::cout << "topology " << a.topology << " parameters " << model.params.count() << '\n';
  std::cout << "train_windows " << train_set.size() << " val_windows " << val_set.size() << '\n';
  const auto result = ds::ae::train(std::move(model), train_set, val_set, cfg.train);

  const auto model_path = out_path(g, a.model_out, "model.lsae");
  ds::ae::save_model(result.model, model_path);
  auto loss = open_out(out_path(g, a.loss_out, "loss.csv"));
  ds::ae::write_loss_curve(loss, result.curve);
  const auto& first = result.curve.front();
  const auto& last = result.curve.back();
  std::cout << "train_loss " << first.train_loss << " -> " << last.train_loss << '\n';
  std::cout << "val_loss " << first.val_loss << " -> " << last.val_loss << '\n';
  std::cout << "model " << model_path.string() << '\n';
  return kOk;
}

// ---- calibrate ---------------------------------------------------------------

struct CalibrateArgs {
  std::string model;
  std::string corpus;
  std::string out;
};

int cmd_calibrate(const Globals& g, const CalibrateArgs& a) {
  const auto cfg = load_run_config(g);
  const auto model = ds::ae::load_model(a.model);
  const auto windows = ds::corpus_windows(ds::load_corpus(a.corpus));
  std::vector<ds::fusion::StreamOutputs> outs;
  outs.reserve(windows.size());
  for (const auto& w : windows) outs.push_back(ds::fusion::run_streams(w, model, cfg.physics));
  const auto cal = ds::fusion::calibrate(outs);
  for (auto c : ds::fusion::kAllChannels)
    if (cal.range(c).degenerate)
      std::cerr << "warning: channel " << ds::fusion::to_string(c)
                << " is constant over the calibration corpus; it will normalize to 0\n";
  const auto path = out_path(g, a.out, "calibration.txt");
  auto out = open_out(path);
  ds::fusion::write_calibration(out, cal);
  std::cout << "calibrated " << cal.window_count << " windows from " << cal.mission_count << " missions -> "
            << path.string() << '\n';
  return kOk;
}

// ---- score -------------------------------------------------------------------

struct ScoreArgs {
  std::string model;
  std::string calibration;
  std::vector<std::string> telemetry;
  std::string corpus;
  double mass = 0.0;
  std::string out;
};

int cmd_score(const Globals& g, const ScoreArgs& a) {
  const auto cfg = load_run_config(g);
  const auto cal = load_calibration(a.calibration);
  const auto model = ds::ae::load_model(a.model);

  std::vector<ds::LoadedMission> missions;
  if (!a.corpus.empty()) missions = ds::load_corpus(a.corpus);
  for (const auto& t : a.telemetry) missions.push_back(ds::load_mission(t, a.mass));
  if (missions.empty()) throw ds::InvalidParams("score needs --telemetry or --corpus");

  const auto path = out_path(g, a.out, "health.csv");
  auto out = open_out(path);
  out << ds::fusion::kHealthCsvHeader << '\n';
  std::map<ds::fusion::Quadrant, std::size_t> counts;
  std::size_t n = 0;
  for (const auto& m : missions) {
    const auto res = ds::window_stream(m.samples, m.meta.mission_id, m.meta.mass_kg);
    for (auto k : res.gap_flagged)
      std::cerr << "warning: " << m.meta.mission_id << " window " << k << " dropped (timestamp gap)\n";
    for (const auto& w : res.windows) {
      const auto hv = ds::fusion::health_pipeline(w, model, cfg.physics, cal, cfg.fusion);
      out << ds::fusion::format_health_record(hv) << '\n';
      ++counts[hv.quadrant];
      ++n;
    }
  }
  std::cout << "windows " << n << '\n';
  for (const auto& [q, c] : counts) std::cout << ds::fusion::to_string(q) << ' ' << c << '\n';
  std::cout << "health " << path.string() << '\n';
  return kOk;
}

// ---- analyze -----------------------------------------------------------------

struct AnalyzeArgs {
  std::string health;
  std::string corpus;
  std::string correlations_out;
  std::string tests_out;
};

// The health CSV carries no ground truth; labels and masses come from the
// corpus metadata, joined on (mission_id, window_idx).
int cmd_analyze(const Globals& g, const AnalyzeArgs& a) {
  std::ifstream in(a.health);
  if (!in) throw ds::Error("cannot open " + a.health);
  const auto health = ds::fusion::read_health_csv(in);

  std::map<std::string, ds::MissionMeta> metas;
  for (auto& m : ds::load_corpus(a.corpus)) metas.emplace(m.meta.mission_id, std::move(m.meta));

  std::vector<ds::stats::LabeledRecord> records;
  std::size_t unlabeled = 0;
  for (const auto& h : health) {
    const auto it = metas.find(h.mission_id);
    if (it == metas.end() || h.window_idx >= it->second.label_track.size()) {
      ++unlabeled;
      continue;
    }
    records.push_back({h.a_ml_raw, h.proxies, it->second.label_track[h.window_idx], it->second.mass_kg});
  }
  if (unlabeled) std::cerr << "warning: " << unlabeled << " windows had no label and were skipped\n";

  const auto rep = ds::stats::correlation_report(records);
  auto corr = open_out(out_path(g, a.correlations_out, "correlations.csv"));
  ds::stats::write_correlation_csv(corr, rep);
  auto tests = open_out(out_path(g, a.tests_out, "tests.csv"));
  ds::stats::write_test_csv(tests, rep);

  for (const char* pair : {"a_ml~e_susp", "a_ml~e_lat", "a_ml~w_drive", "a_ml~e_brake"}) {
    const auto* row = rep.find(pair, "global");
    if (row && row->pearson_r) std::cout << pair << " r=" << *row->pearson_r << " rho=" << *row->spearman_rho << '\n';
  }
  std::cout << "records " << records.size() << '\n';
  return kOk;
}

// ---- bench -------------------------------------------------------------------

struct BenchArgs {
  std::string model;
  std::string topology = "paper";
  std::string calibration;
  std::size_t iterations = ds::bench::kMinIterations;
  std::size_t warmup = 100;
  std::string out;
};

int cmd_bench(const Globals& g, const BenchArgs& a) {
  const auto cfg = load_run_config(g);
  // Latency does not depend on weight values, so an untrained model of the
  // requested topology is an acceptable stand-in when none is given.
  const auto model = a.model.empty() ? ds::ae::init_model(topology_from(a.topology), g.seed)
                                     : ds::ae::load_model(a.model);

  ds::synth::CorpusSpec cs;
  cs.per_cell = 1;
  cs.seed = g.seed;
  const auto windows = ds::synth::corpus_windows(ds::synth::generate_corpus(cs));

  ds::fusion::Calibration cal;
  if (!a.calibration.empty()) {
    cal = load_calibration(a.calibration);
  } else {
    std::vector<ds::fusion::StreamOutputs> outs;
    for (const auto& w : windows) outs.push_back(ds::fusion::run_streams(w, model, cfg.physics));
    cal = ds::fusion::calibrate(outs);
  }

  const auto rep = ds::bench::run_bench(model, cfg.physics, cal, windows, a.iterations, a.warmup);
  auto out = open_out(out_path(g, a.out, "bench.csv"));
  ds::bench::write_bench_report(out, rep);
  ds::bench::write_bench_report(std::cout, rep);
  return kOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"dualstream: physics proxies + LSTM autoencoder vehicle health scoring"};
  app.require_subcommand(1);

  Globals g;
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--config", g.config, "key=value file for physics, training and fusion settings");
  app.add_option("--output-dir", g.output_dir, "directory for generated files")->capture_default_str();

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "write synthetic missions (telemetry CSV + .meta)");
  generate->add_flag("--corpus", gen.corpus, "full scenario x mass grid");
  generate->add_option("--per-cell", gen.per_cell, "replicates per scenario/mass cell")->capture_default_str();
  generate->add_option("--scenario", gen.scenario, "cruise|pothole|speedbump|ramp|rough")->capture_default_str();
  generate->add_option("--mass", gen.mass, "vehicle mass, kg")->capture_default_str();
  generate->add_option("--duration", gen.duration, "mission length, s")->capture_default_str();
  generate->add_option("--base-speed", gen.base_speed, "cruise speed, m/s");
  generate->add_option("--noise-std", gen.noise_std, "IMU noise std, m/s^2")->capture_default_str();
  generate->add_flag("--no-theta", gen.no_theta, "leave the pitch column empty");

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "train the autoencoder on Normal windows of a corpus");
  train->add_option("--corpus", tr.corpus, "corpus directory")->required();
  train->add_option("--topology", tr.topology, "desk|paper")->capture_default_str();
  train->add_option("--epochs", tr.epochs);
  train->add_option("--batch-size", tr.batch_size);
  train->add_option("--learning-rate", tr.learning_rate);
  train->add_option("--max-windows", tr.max_windows, "subsample the training set (0 = all)");
  train->add_option("--model-out", tr.model_out);
  train->add_option("--loss-out", tr.loss_out);

  CalibrateArgs ca;
  auto* calibrate = app.add_subcommand("calibrate", "fix min-max ranges from a calibration corpus");
  calibrate->add_option("--model", ca.model)->required();
  calibrate->add_option("--corpus", ca.corpus)->required();
  calibrate->add_option("--out", ca.out);

  ScoreArgs sc;
  auto* score = app.add_subcommand("score", "health vector per window");
  score->add_option("--model", sc.model)->required();
  score->add_option("--calibration", sc.calibration);
  score->add_option("--telemetry", sc.telemetry, "telemetry CSV (repeatable)");
  score->add_option("--corpus", sc.corpus);
  score->add_option("--mass", sc.mass, "mass for telemetry without a .meta sidecar");
  score->add_option("--out", sc.out);

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "correlation and rank-sum report from a health CSV");
  analyze->add_option("--health", an.health)->required();
  analyze->add_option("--corpus", an.corpus, "corpus with label metadata")->required();
  analyze->add_option("--correlations-out", an.correlations_out);
  analyze->add_option("--tests-out", an.tests_out);

  BenchArgs be;
  auto* bench = app.add_subcommand("bench", "single-window latency of each stream");
  bench->add_option("--model", be.model, "model file (default: untrained model of --topology)");
  bench->add_option("--topology", be.topology, "desk|paper")->capture_default_str();
  bench->add_option("--calibration", be.calibration);
  bench->add_option("--iterations", be.iterations)->capture_default_str();
  bench->add_option("--warmup", be.warmup)->capture_default_str();
  bench->add_option("--out", be.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*generate) return cmd_generate(g, gen);
    if (*train) return cmd_train(g, tr);
    if (*calibrate) return cmd_calibrate(g, ca);
    if (*score) return cmd_score(g, sc);
    if (*analyze) return cmd_analyze(g, an);
    if (*bench) return cmd_bench(g, be);
  } catch (const ds::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const ds::CalibrationError& e) {
    std::cerr << "calibration error: " << e.what() << '\n';
    return kCalibration;
  } catch (const ds::ModelFormatError& e) {
    std::cerr << "model format error: " << e.what() << '\n';
    return kModelFormat;
  } catch (const ds::InvalidParams& e) {
    std::cerr << "invalid arguments: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
