#include "support.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace dualstream;
using namespace dualstream::synth;

namespace {

const physics::PhysicsParams kParams{};

MissionSpec spec_for(Scenario s, std::uint64_t seed = 3) {
  MissionSpec spec;
  spec.scenario = s;
  spec.seed = seed;
  spec.base_speed = 12.0;
  return spec;
}

} // namespace

TEST(MissionSpec, Validation) {
  auto s = spec_for(Scenario::Cruise);
  s.duration = 20;
  EXPECT_THROW(generate_mission(s), InvalidParams);
  s = spec_for(Scenario::Cruise);
  s.base_speed = 0;
  EXPECT_THROW(generate_mission(s), InvalidParams);
  EXPECT_THROW(scenario_from_string("offroad"), InvalidParams);
  EXPECT_EQ(scenario_from_string("speedbump"), Scenario::SpeedBump);
}

TEST(Generate, NoiselessCruiseIsFlat) {
  auto s = spec_for(Scenario::Cruise);
  s.noise_std = 0.0;
  const auto m = generate_mission(s);
  for (const auto& x : m.samples) {
    EXPECT_EQ(x.a_z, physics::kStandardGravity);
    EXPECT_EQ(x.a_y, 0.0);
  }
  for (const auto& w : m.windows().windows) {
    const auto p = physics::physics_vector(w, kParams).proxies;
    EXPECT_EQ(p.e_susp, 0.0);
    EXPECT_EQ(p.e_lat, 0.0);
    EXPECT_EQ(w.label, Label::Normal);
  }
}

TEST(Generate, Deterministic) {
  for (auto sc : kAllScenarios) {
    const auto a = generate_mission(spec_for(sc, 9));
    const auto b = generate_mission(spec_for(sc, 9));
    EXPECT_EQ(a.samples, b.samples);
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_NE(a.samples, generate_mission(spec_for(sc, 10)).samples);
  }
}

TEST(Generate, RampClosedFormNoiseless) {
  auto s = spec_for(Scenario::Ramp);
  s.base_speed = 10.0;
  s.mass = 10900;
  s.noise_std = 0.0;
  s.speed_jitter = 0.0;
  const double g = physics::kStandardGravity;
  const double expected = (s.mass * g * std::sin(0.08) + 0.008 * s.mass * g) * 10.0 * 2.9;
  for (const auto& w : generate_mission(s).windows().windows)
    EXPECT_LT(support::rel_err(physics::drivetrain_stress(w, kParams), expected), 1e-12);
}

TEST(Generate, RampClosedFormDefaultNoise) {
  auto s = spec_for(Scenario::Ramp);
  s.base_speed = 10.0;
  s.mass = 10900;
  const double g = physics::kStandardGravity;
  const double expected = (s.mass * g * std::sin(0.08) + 0.008 * s.mass * g) * 10.0 * 2.9;
  const auto ws = generate_mission(s).windows().windows;
  double sum = 0;
  const double force = s.mass * g * std::sin(0.08) + 0.008 * s.mass * g;
  for (const auto& w : ws) {
    const double wd = physics::drivetrain_stress(w, kParams);
    // Work-energy balance on the window's own speed trace: grade and rolling
    // force times distance, plus the kinetic energy change the jitter adds.
    // What is left is IMU noise on a_x.
    double v[support::N];
    for (int i = 0; i < support::N; ++i) v[i] = w.samples[i].v;
    const double kinetic = 0.5 * s.mass * (v[support::N - 1] * v[support::N - 1] - v[0] * v[0]);
    EXPECT_LT(support::rel_err(wd, force * support::oracle::integrate(v) + kinetic), 0.05);
    sum += wd;
  }
  EXPECT_LT(support::rel_err(sum / ws.size(), expected), 0.01);
}

TEST(Generate, RampPitchIsGradeExactly) {
  const auto m = generate_mission(spec_for(Scenario::Ramp));
  for (const auto& w : m.windows().windows) {
    EXPECT_EQ(w.label, Label::Ramp);
    for (const auto& x : w.samples) EXPECT_EQ(*x.theta, 0.08);
  }
}

TEST(Generate, EveryPotholeWindowHasAnEvent) {
  for (auto sc : {Scenario::Pothole, Scenario::SpeedBump}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto with = generate_mission(spec_for(sc, seed));
      auto quiet_spec = spec_for(sc, seed);
      quiet_spec.event_rate = 0.0;
      const auto quiet = generate_mission(quiet_spec);
      int events = 0;
      for (std::size_t wi = 0; wi < with.labels.size(); ++wi) {
        double peak = 0.0;
        for (std::size_t i = wi * 30; i < wi * 30 + 30; ++i)
          peak = std::max(peak, std::abs(with.samples[i].a_z - quiet.samples[i].a_z));
        if (with.labels[wi] == Label::Pothole) {
          ++events;
          EXPECT_GE(peak, sc == Scenario::Pothole ? kPotholeAmplitudeMin * kPotholeReboundRatio : 1.0);
        } else {
          EXPECT_EQ(peak, 0.0);
          EXPECT_EQ(with.labels[wi], Label::Normal);
        }
      }
      EXPECT_GT(events, 0);
    }
  }
}

TEST(Generate, PhysicallyPlausible) {
  for (auto sc : kAllScenarios)
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      auto s = spec_for(sc, seed);
      s.noise_std = 0.5;
      const double gz = sc == Scenario::Ramp ? physics::kStandardGravity * std::cos(0.08) : physics::kStandardGravity;
      for (const auto& x : generate_mission(s).samples) {
        EXPECT_GE(x.v, 0.0);
        EXPECT_LE(std::abs(x.a_x), 15.0);
        EXPECT_LE(std::abs(x.a_y), 15.0);
        EXPECT_LE(std::abs(x.a_z - gz), 15.0);
      }
    }
}

TEST(Generate, RoughTerrainLabelAndElevatedVibration) {
  const auto rough = generate_mission(spec_for(Scenario::RoughTerrain));
  const auto cruise = generate_mission(spec_for(Scenario::Cruise));
  auto stdev = [](const Mission& m, auto field) {
    double s = 0, s2 = 0;
    for (const auto& x : m.samples) {
      s += field(x);
      s2 += field(x) * field(x);
    }
    const double n = static_cast<double>(m.samples.size());
    return std::sqrt(s2 / n - (s / n) * (s / n));
  };
  auto az = [](const Sample& x) { return x.a_z; };
  auto ay = [](const Sample& x) { return x.a_y; };
  EXPECT_GT(stdev(rough, az), 5.0 * stdev(cruise, az));
  EXPECT_GT(stdev(rough, ay), 5.0 * stdev(cruise, ay));
  for (auto l : rough.labels) EXPECT_EQ(l, Label::RoughTerrain);
}

TEST(Generate, NoThetaFlag) {
  auto s = spec_for(Scenario::Ramp);
  s.emit_theta = false;
  const auto w = generate_mission(s).windows().windows.front();
  EXPECT_FALSE(w.has_full_pitch());
  EXPECT_EQ(physics::physics_vector(w, kParams).theta_source, physics::ThetaSource::Estimated);
}

TEST(Corpus, GridSize) {
  CorpusSpec cs;
  cs.per_cell = 2;
  cs.seed = 1;
  const auto specs = corpus_specs(cs);
  EXPECT_EQ(specs.size(), 30u);
  std::map<std::pair<Scenario, long>, int> cells;
  for (const auto& s : specs) ++cells[{s.scenario, std::lround(s.mass)}];
  EXPECT_EQ(cells.size(), 15u);
  for (const auto& [cell, n] : cells) EXPECT_EQ(n, 2);
}

TEST(Corpus, BalancedAndDigestStable) {
  CorpusSpec cs;
  cs.per_cell = 1;
  cs.seed = 4;
  const auto a = generate_corpus(cs);
  const auto b = generate_corpus(cs);
  EXPECT_EQ(corpus_digest(a), corpus_digest(b));
  cs.seed = 5;
  EXPECT_NE(corpus_digest(a), corpus_digest(generate_corpus(cs)));
  std::map<Scenario, std::size_t> windows;
  for (const auto& m : a) windows[m.scenario] += m.labels.size();
  for (const auto& [sc, n] : windows) EXPECT_EQ(n, windows.begin()->second);
}

TEST(Corpus, MassOnlyDiffersAcrossMatchedMissions) {
  CorpusSpec cs;
  cs.per_cell = 1;
  cs.scenarios = {Scenario::Ramp};
  const auto ms = generate_corpus(cs);
  ASSERT_EQ(ms.size(), 3u);
  EXPECT_EQ(ms[0].samples, ms[1].samples);
  EXPECT_EQ(ms[1].samples, ms[2].samples);
  EXPECT_LT(ms[0].mass, ms[1].mass);
}

TEST(Corpus, ProxySeparation) {
  CorpusSpec cs;
  cs.per_cell = 2;
  cs.seed = 8;
  const auto ws = corpus_windows(generate_corpus(cs));
  std::map<Label, std::vector<double>> susp, drive;
  for (const auto& w : ws) {
    const auto p = physics::physics_vector(w, kParams).proxies;
    susp[*w.label].push_back(p.e_susp);
    drive[*w.label].push_back(p.w_drive);
  }
  auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
  EXPECT_GT(mean(susp[Label::Pothole]), mean(susp[Label::Normal]));
  EXPECT_GT(mean(drive[Label::Ramp]), mean(drive[Label::Normal]));
  EXPECT_LT(stats::mann_whitney_u(susp[Label::Pothole], susp[Label::Normal]).p_two_sided, 1e-3);
  EXPECT_LT(stats::mann_whitney_u(drive[Label::Ramp], drive[Label::Normal]).p_two_sided, 1e-3);
}

TEST(CorpusFiles, WriteLoadRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "dualstream_corpus_io_test";
  std::filesystem::remove_all(dir);
  CorpusSpec cs;
  cs.per_cell = 1;
  cs.scenarios = {Scenario::Cruise, Scenario::Pothole};
  cs.masses = {9000};
  const auto ms = generate_corpus(cs);
  write_corpus(dir, ms);
  const auto loaded = load_corpus(dir);
  ASSERT_EQ(loaded.size(), 2u);
  const auto ws = corpus_windows(loaded);
  const auto orig = corpus_windows(ms);
  ASSERT_EQ(ws.size(), orig.size());
  std::size_t same = 0;
  for (const auto& w : ws)
    for (const auto& o : orig)
      if (o.mission_id == w.mission_id && o.index == w.index) {
        EXPECT_EQ(o.samples, w.samples);
        EXPECT_EQ(o.label, w.label);
        EXPECT_EQ(o.mass, w.mass);
        ++same;
      }
  EXPECT_EQ(same, ws.size());
  std::filesystem::remove_all(dir);
}
