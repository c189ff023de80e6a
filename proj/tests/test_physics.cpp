#include "support.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace dualstream;
using namespace dualstream::physics;
using support::constant_window;
using support::rel_err;

namespace {

const PhysicsParams kParams{};

std::vector<double> series(std::size_t n, auto f) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = f(static_cast<double>(i));
  return x;
}

} // namespace

TEST(Params, Validation) {
  EXPECT_NO_THROW(kParams.validate());
  PhysicsParams p;
  p.c_rr = 0.06;
  EXPECT_THROW(p.validate(), InvalidParams);
  p = {};
  p.g = 0;
  EXPECT_THROW(p.validate(), InvalidParams);
  p = {};
  p.dt = 0.2;
  EXPECT_THROW(p.validate(), InvalidParams);
}

TEST(CentralDiff, Constant) {
  for (double d : central_diff(std::vector<double>(30, 4.2), 0.1)) EXPECT_EQ(d, 0.0);
}

TEST(CentralDiff, ExactOnQuadratics) {
  const double dt = 0.1;
  const auto x = series(30, [&](double i) { return (i * dt) * (i * dt); });
  const auto d = central_diff(x, dt);
  for (int i = 1; i < 29; ++i) EXPECT_NEAR(d[i], 2.0 * i * dt, 1e-11);
}

TEST(CentralDiff, CubicErrorTerm) {
  const double dt = 0.1;
  const auto x = series(30, [&](double i) { return std::pow(i * dt, 3); });
  const auto d = central_diff(x, dt);
  for (int i = 1; i < 29; ++i) EXPECT_NEAR(d[i], 3.0 * std::pow(i * dt, 2) + dt * dt, 1e-11);
}

TEST(CentralDiff, Endpoints) {
  const std::vector<double> x{1.0, 3.0, 4.0, 10.0};
  const auto d = central_diff(x, 0.5);
  EXPECT_DOUBLE_EQ(d[0], 4.0);
  EXPECT_DOUBLE_EQ(d[1], 3.0);
  EXPECT_DOUBLE_EQ(d[2], 7.0);
  EXPECT_DOUBLE_EQ(d[3], 12.0);
}

TEST(CentralDiff, TooShort) {
  EXPECT_THROW(central_diff(std::vector<double>{1.0, 2.0}, 0.1), SeriesTooShort);
}

TEST(Smooth, Constant) {
  for (double v : smooth_ma5(std::vector<double>(30, -2.5))) EXPECT_DOUBLE_EQ(v, -2.5);
}

TEST(Smooth, ImpulseEdgeTruncation) {
  const auto y = smooth_ma5(std::vector<double>{0, 0, 1, 0, 0});
  const double want[] = {1.0 / 3, 1.0 / 4, 1.0 / 5, 1.0 / 4, 1.0 / 3};
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(y[i], want[i], 1e-15);
}

TEST(Smooth, LinearInteriorPreserved) {
  const auto x = series(30, [](double i) { return 3.0 * i - 7.0; });
  const auto y = smooth_ma5(x);
  for (int i = 2; i < 28; ++i) EXPECT_NEAR(y[i], x[i], 1e-12);
}

TEST(GravityCompensate, HandValues) {
  const double g = kStandardGravity;
  EXPECT_EQ(gravity_compensate(std::vector<double>{g}, std::vector<double>{0.0}, g)[0], 0.0);
  EXPECT_NEAR(gravity_compensate(std::vector<double>{g}, std::vector<double>{std::numbers::pi / 3}, g)[0],
              4.903325, 1e-12);
  EXPECT_NEAR(gravity_compensate(std::vector<double>{10.5}, std::vector<double>{0.0}, g)[0], 0.69335, 1e-12);
}

TEST(Pitch, PassthroughWhenMeasured) {
  const auto w = constant_window(0.3, 0, 9.8, 10, 0.05, 1000);
  const auto est = estimate_pitch(w, kParams);
  EXPECT_EQ(est.source, ThetaSource::Measured);
  for (double th : est.theta) EXPECT_EQ(th, 0.05);
}

TEST(Pitch, StationaryIsLevel) {
  auto w = constant_window(0, 0, 9.8, 0, 0, 1000);
  for (auto& s : w.samples) s.theta.reset();
  const auto est = estimate_pitch(w, kParams);
  EXPECT_EQ(est.source, ThetaSource::Estimated);
  for (double th : est.theta) EXPECT_EQ(th, 0.0);
}

TEST(Pitch, RecoversConstantGrade) {
  const double g = kStandardGravity;
  auto w = constant_window(g * std::sin(0.1), 0, g * std::cos(0.1), 10, 0, 1000);
  for (auto& s : w.samples) s.theta.reset();
  const auto est = estimate_pitch(w, kParams);
  for (double th : est.theta) EXPECT_NEAR(th, 0.1, 1e-6);
}

TEST(Suspension, FlatRoadIsZero) {
  const auto w = constant_window(0, 0, kStandardGravity, 10, 0, 1000);
  EXPECT_EQ(suspension_stress(w, kParams), 0.0);
}

TEST(Suspension, SineMatchesOracleAndContinuousForm) {
  const double f = 1.0;
  const double two_pi_f = 2.0 * std::numbers::pi * f;
  auto w = constant_window(0, 0, 0, 10, 0, 1000);
  for (int i = 0; i < 30; ++i) w.samples[i].a_z = kStandardGravity + std::sin(two_pi_f * i * 0.1);
  const double module = suspension_stress(w, kParams);
  EXPECT_LT(rel_err(module, support::oracle::e_susp(w)), 1e-9);

  // Closed form of the continuous integral against a dense trapezoid.
  const double T = 2.9;
  const double closed = two_pi_f * two_pi_f * (T / 2 + std::sin(4 * std::numbers::pi * f * T) / (8 * std::numbers::pi * f));
  const int M = 10000;
  double dense = 0.0;
  for (int k = 0; k < M; ++k) {
    const double t0 = T * k / M, t1 = T * (k + 1) / M;
    const double y0 = std::pow(two_pi_f * std::cos(two_pi_f * t0), 2);
    const double y1 = std::pow(two_pi_f * std::cos(two_pi_f * t1), 2);
    dense += (t1 - t0) * (y0 + y1) / 2;
  }
  EXPECT_LT(rel_err(dense, closed), 1e-6);
  // The discrete pipeline low-passes the jerk, so it sits below the continuous value.
  EXPECT_GT(module, 0.0);
  EXPECT_LT(module, closed);
}

TEST(Suspension, QuadraticHomogeneity) {
  std::mt19937_64 gen(3);
  auto w = support::random_window(gen);
  for (auto& s : w.samples) s.theta = 0.0;
  auto w2 = w;
  for (auto& s : w2.samples) s.a_z = kStandardGravity + 2.0 * (s.a_z - kStandardGravity);
  EXPECT_LT(rel_err(suspension_stress(w2, kParams), 4.0 * suspension_stress(w, kParams)), 1e-12);
}

TEST(Lateral, ConstantIsZero) {
  EXPECT_EQ(lateral_stress(constant_window(0, 1.7, 9.8, 10, 0, 1000), kParams), 0.0);
}

TEST(Lateral, AlternatingMatchesOracle) {
  auto w = constant_window(0, 0, 9.8, 10, 0, 1000);
  for (int i = 0; i < 30; ++i) w.samples[i].a_y = i % 2 ? -2.0 : 2.0;
  const double e = lateral_stress(w, kParams);
  EXPECT_GT(e, 0.0);
  EXPECT_LT(rel_err(e, support::oracle::e_lat(w)), 1e-9);
}

TEST(Lateral, ScalesWithSquare) {
  std::mt19937_64 gen(8);
  auto w = support::random_window(gen);
  auto w3 = w;
  for (auto& s : w3.samples) s.a_y *= 3.0;
  EXPECT_LT(rel_err(lateral_stress(w3, kParams), 9.0 * lateral_stress(w, kParams)), 1e-12);
}

TEST(Drivetrain, NoMotionNoWork) {
  EXPECT_EQ(drivetrain_stress(constant_window(1.0, 0, 9.8, 0, 0.1, 10000), kParams), 0.0);
}

TEST(Drivetrain, LevelCruiseClosedForm) {
  const auto w = constant_window(0, 0, kStandardGravity, 20, 0, 10000);
  for (double p : drive_power_series(w, kParams)) EXPECT_NEAR(p, 15690.64, 1e-9);
  EXPECT_NEAR(drivetrain_stress(w, kParams), 45502.856, 1e-6);
}

TEST(Drivetrain, HardDecelerationClamped) {
  EXPECT_EQ(drivetrain_stress(constant_window(-3.0, 0, 9.8, 15, 0, 10000), kParams), 0.0);
}

TEST(Drivetrain, GradeIncreasesWork) {
  const auto flat = constant_window(0, 0, 9.8, 12, 0, 10000);
  const auto hill = constant_window(0, 0, 9.8, 12, 0.03, 10000);
  EXPECT_GT(drivetrain_stress(hill, kParams), drivetrain_stress(flat, kParams));
}

TEST(Braking, NoDeceleration) {
  EXPECT_EQ(braking_stress(constant_window(0.5, 0, 9.8, 15, 0, 10000), kParams), 0.0);
}

TEST(Braking, ConstantClosedForm) {
  EXPECT_NEAR(braking_stress(constant_window(-2.0, 0, 9.8, 15, 0, 10000), kParams), 870000.0, 1e-6);
}

TEST(Braking, MirrorOfAcceleration) {
  std::mt19937_64 gen(12);
  auto w = support::random_window(gen);
  for (auto& s : w.samples) s.a_x = std::abs(s.a_x);
  auto mirror = w;
  for (auto& s : mirror.samples) s.a_x = -s.a_x;
  std::vector<double> work(30);
  for (int i = 0; i < 30; ++i) work[i] = w.mass * w.samples[i].a_x * w.samples[i].v;
  EXPECT_LT(rel_err(braking_stress(mirror, kParams), trapezoid(work, 0.1)), 1e-12);
}

TEST(PhysicsVector, ParkedIsZero) {
  const auto p = physics_vector(constant_window(0, 0, kStandardGravity, 0, 0, 9000), kParams).proxies;
  EXPECT_EQ(p, (PhysicsProxies{0, 0, 0, 0}));
}

TEST(PhysicsVector, BitIdenticalToStandalone) {
  std::mt19937_64 gen(21);
  for (int k = 0; k < 100; ++k) {
    const auto w = support::random_window(gen, k % 3 != 0);
    const auto r = physics_vector(w, kParams);
    EXPECT_EQ(r.proxies.e_susp, suspension_stress(w, kParams));
    EXPECT_EQ(r.proxies.e_lat, lateral_stress(w, kParams));
    EXPECT_EQ(r.proxies.w_drive, drivetrain_stress(w, kParams));
    EXPECT_EQ(r.proxies.e_brake, braking_stress(w, kParams));
    EXPECT_EQ(r.theta_source, k % 3 != 0 ? ThetaSource::Measured : ThetaSource::Estimated);
  }
}

TEST(PhysicsVector, MatchesNaiveOracle) {
  std::mt19937_64 gen(22);
  for (int k = 0; k < 1000; ++k) {
    const auto w = support::random_window(gen);
    const auto p = physics_vector(w, kParams).proxies;
    EXPECT_LT(rel_err(p.e_susp, support::oracle::e_susp(w)), 1e-9);
    EXPECT_LT(rel_err(p.e_lat, support::oracle::e_lat(w)), 1e-9);
    EXPECT_LT(rel_err(p.w_drive, support::oracle::w_drive(w)), 1e-9);
    EXPECT_LT(rel_err(p.e_brake, support::oracle::e_brake(w)), 1e-9);
  }
}

TEST(PhysicsVector, NonNegativeProperty) {
  std::mt19937_64 gen(23);
  for (int k = 0; k < 2000; ++k) {
    const auto p = physics_vector(support::random_window(gen, k % 2), kParams).proxies;
    for (double x : {p.e_susp, p.e_lat, p.w_drive, p.e_brake}) {
      EXPECT_GE(x, 0.0);
      EXPECT_TRUE(std::isfinite(x));
    }
  }
}

TEST(PhysicsVector, MassMonotonicity) {
  std::mt19937_64 gen(24);
  for (int k = 0; k < 200; ++k) {
    auto w = support::random_window(gen);
    auto heavy = w;
    heavy.mass = w.mass * 1.3;
    const auto a = physics_vector(w, kParams).proxies;
    const auto b = physics_vector(heavy, kParams).proxies;
    if (a.w_drive > 0) {
      EXPECT_GT(b.w_drive, a.w_drive);
    }
    if (a.e_brake > 0) {
      EXPECT_GT(b.e_brake, a.e_brake);
    }
    EXPECT_EQ(a.e_susp, b.e_susp);
    EXPECT_EQ(a.e_lat, b.e_lat);
  }
}

TEST(PhysicsVector, RampBeatsMatchedCruise) {
  synth::MissionSpec ramp;
  ramp.scenario = synth::Scenario::Ramp;
  ramp.base_speed = 10;
  ramp.seed = 5;
  auto cruise = ramp;
  cruise.scenario = synth::Scenario::Cruise;
  const auto wr = synth::generate_mission(ramp).windows().windows;
  const auto wc = synth::generate_mission(cruise).windows().windows;
  ASSERT_EQ(wr.size(), wc.size());
  for (std::size_t i = 0; i < wr.size(); ++i)
    EXPECT_GT(drivetrain_stress(wr[i], kParams), drivetrain_stress(wc[i], kParams));
}

TEST(ProxyRecord, Format) {
  const auto w = constant_window(0, 0, kStandardGravity, 20, 0, 10000);
  const auto line = format_proxy_record(w, physics_vector(w, kParams));
  EXPECT_EQ(line.substr(0, 10), "const,0,0,");
  EXPECT_EQ(line.substr(line.size() - 9), ",measured");
}
