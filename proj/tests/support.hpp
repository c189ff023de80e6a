#ifndef DUALSTREAM_TESTS_SUPPORT_HPP
#define DUALSTREAM_TESTS_SUPPORT_HPP

// Shared fixtures and independent reference implementations for the tests.
// The oracles below are deliberately written as plain loops over raw arrays and
// share no code with the library.

#include <dualstream/dualstream.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace support {

using dualstream::Window;

inline constexpr int N = 30;
inline constexpr double kDt = 0.1;
inline constexpr double kG = 9.80665;

// Random window with plausible magnitudes. Pitch is present on every sample
// unless `with_theta` is false.
inline Window random_window(std::mt19937_64& gen, bool with_theta = true) {
  std::uniform_real_distribution<double> acc(-4.0, 4.0);
  std::uniform_real_distribution<double> speed(0.0, 30.0);
  std::uniform_real_distribution<double> pitch(-0.2, 0.2);
  std::uniform_real_distribution<double> mass(1000.0, 60000.0);
  Window w;
  w.mission_id = "rand";
  w.mass = mass(gen);
  for (int i = 0; i < N; ++i) {
    auto& s = w.samples[i];
    s.t = i * kDt;
    s.a_x = acc(gen);
    s.a_y = acc(gen);
    s.a_z = kG + acc(gen);
    s.v = speed(gen);
    if (with_theta) s.theta = pitch(gen);
  }
  return w;
}

inline Window constant_window(double a_x, double a_y, double a_z, double v, double theta, double mass) {
  Window w;
  w.mission_id = "const";
  w.mass = mass;
  for (int i = 0; i < N; ++i) w.samples[i] = {i * kDt, a_x, a_y, a_z, v, theta};
  return w;
}

namespace oracle {

inline void derivative(const double* x, double* out) {
  for (int i = 0; i < N; ++i) {
    if (i == 0) out[i] = (x[1] - x[0]) / kDt;
    else if (i == N - 1) out[i] = (x[N - 1] - x[N - 2]) / kDt;
    else out[i] = (x[i + 1] - x[i - 1]) / (2.0 * kDt);
  }
}

inline void moving_average(const double* x, double* out) {
  for (int i = 0; i < N; ++i) {
    double sum = 0.0;
    int count = 0;
    for (int j = i - 2; j <= i + 2; ++j) {
      if (j < 0 || j >= N) continue;
      sum += x[j];
      ++count;
    }
    out[i] = sum / count;
  }
}

inline double integrate(const double* y) {
  double s = 0.0;
  for (int i = 1; i < N; ++i) s += kDt * (y[i] + y[i - 1]) / 2.0;
  return s;
}

inline double jerk_energy(const double* accel) {
  double d[N], sm[N], sq[N];
  derivative(accel, d);
  moving_average(d, sm);
  for (int i = 0; i < N; ++i) sq[i] = sm[i] * sm[i];
  return integrate(sq);
}

inline double e_susp(const Window& w, double g = kG) {
  double az[N];
  for (int i = 0; i < N; ++i) az[i] = w.samples[i].a_z - g * std::cos(*w.samples[i].theta);
  return jerk_energy(az);
}

inline double e_lat(const Window& w) {
  double ay[N];
  for (int i = 0; i < N; ++i) ay[i] = w.samples[i].a_y;
  return jerk_energy(ay);
}

inline double w_drive(const Window& w, double c_rr = 0.008, double g = kG) {
  double p[N];
  for (int i = 0; i < N; ++i) {
    const auto& s = w.samples[i];
    double f = w.mass * s.a_x + w.mass * g * std::sin(*s.theta) + c_rr * w.mass * g;
    p[i] = f * s.v > 0.0 ? f * s.v : 0.0;
  }
  return integrate(p);
}

inline double e_brake(const Window& w) {
  double p[N];
  for (int i = 0; i < N; ++i) {
    const auto& s = w.samples[i];
    double f = -w.mass * s.a_x;
    p[i] = (f > 0.0 ? f : 0.0) * s.v;
  }
  return integrate(p);
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double num = 0, dx = 0, dy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    dx += (x[i] - mx) * (x[i] - mx);
    dy += (y[i] - my) * (y[i] - my);
  }
  return num / std::sqrt(dx * dy);
}

// Rank by counting: rank = 1 + #smaller + (#equal - 1) / 2.
inline std::vector<double> ranks(const std::vector<double>& x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double less = 0, equal = 0;
    for (double y : x) {
      if (y < x[i]) less += 1;
      else if (y == x[i]) equal += 1;
    }
    r[i] = 1.0 + less + (equal - 1.0) / 2.0;
  }
  return r;
}

inline double pair_count_u(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0.0;
  for (double x : a)
    for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  return u;
}

} // namespace oracle

// Largest relative disagreement between the analytic BPTT gradient and central
// finite differences (step h) over every parameter of `params`, for one window.
// Relative error is |a - n| / max(|a|, |n|, floor) so parameters with
// vanishing gradients are judged on absolute error.
inline double gradient_check(dualstream::ae::Parameters params, const dualstream::ae::Matrix& x,
                             double h = 1e-5, double floor = 1e-6) {
  using namespace dualstream::ae;
  const auto analytic = backward(params, x).grad;
  auto loss = [&] { return mse_loss(x, forward_trace(params, x).output); };
  auto p_views = params.tensors();
  const auto g_views = analytic.tensors();
  double worst = 0.0;
  for (std::size_t k = 0; k < p_views.size(); ++k) {
    for (std::size_t i = 0; i < p_views[k].size(); ++i) {
      double& p = p_views[k][i];
      const double keep = p;
      p = keep + h;
      const double up = loss();
      p = keep - h;
      const double down = loss();
      p = keep;
      const double numeric = (up - down) / (2.0 * h);
      const double a = g_views[k][i];
      const double scale = std::max({std::abs(a), std::abs(numeric), floor});
      worst = std::max(worst, std::abs(a - numeric) / scale);
    }
  }
  return worst;
}

inline dualstream::ae::Matrix random_features(dualstream::Rng& rng, int rows = 30, int cols = 4) {
  dualstream::ae::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

inline double rel_err(double got, double want) {
  const double scale = std::max({std::abs(got), std::abs(want), 1e-300});
  return std::abs(got - want) / scale;
}

} // namespace support

#endif // DUALSTREAM_TESTS_SUPPORT_HPP
