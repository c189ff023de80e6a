#ifndef DUALSTREAM_BENCH_HPP
#define DUALSTREAM_BENCH_HPP

#include <chrono>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "autoencoder/model.hpp"
#include "error.hpp"
#include "fusion.hpp"
#include "physics.hpp"
#include "telemetry.hpp"
#include "text.hpp"

namespace dualstream::bench {

struct LatencyStats {
  double mean_us = 0.0;
  double std_us = 0.0;

  double standard_error(std::size_t n) const { return std_us / std::sqrt(static_cast<double>(n)); }
};

struct BenchReport {
  LatencyStats stream_a;
  LatencyStats stream_b;
  LatencyStats fused;
  std::size_t iterations = 0;
  std::size_t warmup = 0;
  std::size_t parameter_count = 0;

  double stream_b_ratio() const { return stream_b.mean_us / stream_a.mean_us; }
};

inline constexpr std::size_t kMinIterations = 1000;

namespace detail {

inline volatile double sink = 0.0;

template <class F>
LatencyStats time_each(std::span<const Window> windows, std::size_t iterations, std::size_t warmup, F&& f) {
  for (std::size_t i = 0; i < warmup; ++i) sink = sink + f(windows[i % windows.size()]);
  std::vector<double> us(iterations);
  for (std::size_t i = 0; i < iterations; ++i) {
    const auto& w = windows[i % windows.size()];
    const auto t0 = std::chrono::steady_clock::now();
    const double r = f(w);
    const auto t1 = std::chrono::steady_clock::now();
    sink = sink + r;
    us[i] = std::chrono::duration<double, std::micro>(t1 - t0).count();
  }
  LatencyStats s;
  for (double x : us) s.mean_us += x;
  s.mean_us /= static_cast<double>(iterations);
  double sq = 0.0;
  for (double x : us) sq += (x - s.mean_us) * (x - s.mean_us);
  s.std_us = iterations > 1 ? std::sqrt(sq / static_cast<double>(iterations - 1)) : 0.0;
  return s;
}

} // namespace detail

/// Times stream A scoring, stream B proxies and the full fused pipeline, one
/// window per call (batch = 1) on the calling thread, over a pre-loaded window
/// set so no I/O enters the loop.
inline BenchReport run_bench(const ae::AutoencoderModel& model, const physics::PhysicsParams& params,
                             const fusion::Calibration& cal, std::span<const Window> windows,
                             std::size_t iterations = kMinIterations, std::size_t warmup = 100) {
  if (windows.empty()) throw InvalidParams("bench needs at least one window");
  if (iterations < kMinIterations) throw InvalidParams("bench needs >= 1000 iterations");
  BenchReport rep;
  rep.iterations = iterations;
  rep.warmup = warmup;
  rep.parameter_count = model.params.count();
  rep.stream_a = detail::time_each(windows, iterations, warmup,
                                   [&](const Window& w) { return ae::score(model, w); });
  rep.stream_b = detail::time_each(windows, iterations, warmup, [&](const Window& w) {
    return physics::physics_vector(w, params).proxies.w_drive;
  });
  rep.fused = detail::time_each(windows, iterations, warmup, [&](const Window& w) {
    return fusion::health_pipeline(w, model, params, cal).score;
  });
  return rep;
}

inline void write_bench_report(std::ostream& out, const BenchReport& r) {
  out << "# latency only: energy is not measured (no power meter); compare the stream_b/stream_a ratio\n";
  out << "# single-threaded, batch=1, iterations=" << r.iterations << ", warmup=" << r.warmup
      << ", parameters=" << r.parameter_count << '\n';
  out << "component,mean_us,std_us,iterations\n";
  auto row = [&](const char* name, const LatencyStats& s) {
    out << name << ',' << text::format_double(s.mean_us) << ',' << text::format_double(s.std_us) << ','
        << r.iterations << '\n';
  };
  row("stream_a", r.stream_a);
  row("stream_b", r.stream_b);
  row("fused", r.fused);
  out << "# stream_b/stream_a = " << text::format_double(r.stream_b_ratio()) << '\n';
}

} // namespace dualstream::bench

#endif // DUALSTREAM_BENCH_HPP
