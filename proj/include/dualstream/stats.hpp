#ifndef DUALSTREAM_STATS_HPP
#define DUALSTREAM_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "fusion.hpp"
#include "telemetry.hpp"
#include "text.hpp"

namespace dualstream::stats {

namespace detail {

inline void require_pair(std::span<const double> x, std::span<const double> y, const char* who) {
  if (x.size() != y.size()) throw DegenerateInput(std::string(who) + ": length mismatch");
  if (x.size() < 3) throw DegenerateInput(std::string(who) + ": need at least 3 points");
}

} // namespace detail

/// Product-moment correlation, two-pass (means first).
inline double pearson(std::span<const double> x, std::span<const double> y) {
  detail::require_pair(x, y, "pearson");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw DegenerateInput("pearson: constant series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// 1-based mid-ranks; tied values share the average of their positions.
inline std::vector<double> midranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && x[order[j]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + 1 + j); // mean of i+1 .. j
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

inline double spearman(std::span<const double> x, std::span<const double> y) {
  detail::require_pair(x, y, "spearman");
  const auto rx = midranks(x);
  const auto ry = midranks(y);
  return pearson(rx, ry);
}

inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

struct MannWhitneyResult {
  double u_a = 0.0; ///< #{a_i > b_j} + 0.5 #{a_i == b_j}
  double u_b = 0.0;
  double z = 0.0;
  double p_two_sided = 1.0;
};

/// U statistic of sample a (ties count half) from the joint rank sum.
inline double u_statistic(std::span<const double> a, std::span<const double> b) {
  std::vector<double> joint(a.begin(), a.end());
  joint.insert(joint.end(), b.begin(), b.end());
  const auto r = midranks(joint);
  const double r_a = std::accumulate(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(a.size()), 0.0);
  const double na = static_cast<double>(a.size());
  return r_a - na * (na + 1.0) / 2.0;
}

inline constexpr std::size_t kMinGroupSize = 8;

/// Two-sided Mann-Whitney test, normal approximation with tie-corrected
/// variance and continuity correction. Groups smaller than 8 are rejected.
inline MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.size() < kMinGroupSize || b.size() < kMinGroupSize)
    throw SmallSample("mann_whitney_u: each group needs >= 8 observations");
  std::vector<double> joint(a.begin(), a.end());
  joint.insert(joint.end(), b.begin(), b.end());
  const auto r = midranks(joint);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double n = na + nb;
  const double r_a = std::accumulate(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(a.size()), 0.0);

  MannWhitneyResult out;
  out.u_a = r_a - na * (na + 1.0) / 2.0;
  out.u_b = na * nb - out.u_a;

  // Tie correction: sum over tie groups of (t^3 - t).
  std::vector<double> sorted = joint;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double mean_u = na * nb / 2.0;
  const double var_u = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (!(var_u > 0.0)) {
    out.z = 0.0;
    out.p_two_sided = 1.0;
    return out;
  }
  const double diff = out.u_a - mean_u;
  const double corrected = std::max(0.0, std::abs(diff) - 0.5);
  out.z = std::copysign(corrected / std::sqrt(var_u), diff);
  out.p_two_sided = std::min(1.0, 2.0 * normal_sf(std::abs(out.z)));
  return out;
}

/// Empirical quantile, linear interpolation between order statistics.
inline double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InsufficientData("quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(values.size() - 1, lo + 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

// ---- correlation report ------------------------------------------------------

/// One window's scores joined with its ground truth.
struct LabeledRecord {
  double a_ml = 0.0;
  physics::PhysicsProxies proxies;
  Label label = Label::Normal;
  double mass = 0.0;
};

struct CorrelationRow {
  std::string pair;  ///< e.g. "a_ml~e_lat"
  std::string scope; ///< "global", "label=Pothole", "mass=10900", "top10:w_drive"
  std::size_t n = 0;
  std::optional<double> pearson_r;
  std::optional<double> spearman_rho;
};

struct TestRow {
  std::string proxy;
  std::string group_a;
  std::string group_b;
  double u = 0.0;
  double p = 1.0;
};

struct CorrelationReport {
  std::vector<CorrelationRow> rows;
  std::vector<TestRow> tests;

  const CorrelationRow* find(std::string_view pair, std::string_view scope) const {
    for (const auto& r : rows)
      if (r.pair == pair && r.scope == scope) return &r;
    return nullptr;
  }
};

inline constexpr std::size_t kMinReportWindows = 500;

namespace detail {

inline CorrelationRow correlate(const std::vector<const LabeledRecord*>& subset, fusion::Channel proxy,
                                std::string scope) {
  CorrelationRow row;
  row.pair = "a_ml~" + std::string(fusion::to_string(proxy));
  row.scope = std::move(scope);
  row.n = subset.size();
  std::vector<double> x, y;
  x.reserve(subset.size());
  y.reserve(subset.size());
  for (const auto* r : subset) {
    x.push_back(r->a_ml);
    y.push_back(fusion::proxy_value(r->proxies, proxy));
  }
  try {
    row.pearson_r = pearson(x, y);
    row.spearman_rho = spearman(x, y);
  } catch (const DegenerateInput&) {
    // too few points or a constant column in this scope: left empty in the CSV
  }
  return row;
}

} // namespace detail

/// Global, per-label, per-mass and top-decile correlations of a_ml with every
/// proxy, plus rank-sum tests of each proxy between every label and Normal and
/// of w_drive against mass.
inline CorrelationReport correlation_report(std::span<const LabeledRecord> records) {
  if (records.size() < kMinReportWindows)
    throw InsufficientData("correlation_report needs >= 500 windows, got " + std::to_string(records.size()));
  CorrelationReport rep;

  std::vector<const LabeledRecord*> all;
  for (const auto& r : records) all.push_back(&r);

  std::map<Label, std::vector<const LabeledRecord*>> by_label;
  std::map<long, std::vector<const LabeledRecord*>> by_mass;
  for (const auto* r : all) {
    by_label[r->label].push_back(r);
    by_mass[std::lround(r->mass)].push_back(r);
  }

  for (auto proxy : fusion::kProxyChannels) {
    rep.rows.push_back(detail::correlate(all, proxy, "global"));
    for (const auto& [label, subset] : by_label)
      rep.rows.push_back(detail::correlate(subset, proxy, "label=" + std::string(to_string(label))));
    for (const auto& [mass, subset] : by_mass)
      rep.rows.push_back(detail::correlate(subset, proxy, "mass=" + std::to_string(mass)));
    // top decile by this proxy
    std::vector<double> values;
    for (const auto* r : all) values.push_back(fusion::proxy_value(r->proxies, proxy));
    const double cut = quantile(values, 0.9);
    std::vector<const LabeledRecord*> top;
    for (const auto* r : all)
      if (fusion::proxy_value(r->proxies, proxy) >= cut) top.push_back(r);
    rep.rows.push_back(detail::correlate(top, proxy, "top10:" + std::string(fusion::to_string(proxy))));
  }

  // Mass vs drivetrain work.
  {
    CorrelationRow row;
    row.pair = "mass~w_drive";
    row.scope = "global";
    row.n = all.size();
    std::vector<double> m, w;
    for (const auto* r : all) {
      m.push_back(r->mass);
      w.push_back(r->proxies.w_drive);
    }
    try {
      row.pearson_r = pearson(m, w);
      row.spearman_rho = spearman(m, w);
    } catch (const DegenerateInput&) {
    }
    rep.rows.push_back(row);
  }

  const auto normal_it = by_label.find(Label::Normal);
  if (normal_it != by_label.end()) {
    for (auto proxy : fusion::kProxyChannels) {
      std::vector<double> base;
      for (const auto* r : normal_it->second) base.push_back(fusion::proxy_value(r->proxies, proxy));
      for (const auto& [label, subset] : by_label) {
        if (label == Label::Normal) continue;
        std::vector<double> grp;
        for (const auto* r : subset) grp.push_back(fusion::proxy_value(r->proxies, proxy));
        if (grp.size() < kMinGroupSize || base.size() < kMinGroupSize) continue;
        const auto mw = mann_whitney_u(grp, base);
        rep.tests.push_back({std::string(fusion::to_string(proxy)), std::string(to_string(label)),
                             "Normal", mw.u_a, mw.p_two_sided});
      }
    }
  }
  return rep;
}

inline void write_correlation_csv(std::ostream& out, const CorrelationReport& rep) {
  out << "pair,scope,n,pearson_r,spearman_rho\n";
  for (const auto& r : rep.rows) {
    out << r.pair << ',' << r.scope << ',' << r.n << ',';
    if (r.pearson_r) out << text::format_double(*r.pearson_r);
    out << ',';
    if (r.spearman_rho) out << text::format_double(*r.spearman_rho);
    out << '\n';
  }
}

inline void write_test_csv(std::ostream& out, const CorrelationReport& rep) {
  out << "proxy,group_a,group_b,U,p\n";
  for (const auto& t : rep.tests)
    out << t.proxy << ',' << t.group_a << ',' << t.group_b << ',' << text::format_double(t.u) << ','
        << text::format_double(t.p) << '\n';
}

} // namespace dualstream::stats

#endif // DUALSTREAM_STATS_HPP
