// Copyright 2026 the tracelens authors. All rights reserved.
// Use of this source code is governed by the Apache-2.0 license
// that can be found in the LICENSE file.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tracelens/trace_model.hpp"

// Numeric kernels: resampling, period splitting, summary statistics, ECDF,
// box statistics, Gaussian kernel density curves, seasonal profiles and
// rack grouping. Every function here is pure.

namespace tracelens {

// ---------------------------------------------------------------------------
// Quantiles (linear interpolation between closest ranks, the "type 7" rule).

inline double quantile_sorted(std::span<const double> sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 0) throw Error(Errc::empty_input, "quantile of empty data");
  if (n == 1) return sorted[0];
  double pos = p * static_cast<double>(n - 1);
  if (pos <= 0) return sorted[0];
  if (pos >= static_cast<double>(n - 1)) return sorted[n - 1];
  std::size_t lo = static_cast<std::size_t>(pos);
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

// ---------------------------------------------------------------------------
// Summary statistics.

struct StatsSummary {
  std::size_t count = 0;
  double mean = 0;
  double std_dev = 0;  // population, ddof = 0
  double min = 0;
  double q1 = 0;
  double median = 0;
  double q3 = 0;
  double max = 0;
};

inline StatsSummary summary_stats(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::empty_input, "summary of empty data");

  // Welford's online recurrence; the test oracle uses the two-pass form.
  double mean = 0;
  double m2 = 0;
  std::size_t k = 0;
  for (double v : values) {
    ++k;
    double d = v - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (v - mean);
  }

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  StatsSummary s;
  s.count = values.size();
  s.mean = mean;
  s.std_dev = std::sqrt(m2 / static_cast<double>(values.size()));
  s.min = sorted.front();
  s.q1 = quantile_sorted(sorted, 0.25);
  s.median = quantile_sorted(sorted, 0.5);
  s.q3 = quantile_sorted(sorted, 0.75);
  s.max = sorted.back();
  return s;
}

// ---------------------------------------------------------------------------
// Empirical CDF over unique values.

struct EcdfCurve {
  std::vector<double> x;  // sorted unique values
  std::vector<double> p;  // strictly increasing, p.back() == 1
};

inline EcdfCurve ecdf(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::empty_input, "ecdf of empty data");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  EcdfCurve curve;
  const double n = static_cast<double>(sorted.size());
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    curve.x.push_back(sorted[i]);
    curve.p.push_back(static_cast<double>(j) / n);
    i = j;
  }
  return curve;
}

// ---------------------------------------------------------------------------
// Box statistics with Tukey fences at 1.5 * IQR.

struct BoxStats {
  double q1 = 0;
  double median = 0;
  double q3 = 0;
  double iqr = 0;
  double whisker_low = 0;   // most extreme data points within the fences
  double whisker_high = 0;
  std::vector<double> outliers;  // sorted ascending
};

inline BoxStats box_stats(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::empty_input, "box stats of empty data");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  BoxStats b;
  b.q1 = quantile_sorted(sorted, 0.25);
  b.median = quantile_sorted(sorted, 0.5);
  b.q3 = quantile_sorted(sorted, 0.75);
  b.iqr = b.q3 - b.q1;
  const double fence_low = b.q1 - 1.5 * b.iqr;
  const double fence_high = b.q3 + 1.5 * b.iqr;

  b.whisker_low = b.q1;
  b.whisker_high = b.q3;
  bool any_inside = false;
  for (double v : sorted) {
    if (v < fence_low || v > fence_high) {
      b.outliers.push_back(v);
    } else {
      if (!any_inside) b.whisker_low = v;
      b.whisker_high = v;
      any_inside = true;
    }
  }
  return b;
}

// ---------------------------------------------------------------------------
// Gaussian kernel density estimate, Scott bandwidth.

struct DensityCurve {
  std::vector<double> grid;     // 200 evenly spaced evaluation points
  std::vector<double> density;  // nonnegative, trapezoid integral ~ 1
  double max_density = 0;
  double bandwidth = 0;
};

inline constexpr std::size_t kKdeGridSize = 200;

// h = sigma * n^(-1/5) with sigma the sample standard deviation (ddof = 1).
// The grid spans the data padded by three bandwidths per side so the
// trapezoid integral stays within [0.98, 1.02] even for tiny samples.
inline DensityCurve kde(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) {
    throw Error(Errc::degenerate_distribution,
                "kde needs at least two values");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) {
    throw Error(Errc::degenerate_distribution, "kde needs nonzero spread");
  }

  double mean = 0;
  for (double v : sorted) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0;
  for (double v : sorted) ss += (v - mean) * (v - mean);
  const double sigma = std::sqrt(ss / static_cast<double>(n - 1));
  const double h = sigma * std::pow(static_cast<double>(n), -0.2);

  DensityCurve curve;
  curve.bandwidth = h;
  const double lo = sorted.front() - 3.0 * h;
  const double hi = sorted.back() + 3.0 * h;
  const double step = (hi - lo) / static_cast<double>(kKdeGridSize - 1);
  curve.grid.resize(kKdeGridSize);
  curve.density.resize(kKdeGridSize);

  const double norm =
      1.0 / (static_cast<double>(n) * h * std::sqrt(2.0 * std::numbers::pi));
  // Kernels beyond eight bandwidths contribute less than 1e-14 of their mass;
  // restricting each evaluation to that window keeps large inputs cheap.
  const double cutoff = 8.0 * h;
  for (std::size_t i = 0; i < kKdeGridSize; ++i) {
    const double g = lo + step * static_cast<double>(i);
    auto first = std::lower_bound(sorted.begin(), sorted.end(), g - cutoff);
    auto last = std::upper_bound(first, sorted.end(), g + cutoff);
    double acc = 0;
    for (auto it = first; it != last; ++it) {
      const double t = (g - *it) / h;
      acc += std::exp(-0.5 * t * t);
    }
    curve.grid[i] = g;
    curve.density[i] = acc * norm;
    curve.max_density = std::max(curve.max_density, curve.density[i]);
  }
  return curve;
}

inline double trapezoid_integral(std::span<const double> x,
                                 std::span<const double> y) {
  double acc = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    acc += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Resampling onto a regular grid of half-open buckets [k*dt, (k+1)*dt).

inline TimeSeries resample(const TimeSeries& series, double interval_s) {
  if (!(interval_s > 0)) {
    throw Error(Errc::bad_config, "resample interval must be positive");
  }
  std::vector<Sample> out;
  out.reserve(series.samples.size());
  bool have_bucket = false;
  double bucket_key = 0;
  double sum = 0;
  std::size_t count = 0;
  auto flush = [&]() {
    if (have_bucket && count > 0) {
      out.push_back(Sample::at(bucket_key * interval_s,
                               sum / static_cast<double>(count)));
    }
    sum = 0;
    count = 0;
  };
  for (const Sample& s : series.samples) {
    double key = std::floor(s.timestamp / interval_s);
    if (!have_bucket || key != bucket_key) {
      flush();
      bucket_key = key;
      have_bucket = true;
    }
    if (!s.missing()) {
      sum += *s.value;
      ++count;
    }
  }
  flush();
  return TimeSeries{series.node, series.metric, std::move(out)};
}

// ---------------------------------------------------------------------------
// Period splitting.

struct SplitSeries {
  TimeSeries a;
  TimeSeries b;
};

inline SplitSeries split_periods(const TimeSeries& series,
                                 const PeriodPair& pair,
                                 Warnings* warnings = nullptr) {
  SplitSeries out{TimeSeries{series.node, series.metric, {}},
                  TimeSeries{series.node, series.metric, {}}};
  for (const Sample& s : series.samples) {
    if (pair.a.contains(s.timestamp)) {
      out.a.samples.push_back(s);
    } else if (pair.b.contains(s.timestamp)) {
      out.b.samples.push_back(s);
    }
  }
  if (out.a.samples.empty()) {
    warn(warnings, "period '" + pair.a.label + "' received no samples for " +
                       series.node.raw);
  }
  if (out.b.samples.empty()) {
    warn(warnings, "period '" + pair.b.label + "' received no samples for " +
                       series.node.raw);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Seasonal profiles.

enum class ProfileKind { hourly, weekly, season };
enum class AggMode { sum, mean };

constexpr const char* agg_mode_name(AggMode m) {
  return m == AggMode::sum ? "sum" : "mean";
}

inline std::optional<AggMode> parse_agg_mode(std::string_view s) {
  if (s == "sum") return AggMode::sum;
  if (s == "mean") return AggMode::mean;
  return std::nullopt;
}

// Mean metric value per recurring time bin, combined across nodes.
//   hourly: 24 hour-of-day bins        weekly: 168 Monday-first hour bins
//   season: one bin per calendar day over the data span
// A bin is missing exactly when no node has data there. band_low/band_high
// are the p25/p75 of the per-node bin means.
struct Profile {
  ProfileKind kind = ProfileKind::hourly;
  AggMode agg = AggMode::sum;
  std::vector<std::optional<double>> bin_values;
  std::vector<std::size_t> bin_counts;  // contributing nodes per bin
  std::vector<std::optional<double>> band_low;
  std::vector<std::optional<double>> band_high;
  std::int64_t season_start_day = 0;  // local day number of bin 0 (season)

  std::size_t size() const { return bin_values.size(); }
};

namespace detail {

struct BinAccumulator {
  double sum = 0;
  std::size_t count = 0;
};

}  // namespace detail

inline Profile profile(std::span<const TimeSeries> series_set,
                       ProfileKind kind, AggMode agg, TzOffset tz) {
  if (series_set.empty()) {
    throw Error(Errc::empty_input, "profile of empty series set");
  }
  for (const TimeSeries& s : series_set) {
    if (!(s.metric == series_set.front().metric)) {
      throw Error(Errc::mixed_metrics,
                  "profile across metrics " + series_set.front().metric.name() +
                      " and " + s.metric.name());
    }
  }

  // Merge series of the same node, then process nodes in (rack, node) order
  // so bin reduction is independent of input order.
  std::map<NodeRef, std::vector<const TimeSeries*>> by_node;
  for (const TimeSeries& s : series_set) by_node[s.node].push_back(&s);

  std::int64_t day_min = std::numeric_limits<std::int64_t>::max();
  std::int64_t day_max = std::numeric_limits<std::int64_t>::min();
  if (kind == ProfileKind::season) {
    for (const TimeSeries& s : series_set) {
      for (const Sample& sm : s.samples) {
        if (sm.missing()) continue;
        std::int64_t d = local_day(sm.timestamp, tz);
        day_min = std::min(day_min, d);
        day_max = std::max(day_max, d);
      }
    }
    if (day_min > day_max) {
      throw Error(Errc::empty_input, "profile input has no values");
    }
  }

  const std::size_t bins = kind == ProfileKind::hourly ? 24
                           : kind == ProfileKind::weekly
                               ? 168
                               : static_cast<std::size_t>(day_max - day_min + 1);

  // per-node bin means, node-major
  std::vector<std::vector<std::optional<double>>> node_means;
  node_means.reserve(by_node.size());
  for (const auto& [node, parts] : by_node) {
    std::vector<detail::BinAccumulator> acc(bins);
    for (const TimeSeries* s : parts) {
      for (const Sample& sm : s->samples) {
        if (sm.missing()) continue;
        std::size_t bin = 0;
        switch (kind) {
          case ProfileKind::hourly:
            bin = static_cast<std::size_t>(local_hour(sm.timestamp, tz));
            break;
          case ProfileKind::weekly:
            bin = static_cast<std::size_t>(local_hour_of_week(sm.timestamp, tz));
            break;
          case ProfileKind::season:
            bin = static_cast<std::size_t>(local_day(sm.timestamp, tz) - day_min);
            break;
        }
        acc[bin].sum += *sm.value;
        acc[bin].count += 1;
      }
    }
    std::vector<std::optional<double>> means(bins);
    bool any = false;
    for (std::size_t i = 0; i < bins; ++i) {
      if (acc[i].count > 0) {
        means[i] = acc[i].sum / static_cast<double>(acc[i].count);
        any = true;
      }
    }
    if (any) node_means.push_back(std::move(means));
  }
  if (node_means.empty()) {
    throw Error(Errc::empty_input, "profile input has no values");
  }

  Profile p;
  p.kind = kind;
  p.agg = agg;
  p.season_start_day = kind == ProfileKind::season ? day_min : 0;
  p.bin_values.resize(bins);
  p.bin_counts.assign(bins, 0);
  p.band_low.resize(bins);
  p.band_high.resize(bins);

  std::vector<double> contributing;
  for (std::size_t i = 0; i < bins; ++i) {
    contributing.clear();
    for (const auto& means : node_means) {
      if (means[i].has_value()) contributing.push_back(*means[i]);
    }
    p.bin_counts[i] = contributing.size();
    if (contributing.empty()) continue;
    double sum = 0;
    for (double v : contributing) sum += v;
    p.bin_values[i] = agg == AggMode::sum
                          ? sum
                          : sum / static_cast<double>(contributing.size());
    std::sort(contributing.begin(), contributing.end());
    p.band_low[i] = quantile_sorted(contributing, 0.25);
    p.band_high[i] = quantile_sorted(contributing, 0.75);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Rack pooling: values across a rack's nodes, multiset semantics. The
// catalog-aware wrapper `group_by_rack` lives in catalog.hpp.

inline std::map<int, std::vector<double>> group_by_rack_nodes(
    std::span<const TimeSeries> series_set,
    const std::vector<NodeRef>& known_nodes) {
  std::vector<const TimeSeries*> ordered;
  ordered.reserve(series_set.size());
  for (const TimeSeries& s : series_set) ordered.push_back(&s);
  std::sort(ordered.begin(), ordered.end(),
            [](const TimeSeries* a, const TimeSeries* b) {
              return a->node < b->node;
            });

  std::map<int, std::vector<double>> pooled;
  for (const TimeSeries* s : ordered) {
    if (!std::binary_search(known_nodes.begin(), known_nodes.end(), s->node)) {
      throw Error(Errc::unknown_node, s->node.raw);
    }
    auto& bucket = pooled[s->node.rack];
    for (const Sample& sm : s->samples) {
      if (!sm.missing()) bucket.push_back(*sm.value);
    }
  }
  return pooled;
}

}  // namespace tracelens
