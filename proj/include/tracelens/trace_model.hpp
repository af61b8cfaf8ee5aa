// Copyright 2026 the tracelens authors. All rights reserved.
// Use of this source code is governed by the Apache-2.0 license
// that can be found in the LICENSE file.

#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "tracelens/civil.hpp"
#include "tracelens/errors.hpp"

// Core domain types shared by every other module. No I/O, no statistics.
// All types are plain immutable values; construct them and share freely.

namespace tracelens {

enum class NodeClass { Generic, ML };

constexpr const char* node_class_name(NodeClass c) {
  return c == NodeClass::Generic ? "Generic" : "ML";
}

inline std::optional<NodeClass> parse_node_class(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  if (lower == "generic") return NodeClass::Generic;
  if (lower == "ml") return NodeClass::ML;
  return std::nullopt;
}

// A metric identity. Four kinds are built in; anything else is carried as a
// custom label so unfamiliar exports still flow through the pipeline.
class MetricKind {
 public:
  static MetricKind load1() { return MetricKind("load1"); }
  static MetricKind power_watts() { return MetricKind("power_watts"); }
  static MetricKind ram_utilization_pct() {
    return MetricKind("ram_utilization_pct");
  }
  static MetricKind ambient_temp_celsius() {
    return MetricKind("ambient_temp_celsius");
  }
  static MetricKind custom(std::string label) {
    return MetricKind(std::move(label));
  }
  // Total: known names resolve to the builtin kind, others become custom.
  static MetricKind parse(std::string_view name) {
    return MetricKind(std::string(name));
  }

  const std::string& name() const { return name_; }

  bool is_builtin() const {
    return name_ == "load1" || name_ == "power_watts" ||
           name_ == "ram_utilization_pct" || name_ == "ambient_temp_celsius";
  }

  // Display unit; ram is a 0-100 percentage, temperature is Celsius, power is
  // watts, load1 is dimensionless.
  std::string_view unit() const {
    if (name_ == "load1") return "load";
    if (name_ == "power_watts") return "W";
    if (name_ == "ram_utilization_pct") return "%";
    if (name_ == "ambient_temp_celsius") return "°C";
    return "";
  }

  friend bool operator==(const MetricKind&, const MetricKind&) = default;
  friend auto operator<=>(const MetricKind&, const MetricKind&) = default;

 private:
  explicit MetricKind(std::string name) : name_(std::move(name)) {}
  std::string name_;
};

// Node identity: rack and node index plus the original string id.
struct NodeRef {
  int rack = 0;
  int node = 0;
  std::string raw;

  static NodeRef make(int rack, int node) {
    NodeRef n{rack, node, {}};
    n.raw = "r" + std::to_string(rack) + "n" + std::to_string(node);
    return n;
  }

  friend bool operator==(const NodeRef& a, const NodeRef& b) {
    return a.rack == b.rack && a.node == b.node;
  }
  friend bool operator<(const NodeRef& a, const NodeRef& b) {
    return std::tie(a.rack, a.node) < std::tie(b.rack, b.node);
  }
};

inline std::string format_node_id(int rack, int node) {
  return "r" + std::to_string(rack) + "n" + std::to_string(node);
}

// Parses ids of the shape r<digits>n<digits>, case-insensitive. The raw
// spelling is preserved verbatim.
inline NodeRef parse_node_id(std::string_view raw) {
  auto fail = [&]() -> Error {
    return Error(Errc::malformed_node_id,
                 "node id must match r<rack>n<node>, got '" + std::string(raw) +
                     "'");
  };
  std::size_t i = 0;
  if (raw.size() < 4 || (raw[i] != 'r' && raw[i] != 'R')) throw fail();
  ++i;
  std::size_t rack_begin = i;
  while (i < raw.size() && raw[i] >= '0' && raw[i] <= '9') ++i;
  if (i == rack_begin || i == raw.size() || (raw[i] != 'n' && raw[i] != 'N')) {
    throw fail();
  }
  std::size_t rack_end = i;
  ++i;
  std::size_t node_begin = i;
  while (i < raw.size() && raw[i] >= '0' && raw[i] <= '9') ++i;
  if (i == node_begin || i != raw.size()) throw fail();

  int rack = 0, node = 0;
  auto r1 = std::from_chars(raw.data() + rack_begin, raw.data() + rack_end, rack);
  auto r2 = std::from_chars(raw.data() + node_begin, raw.data() + raw.size(), node);
  if (r1.ec != std::errc{} || r2.ec != std::errc{}) throw fail();
  return NodeRef{rack, node, std::string(raw)};
}

// One observation. A missing value is a first-class marker, never a zero or
// NaN sentinel; non-missing values are always finite.
struct Sample {
  double timestamp = 0;
  std::optional<double> value;

  static Sample at(double ts, double v) {
    return Sample{ts, std::isfinite(v) ? std::optional<double>(v)
                                       : std::nullopt};
  }
  static Sample missing_at(double ts) { return Sample{ts, std::nullopt}; }

  bool missing() const { return !value.has_value(); }
};

// Samples for one (node, metric), strictly increasing in timestamp.
struct TimeSeries {
  NodeRef node;
  MetricKind metric = MetricKind::custom("unset");
  std::vector<Sample> samples;

  // Sorts unsorted input deterministically. Equal timestamps collapse to the
  // mean of their non-missing values (all-missing collapses to missing);
  // the number of collapsed groups is reported through `collapsed`.
  static TimeSeries make(NodeRef node, MetricKind metric,
                         std::vector<Sample> samples,
                         std::size_t* collapsed = nullptr) {
    std::stable_sort(samples.begin(), samples.end(),
                     [](const Sample& a, const Sample& b) {
                       return a.timestamp < b.timestamp;
                     });
    std::vector<Sample> out;
    out.reserve(samples.size());
    std::size_t dups = 0;
    for (std::size_t i = 0; i < samples.size();) {
      std::size_t j = i + 1;
      while (j < samples.size() &&
             samples[j].timestamp == samples[i].timestamp) {
        ++j;
      }
      if (j == i + 1) {
        out.push_back(samples[i]);
      } else {
        ++dups;
        double sum = 0;
        std::size_t n = 0;
        for (std::size_t k = i; k < j; ++k) {
          if (!samples[k].missing()) {
            sum += *samples[k].value;
            ++n;
          }
        }
        out.push_back(n > 0 ? Sample::at(samples[i].timestamp, sum / n)
                            : Sample::missing_at(samples[i].timestamp));
      }
      i = j;
    }
    if (collapsed != nullptr) *collapsed = dups;
    return TimeSeries{std::move(node), std::move(metric), std::move(out)};
  }

  double time_min() const { return samples.empty() ? 0 : samples.front().timestamp; }
  double time_max() const { return samples.empty() ? 0 : samples.back().timestamp; }
};

// The non-missing values of a series, in timestamp order.
inline std::vector<double> non_missing_values(const TimeSeries& s) {
  std::vector<double> out;
  out.reserve(s.samples.size());
  for (const Sample& sm : s.samples) {
    if (!sm.missing()) out.push_back(*sm.value);
  }
  return out;
}

// A named half-open interval [start, end) of epoch seconds.
struct Period {
  std::string label;
  double start = 0;
  double end = 0;

  Period(std::string label, double start, double end)
      : label(std::move(label)), start(start), end(end) {
    if (!(this->start < this->end)) {
      throw Error(Errc::bad_config, "period '" + this->label +
                                        "': start must precede end");
    }
  }

  bool contains(double ts) const { return ts >= start && ts < end; }
};

// Two non-overlapping periods under comparison.
struct PeriodPair {
  Period a;
  Period b;

  PeriodPair(Period a_, Period b_) : a(std::move(a_)), b(std::move(b_)) {
    bool disjoint = a.end <= b.start || b.end <= a.start;
    if (!disjoint) {
      throw Error(Errc::overlapping_periods,
                  "periods '" + a.label + "' and '" + b.label + "' overlap");
    }
  }

  PeriodPair swapped() const { return PeriodPair(b, a); }
};

// The instrument's default comparison: 2020-01-01 up to the pandemic
// declaration on 2020-02-27, and from that day to the end of the trace.
inline constexpr CivilDate kDefaultSpanStart{2020, 1, 1};
inline constexpr CivilDate kDefaultSplitDate{2020, 2, 27};
inline constexpr CivilDate kDefaultSpanEnd{2020, 8, 13};

inline PeriodPair default_covid_pair(TzOffset tz) {
  const double span_start =
      static_cast<double>(epoch_from_local(kDefaultSpanStart, 0, 0, 0, tz));
  const double split =
      static_cast<double>(epoch_from_local(kDefaultSplitDate, 0, 0, 0, tz));
  const double span_end =
      static_cast<double>(epoch_from_local(kDefaultSpanEnd, 0, 0, 0, tz));
  return PeriodPair(Period("non-covid", span_start, split),
                    Period("covid", split, span_end));
}

}  // namespace tracelens
