// Copyright 2026 the tracelens authors. All rights reserved.
// Use of this source code is governed by the Apache-2.0 license
// that can be found in the LICENSE file.

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "tracelens/analysis.hpp"
#include "tracelens/catalog.hpp"
#include "tracelens/table.hpp"

// Two-period comparison artifacts: per-group statistics, deltas, and the
// paired distribution payloads the renderer consumes.

namespace tracelens {

enum class Grouping { whole, by_class, by_rack, by_node };

struct GroupComparison {
  std::string id;  // "all", "Generic", "ML", "r23", "r30n1"
  std::optional<int> rack;
  std::optional<NodeClass> node_class;

  std::optional<StatsSummary> a, b;
  // deltas are b minus a, present only when both sides have data
  std::optional<double> delta_mean, delta_median;
  std::optional<double> pct_delta_mean;  // only when a.mean != 0
  std::optional<BoxStats> box_a, box_b;
  std::optional<DensityCurve> density_a, density_b;

  bool one_sided() const { return a.has_value() != b.has_value(); }
};

struct ComparisonReport {
  MetricKind metric = MetricKind::custom("unset");
  PeriodPair pair;
  Grouping grouping = Grouping::whole;
  std::vector<GroupComparison> groups;  // canonical order

  const GroupComparison* find(std::string_view id) const {
    for (const GroupComparison& g : groups) {
      if (g.id == id) return &g;
    }
    return nullptr;
  }
};

struct CompareOptions {
  bool densities = true;  // KDE per group per side (skip for bulk runs)
  bool boxes = true;
};

namespace detail {

struct GroupKey {
  // Sort order: class (Generic first), then rack, then node. This yields the
  // generic-racks-before-ML-racks layout of the rack charts.
  int cls = 0;
  int rack = -1;
  int node = -1;
  std::string id;

  friend bool operator<(const GroupKey& x, const GroupKey& y) {
    return std::tie(x.cls, x.rack, x.node) < std::tie(y.cls, y.rack, y.node);
  }
  friend bool operator==(const GroupKey& x, const GroupKey& y) {
    return std::tie(x.cls, x.rack, x.node) == std::tie(y.cls, y.rack, y.node);
  }
};

inline GroupKey group_key(Grouping grouping, const NodeRef& node,
                          const Catalog& catalog) {
  GroupKey key;
  switch (grouping) {
    case Grouping::whole:
      key.id = "all";
      break;
    case Grouping::by_class: {
      NodeClass cls = catalog.node_class(node);
      key.cls = cls == NodeClass::Generic ? 0 : 1;
      key.id = node_class_name(cls);
      break;
    }
    case Grouping::by_rack: {
      NodeClass cls = catalog.node_class(node);
      key.cls = cls == NodeClass::Generic ? 0 : 1;
      key.rack = node.rack;
      key.id = "r" + std::to_string(node.rack);
      break;
    }
    case Grouping::by_node: {
      NodeClass cls = catalog.node_class(node);
      key.cls = cls == NodeClass::Generic ? 0 : 1;
      key.rack = node.rack;
      key.node = node.node;
      key.id = node.raw;
      break;
    }
  }
  return key;
}

}  // namespace detail

inline ComparisonReport compare(std::span<const TimeSeries> series_set,
                                const Catalog& catalog, const PeriodPair& pair,
                                Grouping grouping,
                                const CompareOptions& options = {}) {
  if (series_set.empty()) {
    throw Error(Errc::empty_input, "compare over empty series set");
  }
  for (const TimeSeries& s : series_set) {
    if (!(s.metric == series_set.front().metric)) {
      throw Error(Errc::mixed_metrics,
                  "compare across metrics " +
                      series_set.front().metric.name() + " and " +
                      s.metric.name());
    }
  }

  // Pool values per group per side, processing nodes in canonical order so
  // the report is independent of input order.
  std::vector<const TimeSeries*> ordered;
  ordered.reserve(series_set.size());
  for (const TimeSeries& s : series_set) ordered.push_back(&s);
  std::sort(ordered.begin(), ordered.end(),
            [](const TimeSeries* x, const TimeSeries* y) {
              return x->node < y->node;
            });

  struct Bucket {
    std::vector<double> a, b;
  };
  std::map<detail::GroupKey, Bucket> buckets;
  for (const TimeSeries* s : ordered) {
    detail::GroupKey key = detail::group_key(grouping, s->node, catalog);
    Bucket& bucket = buckets[key];
    for (const Sample& sm : s->samples) {
      if (sm.missing()) continue;
      if (pair.a.contains(sm.timestamp)) {
        bucket.a.push_back(*sm.value);
      } else if (pair.b.contains(sm.timestamp)) {
        bucket.b.push_back(*sm.value);
      }
    }
  }

  ComparisonReport report{series_set.front().metric, pair, grouping, {}};
  for (auto& [key, bucket] : buckets) {
    GroupComparison g;
    g.id = key.id;
    if (key.rack >= 0) g.rack = key.rack;
    if (grouping != Grouping::whole) {
      g.node_class = key.cls == 0 ? NodeClass::Generic : NodeClass::ML;
    }

    auto fill_side = [&](const std::vector<double>& values,
                         std::optional<StatsSummary>& stats,
                         std::optional<BoxStats>& box,
                         std::optional<DensityCurve>& density) {
      if (values.empty()) return;
      stats = summary_stats(values);
      if (options.boxes) box = box_stats(values);
      if (options.densities) {
        try {
          density = kde(values);
        } catch (const Error& e) {
          if (e.code() != Errc::degenerate_distribution) throw;
        }
      }
    };
    fill_side(bucket.a, g.a, g.box_a, g.density_a);
    fill_side(bucket.b, g.b, g.box_b, g.density_b);

    if (g.a && g.b) {
      g.delta_mean = g.b->mean - g.a->mean;
      g.delta_median = g.b->median - g.a->median;
      if (g.a->mean != 0) {
        g.pct_delta_mean = *g.delta_mean / g.a->mean * 100.0;
      }
    }
    if (g.a || g.b) report.groups.push_back(std::move(g));
  }
  if (report.groups.empty()) {
    throw Error(Errc::empty_input, "no values fall inside either period");
  }
  return report;
}

// One row per rack per period: rack, class, period, count, mean, std,
// median, q1, q3, max. Generic racks come first, then the ML racks, each in
// ascending order. A side with no data keeps its row with count 0.
inline TableDoc rack_table(const ComparisonReport& report) {
  if (report.grouping != Grouping::by_rack) {
    throw Error(Errc::wrong_grouping, "rack table needs a by-rack report");
  }
  TableDoc doc;
  doc.headers = {"rack", "class", "period", "count", "mean",
                 "std",  "median", "q1",    "q3",    "max"};
  doc.col_decimals = {-1, -1, -1, 0, 3, 3, 3, 3, 3, 3};

  for (const GroupComparison& g : report.groups) {
    auto emit = [&](const std::string& period,
                    const std::optional<StatsSummary>& s) {
      std::vector<std::optional<double>> tail;
      if (s.has_value()) {
        tail = {static_cast<double>(s->count), s->mean, s->std_dev, s->median,
                s->q1, s->q3, s->max};
      } else {
        tail = {0.0, std::nullopt, std::nullopt, std::nullopt,
                std::nullopt, std::nullopt, std::nullopt};
      }
      doc.add_mixed_row(
          {g.id, g.node_class ? node_class_name(*g.node_class) : "", period},
          tail);
    };
    emit(report.pair.a.label, g.a);
    emit(report.pair.b.label, g.b);
  }
  return doc;
}

}  // namespace tracelens
