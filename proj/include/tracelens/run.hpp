// Copyright 2026 the tracelens authors. All rights reserved.
// Use of this source code is governed by the Apache-2.0 license
// that can be found in the LICENSE file.

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tracelens/catalog.hpp"
#include "tracelens/compare.hpp"
#include "tracelens/ingest.hpp"
#include "tracelens/render.hpp"
#include "tracelens/table.hpp"

// End-to-end pipeline: load catalog and store, apply selection and periods,
// run the analysis, and write charts plus tables into the output directory.
//
// Output layout: <out>/<metric>/<group>/<artifact>, with run-summary.json at
// the top. Identical configuration over identical stores produces a
// byte-identical tree.

namespace tracelens {

struct RunConfig {
  std::map<std::string, std::filesystem::path> stores;  // metric name -> path
  std::optional<std::filesystem::path> catalog_path;
  MetricKind metric = MetricKind::load1();
  Selection selection;
  std::optional<PeriodPair> periods;      // explicit two-period comparison
  std::optional<Period> single_period;    // characterization only, no deltas
  std::optional<CivilDate> split_date;    // custom boundary over the data span
  double interval_s = 15;
  AggMode agg = AggMode::sum;
  TzOffset tz{60};
  std::filesystem::path out_dir;
  TableFormat tables = TableFormat::csv;
  ChartSize chart_size;
};

struct RunSummary {
  std::vector<std::string> files;  // paths relative to out_dir, write order
  std::map<std::string, CoverageReport> coverage_by_group;
  std::vector<std::string> warnings;
};

namespace detail {

class OutputWriter {
 public:
  explicit OutputWriter(std::filesystem::path root) : root_(std::move(root)) {}

  void write_text(const std::filesystem::path& rel, std::string_view content) {
    std::filesystem::path full = root_ / rel;
    std::filesystem::create_directories(full.parent_path());
    std::ofstream out(full, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot write " + full.string());
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(Errc::io_error, "short write to " + full.string());
    files_.push_back(rel.generic_string());
  }

  const std::vector<std::string>& files() const { return files_; }

 private:
  std::filesystem::path root_;
  std::vector<std::string> files_;
};

struct GroupPlan {
  std::string name;
  std::vector<NodeRef> members;
  std::vector<NodeRef> expected;  // coverage baseline
  bool rack_artifacts = false;
};

inline std::vector<GroupPlan> plan_groups(const RunConfig& config,
                                          const Catalog& catalog,
                                          const std::vector<NodeRef>& selected) {
  std::vector<GroupPlan> plans;
  if (config.selection.nodes.has_value()) {
    for (const NodeRef& n : selected) {
      plans.push_back(GroupPlan{n.raw, {n}, {n}, false});
    }
    return plans;
  }
  if (config.selection.racks.has_value()) {
    std::set<int> racks;
    for (const NodeRef& n : selected) racks.insert(n.rack);
    for (int r : racks) {
      GroupPlan plan;
      plan.name = "r" + std::to_string(r);
      for (const NodeRef& n : selected) {
        if (n.rack == r) plan.members.push_back(n);
      }
      plan.expected = catalog.nodes_in_rack(r);
      plans.push_back(std::move(plan));
    }
    return plans;
  }
  // whole-cluster or class-restricted run: one group per node class
  for (NodeClass cls : {NodeClass::Generic, NodeClass::ML}) {
    if (config.selection.node_class.has_value() &&
        *config.selection.node_class != cls) {
      continue;
    }
    GroupPlan plan;
    plan.name = node_class_name(cls);
    plan.expected = catalog.nodes_in_class(cls);
    if (plan.expected.empty()) continue;
    for (const NodeRef& n : selected) {
      if (catalog.rack_class(n.rack) == cls) plan.members.push_back(n);
    }
    plan.rack_artifacts = true;
    plans.push_back(std::move(plan));
  }
  return plans;
}

inline TimeSeries trim_series(const TimeSeries& s, const Period& p) {
  TimeSeries out{s.node, s.metric, {}};
  for (const Sample& sm : s.samples) {
    if (p.contains(sm.timestamp)) out.samples.push_back(sm);
  }
  return out;
}

inline std::size_t value_count(std::span<const TimeSeries> set) {
  std::size_t n = 0;
  for (const TimeSeries& s : set) {
    for (const Sample& sm : s.samples) {
      if (!sm.missing()) ++n;
    }
  }
  return n;
}

inline std::vector<double> pooled_values(std::span<const TimeSeries> set) {
  std::vector<double> out;
  for (const TimeSeries& s : set) {
    for (const Sample& sm : s.samples) {
      if (!sm.missing()) out.push_back(*sm.value);
    }
  }
  return out;
}

struct PeriodSlice {
  std::string label;
  std::vector<TimeSeries> series;
  std::vector<double> values;
};

inline std::string agg_axis_tag(AggMode agg) {
  return agg == AggMode::sum ? "sum across nodes" : "mean across nodes";
}

// Custom metric names become directory components; keep them on a leash.
inline std::string path_component(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
              (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    out += ok ? c : '_';
  }
  if (out.empty() || out == "." || out == "..") out = "metric";
  return out;
}

}  // namespace detail

inline nlohmann::json run_config_json(const RunConfig& config,
                                      const std::optional<PeriodPair>& pair,
                                      const std::optional<Period>& single) {
  nlohmann::json j;
  j["metric"] = config.metric.name();
  j["interval_s"] = config.interval_s;
  j["agg"] = agg_mode_name(config.agg);
  j["tz"] = config.tz.to_string();
  j["tables"] = table_extension(config.tables);
  j["out"] = config.out_dir.generic_string();
  j["catalog"] = config.catalog_path.has_value()
                     ? config.catalog_path->generic_string()
                     : "builtin";
  for (const auto& [name, path] : config.stores) {
    j["stores"][name] = path.generic_string();
  }
  nlohmann::json sel = nlohmann::json::object();
  if (config.selection.nodes.has_value()) {
    auto& arr = sel["nodes"] = nlohmann::json::array();
    for (const NodeRef& n : *config.selection.nodes) arr.push_back(n.raw);
  }
  if (config.selection.racks.has_value()) {
    sel["racks"] = *config.selection.racks;
  }
  if (config.selection.node_class.has_value()) {
    sel["class"] = node_class_name(*config.selection.node_class);
  }
  j["selection"] = sel;
  auto period_json = [](const Period& p) {
    return nlohmann::json{{"label", p.label}, {"start", p.start}, {"end", p.end}};
  };
  if (pair.has_value()) {
    j["periods"] = {{"a", period_json(pair->a)}, {"b", period_json(pair->b)}};
  }
  if (single.has_value()) {
    j["period"] = period_json(*single);
  }
  return j;
}

inline RunSummary run(const RunConfig& config) {
  // -- configuration checks ------------------------------------------------
  auto store_it = config.stores.find(config.metric.name());
  if (store_it == config.stores.end()) {
    throw Error(Errc::bad_config,
                "no store given for metric " + config.metric.name());
  }
  if (config.out_dir.empty()) {
    throw Error(Errc::bad_config, "output directory not set");
  }
  if (config.periods.has_value() && config.split_date.has_value()) {
    throw Error(Errc::bad_config,
                "give either explicit periods or a split date, not both");
  }
  const std::filesystem::path store_path = store_it->second;
  if (!std::filesystem::exists(store_path)) {
    throw Error(Errc::io_error, "store not found: " + store_path.string());
  }

  RunSummary summary;
  Warnings warnings;

  // -- catalog ---------------------------------------------------------------
  std::optional<StoreManifest> manifest;
  if (std::filesystem::exists(manifest_path_for(store_path))) {
    manifest = read_manifest(store_path);
  }
  Catalog catalog = config.catalog_path.has_value()
                        ? Catalog::load(*config.catalog_path)
                        : Catalog::from_nodes(
                              manifest.has_value()
                                  ? manifest->nodes
                                  : [&] {
                                      std::vector<NodeRef> nodes;
                                      for (const TimeSeries& s :
                                           read_store(store_path)) {
                                        nodes.push_back(s.node);
                                      }
                                      return nodes;
                                    }());

  const std::vector<NodeRef> selected = resolve(config.selection, catalog);
  if (selected.empty()) {
    throw Error(Errc::empty_input, "selection matches no nodes");
  }

  // -- data -------------------------------------------------------------------
  ReadFilters filters;
  filters.nodes = selected;
  std::vector<TimeSeries> series =
      read_store(store_path, filters, &warnings);
  if (manifest.has_value()) {
    std::size_t uncataloged = 0;
    for (const NodeRef& n : manifest->nodes) {
      if (!catalog.has_node(n)) ++uncataloged;
    }
    if (uncataloged > 0) {
      warnings.add("store has " + std::to_string(uncataloged) +
                   " nodes outside the catalog; they are ignored");
    }
  }
  for (TimeSeries& s : series) s = resample(s, config.interval_s);

  // -- periods ----------------------------------------------------------------
  std::optional<PeriodPair> pair;
  std::optional<Period> single;
  if (config.single_period.has_value()) {
    single = config.single_period;
  } else if (config.periods.has_value()) {
    pair = config.periods;
  } else if (config.split_date.has_value()) {
    double data_min = 0, data_max = 1;
    if (manifest.has_value()) {
      data_min = manifest->time_min;
      data_max = manifest->time_max;
    } else if (!series.empty()) {
      data_min = series.front().time_min();
      data_max = data_min;
      for (const TimeSeries& s : series) {
        data_min = std::min(data_min, s.time_min());
        data_max = std::max(data_max, s.time_max());
      }
    }
    const double split = static_cast<double>(
        epoch_from_local(*config.split_date, 0, 0, 0, config.tz));
    const double lo = std::min(data_min, split - 86400.0);
    const double hi = std::max(data_max + config.interval_s, split + 86400.0);
    pair = PeriodPair(Period("non-covid", lo, split),
                      Period("covid", split, hi));
  } else {
    pair = default_covid_pair(config.tz);
  }

  // -- artifacts ----------------------------------------------------------------
  detail::OutputWriter writer(config.out_dir);
  const std::string ext = table_extension(config.tables);
  const std::string unit =
      config.metric.unit().empty()
          ? config.metric.name()
          : config.metric.name() + " (" + std::string(config.metric.unit()) + ")";

  for (const detail::GroupPlan& plan :
       detail::plan_groups(config, catalog, selected)) {
    const std::filesystem::path group_dir =
        std::filesystem::path(detail::path_component(config.metric.name())) /
        plan.name;

    std::vector<TimeSeries> group_series;
    for (const TimeSeries& s : series) {
      if (std::binary_search(plan.members.begin(), plan.members.end(),
                             s.node)) {
        group_series.push_back(s);
      }
    }

    CoverageReport cov = coverage(group_series, plan.expected);
    writer.write_text(group_dir / "coverage.json",
                      cov.to_json().dump(2) + "\n");
    summary.coverage_by_group[plan.name] = cov;

    if (detail::value_count(group_series) == 0) {
      warnings.add("group " + plan.name + " has no data; charts skipped");
      continue;
    }

    // period slices
    std::vector<detail::PeriodSlice> slices;
    if (pair.has_value()) {
      slices.push_back({pair->a.label, {}, {}});
      slices.push_back({pair->b.label, {}, {}});
      for (const TimeSeries& s : group_series) {
        SplitSeries split = split_periods(s, *pair);
        if (!split.a.samples.empty()) slices[0].series.push_back(split.a);
        if (!split.b.samples.empty()) slices[1].series.push_back(split.b);
      }
    } else {
      slices.push_back({single->label, {}, {}});
      for (const TimeSeries& s : group_series) {
        TimeSeries t = detail::trim_series(s, *single);
        if (!t.samples.empty()) slices[0].series.push_back(t);
      }
    }
    for (detail::PeriodSlice& slice : slices) {
      slice.values = detail::pooled_values(slice.series);
      if (slice.values.empty()) {
        warnings.add("group " + plan.name + ": period '" + slice.label +
                     "' has no data");
      }
    }

    const std::string title_base = config.metric.name() + " — " + plan.name;

    // profile curves
    auto curve_chart = [&](ProfileKind kind, const std::string& chart_name,
                           const std::string& x_label) {
      ChartSpec spec;
      spec.kind = ChartKind::curve;
      spec.title = title_base + " — " + chart_name;
      spec.x_label = x_label;
      spec.y_label = unit + ", " + detail::agg_axis_tag(config.agg);
      for (const detail::PeriodSlice& slice : slices) {
        if (detail::value_count(slice.series) == 0) continue;
        spec.series.push_back(ChartSeries{
            slice.label,
            profile(slice.series, kind, config.agg, config.tz)});
      }
      return spec;
    };

    ChartSpec weekly = curve_chart(ProfileKind::weekly, "weekly profile",
                                   "day of week");
    if (!weekly.series.empty()) {
      writer.write_text(group_dir / "weekly-curve.svg",
                        render_chart(weekly, config.chart_size));
    }
    ChartSpec hourly = curve_chart(ProfileKind::hourly, "hourly profile",
                                   "hour of day");
    if (!hourly.series.empty()) {
      writer.write_text(group_dir / "hourly-curve.svg",
                        render_chart(hourly, config.chart_size));
    }

    // whole-season curve over the span under study, boundary marked
    {
      const Period span =
          pair.has_value()
              ? Period("span", std::min(pair->a.start, pair->b.start),
                       std::max(pair->a.end, pair->b.end))
              : *single;
      std::vector<TimeSeries> span_series;
      for (const TimeSeries& s : group_series) {
        TimeSeries t = detail::trim_series(s, span);
        if (!t.samples.empty()) span_series.push_back(t);
      }
      if (detail::value_count(span_series) > 0) {
        ChartSpec spec;
        spec.kind = ChartKind::curve;
        spec.title = title_base + " — season";
        spec.x_label = "date";
        spec.y_label = unit + ", " + detail::agg_axis_tag(config.agg);
        Profile season =
            profile(span_series, ProfileKind::season, config.agg, config.tz);
        const std::int64_t start_day = season.season_start_day;
        spec.series.push_back(ChartSeries{"daily mean", std::move(season)});
        if (pair.has_value()) {
          std::int64_t boundary_day = local_day(pair->b.start, config.tz);
          spec.annotations.push_back(ChartAnnotation{
              static_cast<double>(boundary_day - start_day),
              pair->b.label});
        }
        writer.write_text(group_dir / "season-curve.svg",
                          render_chart(spec, config.chart_size));
      }
    }

    // distribution charts over pooled values
    ChartSpec violin{ChartKind::violin,
                     title_base + " — distribution",
                     "period",
                     unit,
                     {},
                     {}};
    ChartSpec box{ChartKind::box,
                  title_base + " — box",
                  "period",
                  unit,
                  {},
                  {}};
    ChartSpec ecdf_chart{ChartKind::ecdf,
                         title_base + " — ECDF",
                         unit,
                         "fraction of samples ≤ x",
                         {},
                         {}};
    for (const detail::PeriodSlice& slice : slices) {
      if (slice.values.empty()) continue;
      BoxStats bs = box_stats(slice.values);
      ViolinData vd;
      vd.box = bs;
      try {
        vd.density = kde(slice.values);
      } catch (const Error& e) {
        if (e.code() != Errc::degenerate_distribution) throw;
        warnings.add("group " + plan.name + ": period '" + slice.label +
                     "' is degenerate; violin shows a tick mark");
      }
      violin.series.push_back(ChartSeries{slice.label, std::move(vd)});
      box.series.push_back(ChartSeries{slice.label, std::move(bs)});
      ecdf_chart.series.push_back(ChartSeries{slice.label, ecdf(slice.values)});
    }
    if (!violin.series.empty()) {
      writer.write_text(group_dir / "violin.svg",
                        render_chart(violin, config.chart_size));
      writer.write_text(group_dir / "box.svg",
                        render_chart(box, config.chart_size));
      writer.write_text(group_dir / "ecdf.svg",
                        render_chart(ecdf_chart, config.chart_size));
    }

    // statistics table
    {
      TableDoc doc;
      doc.headers = {"period", "count", "mean", "std", "min",
                     "q1",     "median", "q3",  "max"};
      doc.col_decimals = {-1, 0, 3, 3, 3, 3, 3, 3, 3};
      for (const detail::PeriodSlice& slice : slices) {
        if (slice.values.empty()) continue;
        StatsSummary s = summary_stats(slice.values);
        doc.add_mixed_row({slice.label},
                          {static_cast<double>(s.count), s.mean, s.std_dev,
                           s.min, s.q1, s.median, s.q3, s.max});
      }
      if (!doc.rows.empty()) {
        writer.write_text(group_dir / ("stats-table." + ext),
                          emit_table(doc, config.tables));
      }
    }

    // per-rack artifacts for class groups
    if (plan.rack_artifacts && pair.has_value()) {
      try {
        ComparisonReport report =
            compare(group_series, catalog, *pair, Grouping::by_rack,
                    CompareOptions{false, false});
        ChartSpec bars{ChartKind::bar,
                       title_base + " — per-rack mean",
                       "rack",
                       unit,
                       {},
                       {}};
        std::vector<BarDatum> bars_a, bars_b;
        for (const GroupComparison& g : report.groups) {
          if (g.a) bars_a.push_back(BarDatum{g.id, g.a->mean, g.a->std_dev});
          if (g.b) bars_b.push_back(BarDatum{g.id, g.b->mean, g.b->std_dev});
        }
        if (!bars_a.empty()) {
          bars.series.push_back(ChartSeries{pair->a.label, bars_a});
        }
        if (!bars_b.empty()) {
          bars.series.push_back(ChartSeries{pair->b.label, bars_b});
        }
        if (!bars.series.empty()) {
          writer.write_text(group_dir / "rack-bar.svg",
                            render_chart(bars, config.chart_size));
        }
        writer.write_text(group_dir / ("rack-table." + ext),
                          emit_table(rack_table(report), config.tables));
      } catch (const Error& e) {
        if (e.code() != Errc::empty_input) throw;
        warnings.add("group " + plan.name +
                     ": no data in either period; rack artifacts skipped");
      }
    } else if (plan.rack_artifacts && single.has_value()) {
      // single period: rack characterization without deltas
      std::vector<TimeSeries> trimmed;
      for (const TimeSeries& s : group_series) {
        TimeSeries t = detail::trim_series(s, *single);
        if (!t.samples.empty()) trimmed.push_back(t);
      }
      if (detail::value_count(trimmed) > 0) {
        auto pooled = group_by_rack(trimmed, catalog);
        ChartSpec bars{ChartKind::bar,
                       title_base + " — per-rack mean",
                       "rack",
                       unit,
                       {},
                       {}};
        TableDoc doc;
        doc.headers = {"rack", "class", "period", "count", "mean",
                       "std",  "median", "q1",    "q3",    "max"};
        doc.col_decimals = {-1, -1, -1, 0, 3, 3, 3, 3, 3, 3};
        std::vector<BarDatum> data;
        for (const auto& [rack, values] : pooled) {
          if (values.empty()) continue;
          StatsSummary s = summary_stats(values);
          std::string id = "r" + std::to_string(rack);
          data.push_back(BarDatum{id, s.mean, s.std_dev});
          doc.add_mixed_row(
              {id, node_class_name(catalog.rack_class(rack)), single->label},
              {static_cast<double>(s.count), s.mean, s.std_dev, s.median,
               s.q1, s.q3, s.max});
        }
        if (!data.empty()) {
          bars.series.push_back(ChartSeries{single->label, std::move(data)});
          writer.write_text(group_dir / "rack-bar.svg",
                            render_chart(bars, config.chart_size));
          writer.write_text(group_dir / ("rack-table." + ext),
                            emit_table(doc, config.tables));
        }
      }
    }
  }

  // -- summary, written last -----------------------------------------------
  summary.warnings = warnings.items;
  nlohmann::json j;
  j["config"] = run_config_json(config, pair, single);
  j["files"] = writer.files();
  for (const auto& [group, cov] : summary.coverage_by_group) {
    j["coverage"][group] = cov.to_json();
  }
  j["warnings"] = summary.warnings;
  writer.write_text("run-summary.json", j.dump(2) + "\n");
  summary.files = writer.files();
  return summary;
}

}  // namespace tracelens
