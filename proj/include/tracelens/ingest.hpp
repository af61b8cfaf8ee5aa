// Copyright 2026 the tracelens authors. All rights reserved.
// Use of this source code is governed by the Apache-2.0 license
// that can be found in the LICENSE file.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tracelens/trace_model.hpp"

// Prometheus range-query JSON parsing, the canonical CSV store, and data
// coverage reporting.
//
// Store format: one metric per file, UTF-8 CSV with header
// `node,timestamp,value`. Timestamps are integer epoch seconds, a missing
// value is an empty field. A sidecar `<store>.manifest.json` carries the
// StoreManifest.

namespace tracelens {

struct StoreManifest {
  MetricKind metric = MetricKind::custom("unset");
  std::vector<NodeRef> nodes;  // sorted (rack, node)
  double time_min = 0;
  double time_max = 0;
  std::uint64_t sample_count = 0;
  double scrape_interval_hint = 15;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["metric"] = metric.name();
    auto& arr = j["nodes"] = nlohmann::json::array();
    for (const NodeRef& n : nodes) arr.push_back(n.raw);
    j["time_min"] = time_min;
    j["time_max"] = time_max;
    j["sample_count"] = sample_count;
    j["scrape_interval_hint"] = scrape_interval_hint;
    return j;
  }

  static StoreManifest from_json(const nlohmann::json& j) {
    StoreManifest m;
    m.metric = MetricKind::parse(j.at("metric").get<std::string>());
    for (const auto& id : j.at("nodes")) {
      m.nodes.push_back(parse_node_id(id.get<std::string>()));
    }
    m.time_min = j.at("time_min").get<double>();
    m.time_max = j.at("time_max").get<double>();
    m.sample_count = j.at("sample_count").get<std::uint64_t>();
    m.scrape_interval_hint = j.value("scrape_interval_hint", 15.0);
    return m;
  }
};

struct CoverageReport {
  std::size_t expected_nodes = 0;
  std::size_t present_nodes = 0;
  double coverage_pct = 100.0;
  bool empty_expected = false;  // warning flag, pct defined as 100
  std::vector<NodeRef> missing;  // sorted (rack, node)
  std::map<std::string, double> per_node_max_gap_s;

  // One decimal, round half away from zero: 29 of 55 renders as "52.7".
  std::string coverage_pct_rendered() const {
    double scaled = std::round(coverage_pct * 10.0) / 10.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", scaled);
    return buf;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["expected_nodes"] = expected_nodes;
    j["present_nodes"] = present_nodes;
    j["coverage_pct"] = coverage_pct;
    j["coverage_pct_rendered"] = coverage_pct_rendered();
    j["empty_expected"] = empty_expected;
    auto& arr = j["missing"] = nlohmann::json::array();
    for (const NodeRef& n : missing) arr.push_back(n.raw);
    j["per_node_max_gap_s"] = per_node_max_gap_s;
    return j;
  }
};

// ---------------------------------------------------------------------------
// Prometheus HTTP API range-result JSON.

struct PromParseOptions {
  // Label that carries the node identity.
  std::string node_label = "node";
  // Maps the exporter's __name__ to a metric kind name. Unmapped names fall
  // back to the __name__ itself (custom kind if unknown).
  std::map<std::string, std::string> metric_map;
  // Forces every parsed series onto one kind, ignoring labels.
  std::optional<MetricKind> metric_override;
};

struct PromParseResult {
  std::vector<TimeSeries> series;
  std::size_t skipped_entries = 0;  // entries whose node id failed to parse
  Warnings warnings;
};

inline PromParseResult parse_prometheus_matrix(
    std::string_view text, const PromParseOptions& options = {}) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::bad_envelope, std::string("invalid JSON: ") + e.what());
  }

  const auto status_it = doc.find("status");
  if (!doc.is_object() || status_it == doc.end() || !status_it->is_string() ||
      status_it->get<std::string>() != "success") {
    throw Error(Errc::bad_envelope, "status is not \"success\"");
  }
  const auto data_it = doc.find("data");
  if (data_it == doc.end() || !data_it->is_object()) {
    throw Error(Errc::bad_envelope, "missing data object");
  }
  const auto type_it = data_it->find("resultType");
  if (type_it == data_it->end() || !type_it->is_string() ||
      type_it->get<std::string>() != "matrix") {
    throw Error(Errc::bad_envelope, "resultType is not \"matrix\"");
  }
  const auto result_it = data_it->find("result");
  if (result_it == data_it->end() || !result_it->is_array()) {
    throw Error(Errc::bad_envelope, "missing result array");
  }

  PromParseResult out;
  for (const auto& entry : *result_it) {
    const auto labels_it = entry.is_object() ? entry.find("metric") : entry.end();
    std::string node_id;
    if (labels_it != entry.end() && labels_it->is_object()) {
      auto label = labels_it->find(options.node_label);
      if (label != labels_it->end() && label->is_string()) {
        node_id = label->get<std::string>();
      }
    }
    NodeRef node;
    try {
      node = parse_node_id(node_id);
    } catch (const Error&) {
      ++out.skipped_entries;
      out.warnings.add("skipped series with unusable " + options.node_label +
                       " label '" + node_id + "'");
      continue;
    }

    MetricKind kind = MetricKind::custom("unknown");
    if (options.metric_override.has_value()) {
      kind = *options.metric_override;
    } else if (labels_it != entry.end()) {
      std::string name = "unknown";
      auto name_it = labels_it->find("__name__");
      if (name_it != labels_it->end() && name_it->is_string()) {
        name = name_it->get<std::string>();
      }
      auto mapped = options.metric_map.find(name);
      kind = MetricKind::parse(mapped != options.metric_map.end()
                                   ? mapped->second
                                   : name);
    }

    std::vector<Sample> samples;
    const auto values_it = entry.find("values");
    if (values_it != entry.end() && values_it->is_array()) {
      samples.reserve(values_it->size());
      for (const auto& pair : *values_it) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
            !pair[1].is_string()) {
          throw Error(Errc::bad_envelope, "malformed value pair for " + node.raw);
        }
        double ts = pair[0].get<double>();
        const std::string v = pair[1].get<std::string>();
        double parsed = 0;
        bool ok = false;
        if (!v.empty()) {
          char* end = nullptr;
          parsed = std::strtod(v.c_str(), &end);
          ok = end == v.c_str() + v.size() && std::isfinite(parsed);
        }
        samples.push_back(ok ? Sample::at(ts, parsed) : Sample::missing_at(ts));
      }
    }
    std::size_t collapsed = 0;
    out.series.push_back(TimeSeries::make(node, kind, std::move(samples),
                                          &collapsed));
    if (collapsed > 0) {
      out.warnings.add(node.raw + ": collapsed " + std::to_string(collapsed) +
                       " duplicate timestamps to their mean");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Canonical CSV store.

namespace detail {

inline std::string format_value(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// Integer epoch seconds are the canonical form; fractional timestamps are
// written in full precision so the round trip stays lossless.
inline std::string format_timestamp(double ts) {
  double rounded = std::nearbyint(ts);
  if (rounded == ts && std::abs(ts) < 9.0e15) {
    return std::to_string(static_cast<std::int64_t>(rounded));
  }
  return format_value(ts);
}

inline bool parse_double_field(std::string_view text, double& out) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace detail

inline std::filesystem::path manifest_path_for(
    const std::filesystem::path& store_path) {
  return std::filesystem::path(store_path.string() + ".manifest.json");
}

// Writes one metric's series to `path` plus the manifest sidecar. Series are
// emitted in (rack, node, timestamp) order regardless of input order.
inline StoreManifest write_store(std::span<const TimeSeries> series,
                                 const std::filesystem::path& path,
                                 double scrape_interval_hint = 15) {
  if (series.empty()) {
    throw Error(Errc::empty_input, "refusing to write an empty store");
  }
  for (const TimeSeries& s : series) {
    if (!(s.metric == series.front().metric)) {
      throw Error(Errc::mixed_metrics,
                  "store would mix " + series.front().metric.name() + " and " +
                      s.metric.name());
    }
  }

  // several input series may describe the same node (a Prometheus export
  // can split one node across label sets); merge them before writing
  std::map<NodeRef, std::vector<Sample>> merged;
  for (const TimeSeries& s : series) {
    auto& bucket = merged[s.node];
    bucket.insert(bucket.end(), s.samples.begin(), s.samples.end());
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out << "node,timestamp,value\n";

  StoreManifest manifest;
  manifest.metric = series.front().metric;
  manifest.scrape_interval_hint = scrape_interval_hint;
  bool first_sample = true;
  for (auto& [node, samples] : merged) {
    TimeSeries s = TimeSeries::make(node, manifest.metric, std::move(samples));
    manifest.nodes.push_back(s.node);
    for (const Sample& sm : s.samples) {
      out << s.node.raw << ',' << detail::format_timestamp(sm.timestamp)
          << ',';
      if (!sm.missing()) out << detail::format_value(*sm.value);
      out << '\n';
      ++manifest.sample_count;
      if (first_sample) {
        manifest.time_min = manifest.time_max = sm.timestamp;
        first_sample = false;
      } else {
        manifest.time_min = std::min(manifest.time_min, sm.timestamp);
        manifest.time_max = std::max(manifest.time_max, sm.timestamp);
      }
    }
  }
  out.flush();
  if (!out) throw Error(Errc::io_error, "short write to " + path.string());

  std::ofstream mout(manifest_path_for(path), std::ios::binary);
  if (!mout) {
    throw Error(Errc::io_error,
                "cannot write " + manifest_path_for(path).string());
  }
  mout << manifest.to_json().dump(2) << '\n';
  return manifest;
}

inline StoreManifest read_manifest(const std::filesystem::path& store_path) {
  std::ifstream in(manifest_path_for(store_path));
  if (!in) {
    throw Error(Errc::io_error,
                "missing manifest " + manifest_path_for(store_path).string());
  }
  try {
    nlohmann::json j;
    in >> j;
    return StoreManifest::from_json(j);
  } catch (const std::exception& e) {
    throw Error(Errc::store_corrupt,
                "bad manifest for " + store_path.string() + ": " + e.what());
  }
}

struct ReadFilters {
  std::optional<std::vector<NodeRef>> nodes;  // keep only these nodes
  std::optional<double> time_min;             // inclusive
  std::optional<double> time_max;             // exclusive
};

// Reads a store back. The node filter drops whole series; the time filter
// trims samples to [time_min, time_max).
inline std::vector<TimeSeries> read_store(const std::filesystem::path& path,
                                          const ReadFilters& filters = {},
                                          Warnings* warnings = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open store " + path.string());

  MetricKind metric = MetricKind::custom(path.stem().string());
  if (std::filesystem::exists(manifest_path_for(path))) {
    metric = read_manifest(path).metric;
  } else {
    warn(warnings, "store " + path.string() +
                       " has no manifest; metric inferred from file name");
  }

  std::optional<std::set<std::string>> keep;
  if (filters.nodes.has_value()) {
    keep.emplace();
    for (const NodeRef& n : *filters.nodes) keep->insert(n.raw);
  }

  std::string line;
  if (!std::getline(in, line)) {
    throw Error(Errc::store_corrupt, path.string() + ": empty file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "node,timestamp,value") {
    throw Error(Errc::store_corrupt,
                path.string() + ": bad header '" + line + "'");
  }

  std::map<std::string, std::vector<Sample>> rows;
  std::map<std::string, NodeRef> ids;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t c1 = line.find(',');
    std::size_t c2 = c1 == std::string::npos ? std::string::npos
                                             : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
      throw Error(Errc::store_corrupt, path.string() + ":" +
                                           std::to_string(line_no) +
                                           ": expected 3 fields");
    }
    std::string_view node_text(line.data(), c1);
    std::string_view ts_text(line.data() + c1 + 1, c2 - c1 - 1);
    std::string_view value_text(line.data() + c2 + 1, line.size() - c2 - 1);

    if (keep.has_value() && keep->count(std::string(node_text)) == 0) continue;

    double ts = 0;
    if (!detail::parse_double_field(ts_text, ts)) {
      throw Error(Errc::store_corrupt, path.string() + ":" +
                                           std::to_string(line_no) +
                                           ": bad timestamp");
    }
    if (filters.time_min.has_value() && ts < *filters.time_min) continue;
    if (filters.time_max.has_value() && ts >= *filters.time_max) continue;

    std::string key(node_text);
    if (ids.find(key) == ids.end()) {
      try {
        ids.emplace(key, parse_node_id(key));
      } catch (const Error&) {
        throw Error(Errc::store_corrupt, path.string() + ":" +
                                             std::to_string(line_no) +
                                             ": bad node id '" + key + "'");
      }
    }
    if (value_text.empty()) {
      rows[key].push_back(Sample::missing_at(ts));
    } else {
      double v = 0;
      if (!detail::parse_double_field(value_text, v)) {
        throw Error(Errc::store_corrupt, path.string() + ":" +
                                             std::to_string(line_no) +
                                             ": bad value");
      }
      rows[key].push_back(Sample::at(ts, v));
    }
  }

  std::vector<TimeSeries> out;
  out.reserve(rows.size());
  for (auto& [key, samples] : rows) {
    std::size_t collapsed = 0;
    out.push_back(TimeSeries::make(ids.at(key), metric, std::move(samples),
                                   &collapsed));
    if (collapsed > 0) {
      warn(warnings, key + ": collapsed " + std::to_string(collapsed) +
                         " duplicate timestamps to their mean");
    }
  }
  std::sort(out.begin(), out.end(),
            [](const TimeSeries& a, const TimeSeries& b) {
              return a.node < b.node;
            });
  return out;
}

// ---------------------------------------------------------------------------
// Coverage.

inline CoverageReport coverage(std::span<const TimeSeries> series,
                               std::span<const NodeRef> expected) {
  CoverageReport report;
  report.expected_nodes = expected.size();

  std::set<NodeRef> present;
  for (const TimeSeries& s : series) {
    present.insert(s.node);
    double max_gap = 0;
    for (std::size_t i = 1; i < s.samples.size(); ++i) {
      max_gap = std::max(max_gap,
                         s.samples[i].timestamp - s.samples[i - 1].timestamp);
    }
    auto [it, inserted] = report.per_node_max_gap_s.emplace(s.node.raw, max_gap);
    if (!inserted) it->second = std::max(it->second, max_gap);
  }

  if (expected.empty()) {
    report.empty_expected = true;
    report.coverage_pct = 100.0;
    return report;
  }

  for (const NodeRef& n : expected) {
    if (present.count(n) > 0) {
      ++report.present_nodes;
    } else {
      report.missing.push_back(n);
    }
  }
  std::sort(report.missing.begin(), report.missing.end());
  report.coverage_pct = 100.0 * static_cast<double>(report.present_nodes) /
                        static_cast<double>(report.expected_nodes);
  return report;
}

}  // namespace tracelens
