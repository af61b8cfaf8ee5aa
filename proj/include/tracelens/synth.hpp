// Copyright 2026 the tracelens authors. All rights reserved.
// Use of this source code is governed by the Apache-2.0 license
// that can be found in the LICENSE file.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tracelens/catalog.hpp"
#include "tracelens/ingest.hpp"
#include "tracelens/trace_model.hpp"

// Seeded synthetic trace stores with known ground truth: per-class baselines,
// a diurnal sine, an injected step at the covid boundary, Gaussian noise, and
// deliberately omitted nodes. Fixtures, demos and the acceptance suite all
// run on these.

namespace tracelens {

// SplitMix64 (Steele, Lea & Flood). Fixed constants, identical streams on
// every platform; documented in the README.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in (0, 1]: 53 mantissa bits, never exactly zero.
  double uniform01() {
    return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
  }

  // One standard normal draw via Box-Muller (cosine branch).
  double gaussian() {
    double u1 = uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }
};

inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

struct SynthRackSpec {
  NodeClass node_class = NodeClass::Generic;
  int node_count = 0;
};

struct SynthMetricParams {
  double baseline_generic = 0;
  double baseline_ml = 0;
  double diurnal_amplitude = 0;
  double peak_hour = 14;
  double covid_shift_generic = 0;
  double covid_shift_ml = 0;
};

struct SynthConfig {
  std::uint64_t seed = 1;
  Period span;
  std::int64_t shift_start = 0;  // covid boundary; shift applies from here on
  std::map<int, SynthRackSpec> racks;
  std::map<std::string, SynthMetricParams> metrics;  // keyed by kind name
  double missing_node_fraction = 0;  // omitted from stores, kept in catalog
  double noise_std = 0;
  std::int64_t interval_s = 60;
  TzOffset tz{60};

  void validate() const {
    if (missing_node_fraction < 0 || missing_node_fraction > 1) {
      throw Error(Errc::bad_config, "missing_node_fraction must be in [0,1]");
    }
    if (interval_s <= 0) {
      throw Error(Errc::bad_config, "interval_s must be positive");
    }
    if (metrics.empty()) {
      throw Error(Errc::bad_config, "no metrics configured");
    }
    if (racks.empty()) {
      throw Error(Errc::bad_config, "no racks configured");
    }
  }
};

// A small LISA-like topology: four generic racks of 8 and the five ML racks
// of 11 (55 ML nodes), with paper-flavored baselines.
inline SynthConfig default_synth_config(TzOffset tz = TzOffset{60}) {
  SynthConfig cfg{
      .seed = 1,
      .span = Period("trace",
                     static_cast<double>(
                         epoch_from_local(kDefaultSpanStart, 0, 0, 0, tz)),
                     static_cast<double>(
                         epoch_from_local(kDefaultSpanEnd, 0, 0, 0, tz))),
      .shift_start = epoch_from_local(kDefaultSplitDate, 0, 0, 0, tz),
      .racks = {},
      .metrics = {},
      .missing_node_fraction = 0,
      .noise_std = 0,
      .interval_s = 900,
      .tz = tz,
  };
  for (int r : {10, 11, 12, 23}) {
    cfg.racks[r] = SynthRackSpec{NodeClass::Generic, 8};
  }
  for (int r : {30, 31, 32, 33, 34}) {
    cfg.racks[r] = SynthRackSpec{NodeClass::ML, 11};
  }
  cfg.metrics["power_watts"] =
      SynthMetricParams{200, 1200, 20, 14, 30, 1000};
  cfg.metrics["load1"] = SynthMetricParams{8, 2, 4, 14, 4, -1};
  cfg.metrics["ram_utilization_pct"] = SynthMetricParams{25, 20, 5, 15, -3, 5};
  cfg.metrics["ambient_temp_celsius"] = SynthMetricParams{24, 25, 0.5, 16, 0, 2};
  return cfg;
}

struct SynthPeriodMeans {
  double mean_a = 0;  // noise-free mean before the shift boundary
  double mean_b = 0;  // and from the boundary on
  std::uint64_t count_a = 0;
  std::uint64_t count_b = 0;
};

struct GroundTruth {
  std::vector<NodeRef> omitted;
  // metric name -> class name -> noise-free period means
  std::map<std::string, std::map<std::string, SynthPeriodMeans>> group_means;

  nlohmann::json to_json() const {
    nlohmann::json j;
    auto& om = j["omitted_nodes"] = nlohmann::json::array();
    for (const NodeRef& n : omitted) om.push_back(n.raw);
    for (const auto& [metric, classes] : group_means) {
      for (const auto& [cls, m] : classes) {
        nlohmann::json& g = j["group_means"][metric][cls];
        g["mean_a"] = m.mean_a;
        g["mean_b"] = m.mean_b;
        g["count_a"] = m.count_a;
        g["count_b"] = m.count_b;
      }
    }
    return j;
  }
};

struct SynthResult {
  std::map<std::string, std::filesystem::path> store_files;  // by metric name
  std::map<std::string, StoreManifest> manifests;
  std::filesystem::path catalog_file;
  std::filesystem::path ground_truth_file;
  GroundTruth truth;
};

inline Catalog synth_catalog(const SynthConfig& cfg) {
  std::vector<NodeRef> nodes;
  std::map<int, NodeClass> classes;
  for (const auto& [rack, spec] : cfg.racks) {
    classes[rack] = spec.node_class;
    for (int i = 1; i <= spec.node_count; ++i) {
      nodes.push_back(NodeRef::make(rack, i));
    }
  }
  return Catalog(std::move(nodes), std::move(classes));
}

namespace detail {

inline std::vector<NodeRef> pick_omitted(const std::vector<NodeRef>& nodes,
                                         double fraction, std::uint64_t seed) {
  std::size_t k = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(nodes.size())));
  std::vector<NodeRef> pool = nodes;  // already sorted
  SplitMix64 rng(seed ^ 0x6f6d69747465640aull);
  // Fisher-Yates with our own stream so the choice is platform-stable.
  for (std::size_t i = pool.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.next() % i);
    std::swap(pool[i - 1], pool[j]);
  }
  std::vector<NodeRef> omitted(pool.begin(),
                               pool.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(omitted.begin(), omitted.end());
  return omitted;
}

}  // namespace detail

// Generates one store per configured metric plus catalog.toml and
// ground-truth.json. Deterministic for a fixed seed: per-node streams are
// seeded from seed ^ fnv1a64(metric "/" node), so generation order (or
// parallel generation) cannot change the output.
inline SynthResult generate(const SynthConfig& cfg,
                            const std::filesystem::path& out_dir) {
  cfg.validate();
  std::filesystem::create_directories(out_dir);

  Catalog catalog = synth_catalog(cfg);
  SynthResult result;
  result.truth.omitted = detail::pick_omitted(
      catalog.nodes(), cfg.missing_node_fraction, cfg.seed);

  const std::int64_t t0 = static_cast<std::int64_t>(cfg.span.start);
  const std::int64_t t1 = static_cast<std::int64_t>(cfg.span.end);

  for (const auto& [metric_name, params] : cfg.metrics) {
    const MetricKind kind = MetricKind::parse(metric_name);
    std::vector<TimeSeries> series;
    std::map<std::string, SynthPeriodMeans> sums;  // class -> accumulators

    for (const NodeRef& node : catalog.nodes()) {
      if (std::binary_search(result.truth.omitted.begin(),
                             result.truth.omitted.end(), node)) {
        continue;
      }
      const NodeClass cls = catalog.rack_class(node.rack);
      const bool ml = cls == NodeClass::ML;
      const double baseline = ml ? params.baseline_ml : params.baseline_generic;
      const double shift =
          ml ? params.covid_shift_ml : params.covid_shift_generic;

      SplitMix64 rng(cfg.seed ^ fnv1a64(metric_name + "/" + node.raw));
      std::vector<Sample> samples;
      samples.reserve(static_cast<std::size_t>((t1 - t0) / cfg.interval_s) + 1);
      SynthPeriodMeans& acc = sums[node_class_name(cls)];
      for (std::int64_t t = t0; t < t1; t += cfg.interval_s) {
        const double hour = local_fractional_hour(static_cast<double>(t), cfg.tz);
        const bool covid = t >= cfg.shift_start;
        const double clean =
            baseline +
            params.diurnal_amplitude *
                std::sin(2.0 * std::numbers::pi * (hour - params.peak_hour) /
                         24.0) +
            (covid ? shift : 0.0);
        const double value =
            clean + (cfg.noise_std > 0 ? cfg.noise_std * rng.gaussian() : 0.0);
        samples.push_back(Sample::at(static_cast<double>(t), value));
        if (covid) {
          acc.mean_b += clean;
          ++acc.count_b;
        } else {
          acc.mean_a += clean;
          ++acc.count_a;
        }
      }
      series.push_back(TimeSeries::make(node, kind, std::move(samples)));
    }

    for (auto& [cls, acc] : sums) {
      if (acc.count_a > 0) acc.mean_a /= static_cast<double>(acc.count_a);
      if (acc.count_b > 0) acc.mean_b /= static_cast<double>(acc.count_b);
    }
    result.truth.group_means[metric_name] = std::move(sums);

    const std::filesystem::path store = out_dir / (metric_name + ".csv");
    result.manifests[metric_name] =
        write_store(series, store, static_cast<double>(cfg.interval_s));
    result.store_files[metric_name] = store;
  }

  // catalog file covering all nodes, including the omitted ones
  result.catalog_file = out_dir / "catalog.toml";
  {
    std::ofstream out(result.catalog_file, std::ios::binary);
    if (!out) {
      throw Error(Errc::io_error,
                  "cannot write " + result.catalog_file.string());
    }
    for (const auto& [rack, spec] : cfg.racks) {
      out << "[rack." << rack << "]\n";
      out << "class = \""
          << (spec.node_class == NodeClass::ML ? "ml" : "generic") << "\"\n";
      out << "nodes = " << spec.node_count << "\n\n";
    }
  }

  result.ground_truth_file = out_dir / "ground-truth.json";
  {
    std::ofstream out(result.ground_truth_file, std::ios::binary);
    if (!out) {
      throw Error(Errc::io_error,
                  "cannot write " + result.ground_truth_file.string());
    }
    out << result.truth.to_json().dump(2) << '\n';
  }
  return result;
}

}  // namespace tracelens
