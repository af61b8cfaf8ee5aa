// Copyright 2026 the tracelens authors. All rights reserved.
// Use of this source code is governed by the Apache-2.0 license
// that can be found in the LICENSE file.

// tracelens-ingest: convert Prometheus range-query JSON exports into the
// canonical CSV store. The node label key and the metric-name mapping come
// from the [ingest] and [metric_map] sections of the TRACELENS_CONFIG file.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tracelens/config.hpp"
#include "tracelens/ingest.hpp"

int main(int argc, char** argv) {
  CLI::App app{"tracelens-ingest: Prometheus JSON to canonical CSV store"};

  std::vector<std::string> inputs;
  std::string out_dir = ".";
  std::string metric_override;
  std::string node_label;

  app.add_option("--json", inputs, "Prometheus range-result JSON file")
      ->required();
  app.add_option("--out-dir", out_dir, "directory for <metric>.csv stores");
  app.add_option("--metric", metric_override,
                 "force every series onto this metric kind");
  app.add_option("--node-label", node_label,
                 "label carrying the node id (default: node)");

  CLI11_PARSE(app, argc, argv);

  try {
    tracelens::PromParseOptions options;
    if (const char* env = std::getenv("TRACELENS_CONFIG");
        env != nullptr && *env != '\0') {
      tracelens::ConfigFile cfg = tracelens::ConfigFile::parse_file(env);
      options.node_label = cfg.get_string("ingest", "node_label", "node");
      if (auto it = cfg.sections().find("metric_map");
          it != cfg.sections().end()) {
        options.metric_map = it->second;
      }
    }
    if (!node_label.empty()) options.node_label = node_label;
    if (!metric_override.empty()) {
      options.metric_override = tracelens::MetricKind::parse(metric_override);
    }

    std::map<std::string, std::vector<tracelens::TimeSeries>> by_metric;
    for (const std::string& input : inputs) {
      std::ifstream in(input, std::ios::binary);
      if (!in) {
        throw tracelens::Error(tracelens::Errc::io_error,
                               "cannot open " + input);
      }
      std::ostringstream buf;
      buf << in.rdbuf();
      tracelens::PromParseResult parsed =
          tracelens::parse_prometheus_matrix(buf.str(), options);
      for (const std::string& w : parsed.warnings.items) {
        std::cerr << "warning: " << input << ": " << w << "\n";
      }
      for (tracelens::TimeSeries& s : parsed.series) {
        by_metric[s.metric.name()].push_back(std::move(s));
      }
    }
    if (by_metric.empty()) {
      throw tracelens::Error(tracelens::Errc::empty_input,
                             "no usable series in the input");
    }

    std::filesystem::create_directories(out_dir);
    for (const auto& [metric, series] : by_metric) {
      std::filesystem::path store =
          std::filesystem::path(out_dir) / (metric + ".csv");
      tracelens::StoreManifest manifest = tracelens::write_store(series, store);
      std::cout << metric << ": " << store.generic_string() << " ("
                << manifest.sample_count << " samples, "
                << manifest.nodes.size() << " nodes)\n";
    }
    return 0;
  } catch (const tracelens::Error& e) {
    std::cerr << "error: " << tracelens::errc_name(e.code()) << ": "
              << e.detail() << "\n";
    return tracelens::errc_exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
}
