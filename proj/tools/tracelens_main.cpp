// Copyright 2026 the tracelens authors. All rights reserved.
// Use of this source code is governed by the Apache-2.0 license
// that can be found in the LICENSE file.

// tracelens: characterize a trace store and compare two time periods.
//
// Defaults come from the config file named by TRACELENS_CONFIG (section
// [run]); command-line flags override it.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tracelens/run.hpp"

namespace {

using tracelens::Errc;
using tracelens::Error;

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string item = text.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

tracelens::Period parse_period_flag(const std::string& text,
                                    const std::string& label,
                                    tracelens::TzOffset tz) {
  std::size_t sep = text.find("..");
  if (sep == std::string::npos) {
    throw Error(Errc::bad_config,
                "period must look like START..END, got '" + text + "'");
  }
  auto start = tracelens::parse_local_datetime(text.substr(0, sep), tz);
  auto end = tracelens::parse_local_datetime(text.substr(sep + 2), tz);
  if (!start || !end) {
    throw Error(Errc::bad_config, "cannot parse period '" + text +
                                      "' (use YYYY-MM-DD[THH:MM[:SS]])");
  }
  return tracelens::Period(label, static_cast<double>(*start),
                           static_cast<double>(*end));
}

// Registers a store path: the metric association comes from the manifest
// sidecar, or the file stem when there is none.
void add_store(std::map<std::string, std::filesystem::path>& stores,
               const std::filesystem::path& path) {
  std::string name = path.stem().string();
  if (std::filesystem::exists(tracelens::manifest_path_for(path))) {
    name = tracelens::read_manifest(path).metric.name();
  }
  stores[name] = path;
}

int run_cli(int argc, char** argv) {
  CLI::App app{
      "tracelens: statistical characterization and two-period comparison of "
      "datacenter trace stores"};
  app.get_formatter()->column_width(30);

  std::vector<std::string> store_flags;
  std::string catalog_flag, metric_flag, nodes_flag, racks_flag, class_flag;
  std::string split_date_flag, period_a_flag, period_b_flag;
  std::string tz_flag, out_flag, tables_flag, agg_flag;
  double interval_flag = -1;

  app.add_option("--store", store_flags,
                 "trace store CSV (repeatable, one per metric)");
  app.add_option("--catalog", catalog_flag, "catalog file (rack classes)");
  app.add_option("--metric", metric_flag,
                 "metric to analyze (load1, power_watts, "
                 "ram_utilization_pct, ambient_temp_celsius, or custom)");
  app.add_option("--nodes", nodes_flag, "comma-separated node ids (r30n1,...)");
  app.add_option("--racks", racks_flag, "comma-separated rack numbers");
  app.add_option("--class", class_flag, "restrict to a node class: generic|ml");
  app.add_option("--split-date", split_date_flag,
                 "period boundary YYYY-MM-DD (default 2020-02-27)");
  app.add_option("--period-a", period_a_flag,
                 "custom period START..END; alone it disables comparison");
  app.add_option("--period-b", period_b_flag, "second custom period START..END");
  app.add_option("--interval", interval_flag, "resample interval in seconds");
  app.add_option("--agg", agg_flag, "profile aggregation across nodes: sum|mean");
  app.add_option("--tz", tz_flag, "fixed UTC offset +HH:MM (default +01:00)");
  app.add_option("--out", out_flag, "output directory");
  app.add_option("--tables", tables_flag, "table format: csv|md");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: bad-config: " << e.what() << "\n";
    return 2;
  }

  tracelens::ConfigFile cfg;
  if (const char* env = std::getenv("TRACELENS_CONFIG");
      env != nullptr && *env != '\0') {
    cfg = tracelens::ConfigFile::parse_file(env);
  }
  auto effective = [&](const std::string& flag_value, const char* key,
                       std::string fallback = {}) {
    if (!flag_value.empty()) return flag_value;
    return cfg.get_string("run", key, std::move(fallback));
  };

  tracelens::RunConfig config;

  const std::string tz_text = effective(tz_flag, "tz", "+01:00");
  config.tz = tracelens::TzOffset::parse(tz_text);

  for (const std::string& s : store_flags) add_store(config.stores, s);
  if (auto it = cfg.sections().find("run"); it != cfg.sections().end()) {
    for (const auto& [key, value] : it->second) {
      if (key.rfind("store.", 0) == 0 &&
          config.stores.find(key.substr(6)) == config.stores.end()) {
        config.stores[key.substr(6)] = value;
      }
    }
  }

  const std::string metric_name = effective(metric_flag, "metric");
  if (metric_name.empty()) {
    throw Error(Errc::bad_config, "--metric is required");
  }
  config.metric = tracelens::MetricKind::parse(metric_name);

  if (std::string c = effective(catalog_flag, "catalog"); !c.empty()) {
    config.catalog_path = c;
  }

  const std::string nodes_text = effective(nodes_flag, "nodes");
  const std::string racks_text = effective(racks_flag, "racks");
  const std::string class_text = effective(class_flag, "class");
  if (!nodes_text.empty()) {
    std::vector<tracelens::NodeRef> nodes;
    for (const std::string& id : split_csv(nodes_text)) {
      nodes.push_back(tracelens::parse_node_id(id));
    }
    config.selection.nodes = std::move(nodes);
  }
  if (!racks_text.empty()) {
    std::vector<int> racks;
    for (const std::string& r : split_csv(racks_text)) {
      try {
        std::size_t used = 0;
        int v = std::stoi(r, &used);
        if (used != r.size() || v < 0) throw std::invalid_argument(r);
        racks.push_back(v);
      } catch (const std::exception&) {
        throw Error(Errc::bad_config, "bad rack number '" + r + "'");
      }
    }
    config.selection.racks = std::move(racks);
  }
  if (!class_text.empty()) {
    auto cls = tracelens::parse_node_class(class_text);
    if (!cls) {
      throw Error(Errc::bad_config,
                  "--class must be generic or ml, got '" + class_text + "'");
    }
    config.selection.node_class = cls;
  }

  const std::string period_a = effective(period_a_flag, "period_a");
  const std::string period_b = effective(period_b_flag, "period_b");
  const std::string split_date = effective(split_date_flag, "split_date");
  if (!period_a.empty() && !period_b.empty()) {
    config.periods = tracelens::PeriodPair(
        parse_period_flag(period_a, "period-a", config.tz),
        parse_period_flag(period_b, "period-b", config.tz));
  } else if (!period_a.empty()) {
    config.single_period = parse_period_flag(period_a, "period-a", config.tz);
  } else if (!period_b.empty()) {
    throw Error(Errc::bad_config, "--period-b needs --period-a");
  } else if (!split_date.empty()) {
    auto date = tracelens::parse_date(split_date);
    if (!date) {
      throw Error(Errc::bad_config,
                  "--split-date must be YYYY-MM-DD, got '" + split_date + "'");
    }
    // the default boundary keeps the documented default span
    if (!(*date == tracelens::kDefaultSplitDate)) config.split_date = date;
  }

  if (interval_flag > 0) {
    config.interval_s = interval_flag;
  } else if (auto v = cfg.get_double("run", "interval"); v.has_value()) {
    config.interval_s = *v;
  }
  if (!(config.interval_s > 0)) {
    throw Error(Errc::bad_config, "--interval must be positive");
  }

  if (std::string a = effective(agg_flag, "agg", "sum"); true) {
    auto agg = tracelens::parse_agg_mode(a);
    if (!agg) {
      throw Error(Errc::bad_config, "--agg must be sum or mean, got '" + a + "'");
    }
    config.agg = *agg;
  }

  if (std::string t = effective(tables_flag, "tables", "csv"); true) {
    auto fmt = tracelens::parse_table_format(t);
    if (!fmt) {
      throw Error(Errc::bad_config, "--tables must be csv or md, got '" + t + "'");
    }
    config.tables = *fmt;
  }

  const std::string out_text = effective(out_flag, "out");
  if (out_text.empty()) {
    throw Error(Errc::bad_config, "--out is required");
  }
  config.out_dir = out_text;

  tracelens::RunSummary summary = tracelens::run(config);
  for (const std::string& w : summary.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  std::cout << "wrote " << summary.files.size() << " files under "
            << config.out_dir.generic_string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << tracelens::errc_name(e.code()) << ": "
              << e.detail() << "\n";
    return tracelens::errc_exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
}
