// Copyright 2026 the tracelens authors. All rights reserved.
// Use of this source code is governed by the Apache-2.0 license
// that can be found in the LICENSE file.

// tracelens-synth: generate a seeded synthetic trace store with known ground
// truth, for demos and verification runs.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "tracelens/synth.hpp"

int main(int argc, char** argv) {
  CLI::App app{"tracelens-synth: seeded synthetic trace store generator"};

  std::uint64_t seed = 1;
  std::string out_dir = "synth-out";
  std::string start = "2020-01-01";
  std::string end = "2020-08-13";
  std::string tz_text = "+01:00";
  std::int64_t interval = 900;
  double noise = 25;
  double missing_fraction = 0;

  app.add_option("--seed", seed, "generator seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--start", start, "span start YYYY-MM-DD");
  app.add_option("--end", end, "span end YYYY-MM-DD (exclusive)");
  app.add_option("--interval", interval, "sample interval in seconds");
  app.add_option("--noise", noise, "Gaussian noise standard deviation");
  app.add_option("--missing-fraction", missing_fraction,
                 "fraction of nodes omitted from the store");
  app.add_option("--tz", tz_text, "fixed UTC offset +HH:MM");

  CLI11_PARSE(app, argc, argv);

  try {
    tracelens::TzOffset tz = tracelens::TzOffset::parse(tz_text);
    tracelens::SynthConfig cfg = tracelens::default_synth_config(tz);
    cfg.seed = seed;
    auto s = tracelens::parse_date(start);
    auto e = tracelens::parse_date(end);
    if (!s || !e) {
      std::cerr << "error: bad-config: --start/--end must be YYYY-MM-DD\n";
      return 2;
    }
    cfg.span = tracelens::Period(
        "trace",
        static_cast<double>(tracelens::epoch_from_local(*s, 0, 0, 0, tz)),
        static_cast<double>(tracelens::epoch_from_local(*e, 0, 0, 0, tz)));
    cfg.interval_s = interval;
    cfg.noise_std = noise;
    cfg.missing_node_fraction = missing_fraction;

    tracelens::SynthResult result = tracelens::generate(cfg, out_dir);
    for (const auto& [metric, path] : result.store_files) {
      std::cout << metric << ": " << path.generic_string() << "\n";
    }
    std::cout << "catalog: " << result.catalog_file.generic_string() << "\n";
    std::cout << "ground truth: " << result.ground_truth_file.generic_string()
              << "\n";
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
