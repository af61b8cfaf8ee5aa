// Copyright 2026 the tracelens authors. All rights reserved.
// Use of this source code is governed by the Apache-2.0 license
// that can be found in the LICENSE file.

#include "tracelens/config.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "support/matchers.hpp"

using namespace tracelens;

TEST_CASE("config parsing", "[config]") {
  ConfigFile cfg = ConfigFile::parse(
      "# comment\n"
      "top = 1\n"
      "[run]\n"
      "metric = \"load1\"\n"
      "interval = 15\n"
      "noise = 2.5\n"
      "out = 'single quoted'\n"
      "bare = hello # trailing comment\n"
      "\n"
      "[metric_map]\n"
      "node_load1 = \"load1\"\n");

  CHECK(cfg.get_string("", "top") == "1");
  CHECK(cfg.get_string("run", "metric") == "load1");
  CHECK(cfg.get_int("run", "interval") == 15);
  CHECK(cfg.get_double("run", "noise") == 2.5);
  CHECK(cfg.get_string("run", "out") == "single quoted");
  CHECK(cfg.get_string("run", "bare") == "hello");
  CHECK(cfg.get_string("run", "absent", "fallback") == "fallback");
  CHECK(cfg.find("nope", "x") == nullptr);
  CHECK(cfg.sections().at("metric_map").at("node_load1") == "load1");
}

TEST_CASE("config syntax errors", "[config]") {
  CHECK_THROWS_MATCHES(ConfigFile::parse("[unclosed\n"), Error,
                       HasCode(Errc::bad_config));
  CHECK_THROWS_MATCHES(ConfigFile::parse("no equals here\n"), Error,
                       HasCode(Errc::bad_config));
  CHECK_THROWS_MATCHES(ConfigFile::parse("key = \"unterminated\n"), Error,
                       HasCode(Errc::bad_config));
  ConfigFile cfg = ConfigFile::parse("[s]\nk = not_a_number\n");
  CHECK_THROWS_MATCHES(cfg.get_int("s", "k"), Error, HasCode(Errc::bad_config));
}

TEST_CASE("duplicate sections stay visible in declaration order", "[config]") {
  ConfigFile cfg = ConfigFile::parse(
      "[rack.7]\nclass = \"generic\"\n[rack.7]\nclass = \"ml\"\n");
  std::size_t rack7 = 0;
  for (const auto& [name, keys] : cfg.ordered_sections()) {
    if (name == "rack.7") ++rack7;
  }
  CHECK(rack7 == 2);
  // merged view keeps the last value
  CHECK(cfg.get_string("rack.7", "class") == "ml");
}
