// Copyright 2026 the tracelens authors. All rights reserved.
// Use of this source code is governed by the Apache-2.0 license
// that can be found in the LICENSE file.

#include "tracelens/trace_model.hpp"

#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "support/matchers.hpp"

using namespace tracelens;

TEST_CASE("node ids parse rack and node", "[model]") {
  NodeRef n = parse_node_id("r30n1");
  CHECK(n.rack == 30);
  CHECK(n.node == 1);
  CHECK(n.raw == "r30n1");

  NodeRef m = parse_node_id("r23n26");
  CHECK(m.rack == 23);
  CHECK(m.node == 26);

  // case-insensitive, raw kept verbatim
  NodeRef u = parse_node_id("R7N2");
  CHECK(u.rack == 7);
  CHECK(u.node == 2);
  CHECK(u.raw == "R7N2");
}

TEST_CASE("malformed node ids are rejected", "[model]") {
  for (const char* bad : {"x30n1", "r30", "node7", "r-1n2", "", "rn", "r3n",
                          "r3n4x", "r 3n4"}) {
    CHECK_THROWS_MATCHES(parse_node_id(bad), Error,
                         HasCode(Errc::malformed_node_id));
  }
}

TEST_CASE("node id round trip", "[model]") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    int rack = static_cast<int>(rng() % 1000);
    int node = static_cast<int>(rng() % 1000);
    NodeRef n = parse_node_id(format_node_id(rack, node));
    CHECK(n.rack == rack);
    CHECK(n.node == node);
    CHECK(n == NodeRef::make(rack, node));
  }
}

TEST_CASE("time series construction sorts and deduplicates", "[model]") {
  std::vector<Sample> samples = {
      Sample::at(30, 3.0), Sample::at(0, 1.0),  Sample::at(15, 2.0),
      Sample::at(15, 4.0), Sample::missing_at(45),
  };
  std::size_t collapsed = 0;
  TimeSeries s = TimeSeries::make(NodeRef::make(1, 1), MetricKind::load1(),
                                  samples, &collapsed);
  REQUIRE(s.samples.size() == 4);
  CHECK(collapsed == 1);
  for (std::size_t i = 1; i < s.samples.size(); ++i) {
    CHECK(s.samples[i - 1].timestamp < s.samples[i].timestamp);
  }
  CHECK(s.samples[1].value == 3.0);  // mean of 2 and 4
  CHECK(s.samples[3].missing());

  SECTION("duplicate of value and missing keeps the value") {
    TimeSeries t = TimeSeries::make(
        NodeRef::make(1, 1), MetricKind::load1(),
        {Sample::at(10, 5.0), Sample::missing_at(10)});
    REQUIRE(t.samples.size() == 1);
    CHECK(t.samples[0].value == 5.0);
  }

  SECTION("all-missing duplicates stay missing") {
    TimeSeries t = TimeSeries::make(
        NodeRef::make(1, 1), MetricKind::load1(),
        {Sample::missing_at(10), Sample::missing_at(10)});
    REQUIRE(t.samples.size() == 1);
    CHECK(t.samples[0].missing());
  }
}

TEST_CASE("samples never store non-finite values", "[model]") {
  CHECK(Sample::at(0, std::numeric_limits<double>::quiet_NaN()).missing());
  CHECK(Sample::at(0, std::numeric_limits<double>::infinity()).missing());
  CHECK_FALSE(Sample::at(0, 1.5).missing());
}

TEST_CASE("periods validate their bounds", "[model]") {
  CHECK_THROWS_AS(Period("bad", 10, 10), Error);
  CHECK_THROWS_AS(Period("bad", 10, 5), Error);

  Period a("a", 0, 10);
  Period b("b", 10, 20);
  CHECK_NOTHROW(PeriodPair(a, b));
  CHECK_NOTHROW(PeriodPair(b, a));  // order does not matter, only overlap

  CHECK_THROWS_MATCHES(PeriodPair(Period("a", 0, 11), Period("b", 10, 20)),
                       Error, HasCode(Errc::overlapping_periods));
}

TEST_CASE("default covid pair boundaries", "[model]") {
  TzOffset tz(60);
  PeriodPair pair = default_covid_pair(tz);
  CHECK(pair.a.label == "non-covid");
  CHECK(pair.b.label == "covid");
  CHECK(pair.a.end == pair.b.start);
  // 2020-02-27 00:00 at +01:00 is 2020-02-26 23:00 UTC
  CHECK(pair.b.start == static_cast<double>(
                            epoch_from_local(CivilDate{2020, 2, 27}, 0, 0, 0, tz)));
}

TEST_CASE("civil date arithmetic", "[model]") {
  CHECK(days_from_civil(1970, 1, 1) == 0);
  CHECK(days_from_civil(2020, 1, 1) == 18262);
  CHECK(civil_from_days(18262) == CivilDate{2020, 1, 1});
  // 2020 is a leap year
  CHECK(days_from_civil(2020, 3, 1) - days_from_civil(2020, 2, 1) == 29);
  CHECK(days_in_month(2020, 2) == 29);
  CHECK(days_in_month(2021, 2) == 28);
  // 2020-02-27 was a Thursday
  CHECK(weekday_mon0(days_from_civil(2020, 2, 27)) == 3);
  // round trip across a wide range
  for (std::int64_t day = -200000; day <= 200000; day += 797) {
    CHECK(days_from_civil(civil_from_days(day)) == day);
  }
}

TEST_CASE("timezone offsets", "[model]") {
  CHECK(TzOffset::parse("+01:00").minutes() == 60);
  CHECK(TzOffset::parse("-05:30").minutes() == -330);
  CHECK(TzOffset::parse("Z").minutes() == 0);
  CHECK(TzOffset::parse("+01:00").to_string() == "+01:00");
  CHECK(TzOffset::parse("-05:30").to_string() == "-05:30");
  CHECK_THROWS_AS(TzOffset::parse("01:00"), Error);
  CHECK_THROWS_AS(TzOffset::parse("+1:00"), Error);
  CHECK_THROWS_AS(TzOffset::parse("+25:00"), Error);

  TzOffset tz(60);
  std::int64_t t = epoch_from_local(CivilDate{2020, 2, 27}, 0, 0, 0, tz);
  CHECK(local_day(static_cast<double>(t), tz) ==
        days_from_civil(2020, 2, 27));
  CHECK(local_hour(static_cast<double>(t), tz) == 0);
  CHECK(local_day(static_cast<double>(t) - 1, tz) ==
        days_from_civil(2020, 2, 26));
  CHECK(local_hour(static_cast<double>(t) - 1, tz) == 23);
}

TEST_CASE("local datetime parsing", "[model]") {
  TzOffset tz(60);
  CHECK(parse_local_datetime("2020-03-01", tz) ==
        epoch_from_local(CivilDate{2020, 3, 1}, 0, 0, 0, tz));
  CHECK(parse_local_datetime("2020-03-01T12:30", tz) ==
        epoch_from_local(CivilDate{2020, 3, 1}, 12, 30, 0, tz));
  CHECK(parse_local_datetime("2020-03-01T12:30:45", tz) ==
        epoch_from_local(CivilDate{2020, 3, 1}, 12, 30, 45, tz));
  CHECK_FALSE(parse_local_datetime("2020-3-1", tz).has_value());
  CHECK_FALSE(parse_local_datetime("2020-02-30", tz).has_value());
  CHECK_FALSE(parse_local_datetime("2020-03-01 12:30", tz).has_value());
  CHECK_FALSE(parse_date("2021-02-29").has_value());
  CHECK(parse_date("2020-02-29").has_value());
}

TEST_CASE("metric kinds", "[model]") {
  CHECK(MetricKind::parse("load1") == MetricKind::load1());
  CHECK(MetricKind::load1().is_builtin());
  CHECK_FALSE(MetricKind::custom("gpu_util").is_builtin());
  CHECK(MetricKind::power_watts().unit() == "W");
  CHECK(MetricKind::ram_utilization_pct().unit() == "%");
  CHECK(MetricKind::custom("gpu_util").unit() == "");
}
