// Copyright 2026 the tracelens authors. All rights reserved.
// Use of this source code is governed by the Apache-2.0 license
// that can be found in the LICENSE file.

#include "tracelens/compare.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "support/matchers.hpp"
#include "support/oracles.hpp"

using namespace tracelens;

namespace {

// two periods: [0, 1000) and [1000, 2000)
const PeriodPair kPair{Period("before", 0, 1000), Period("after", 1000, 2000)};

Catalog two_class_catalog() {
  std::vector<NodeRef> nodes;
  for (int i = 1; i <= 3; ++i) nodes.push_back(NodeRef::make(23, i));
  for (int i = 1; i <= 2; ++i) nodes.push_back(NodeRef::make(25, i));
  for (int i = 1; i <= 3; ++i) nodes.push_back(NodeRef::make(30, i));
  return Catalog::from_nodes(std::move(nodes));
}

// node with `n` samples per period; period b values shifted by `shift`;
// `ramp` adds +i per sample so the distributions have spread
TimeSeries shifted_series(int rack, int node, double base, double shift,
                          int n = 20, bool ramp = true) {
  std::vector<Sample> samples;
  for (int i = 0; i < n; ++i) {
    double r = ramp ? i : 0;
    samples.push_back(Sample::at(i * 40.0, base + r));
    samples.push_back(Sample::at(1000 + i * 40.0, base + r + shift));
  }
  return TimeSeries::make(NodeRef::make(rack, node), MetricKind::power_watts(),
                          std::move(samples));
}

}  // namespace

TEST_CASE("compare recovers an injected shift exactly", "[compare]") {
  Catalog catalog = two_class_catalog();
  // constant per period so the recovery is exact, not just approximate
  std::vector<TimeSeries> set;
  for (int i = 1; i <= 3; ++i) {
    set.push_back(shifted_series(30, i, 1200, 1000, 20, false));
  }
  for (int i = 1; i <= 3; ++i) {
    set.push_back(shifted_series(23, i, 200, 0, 20, false));
  }

  ComparisonReport report =
      compare(set, catalog, kPair, Grouping::by_class);
  const GroupComparison* ml = report.find("ML");
  REQUIRE(ml != nullptr);
  REQUIRE(ml->delta_mean.has_value());
  CHECK(*ml->delta_mean == 1000.0);
  const GroupComparison* generic = report.find("Generic");
  REQUIRE(generic != nullptr);
  CHECK(*generic->delta_mean == 0.0);
  CHECK(*generic->delta_median == 0.0);
}

TEST_CASE("identical periods give zero deltas", "[compare]") {
  Catalog catalog = two_class_catalog();
  std::vector<TimeSeries> set{shifted_series(23, 1, 10, 0),
                              shifted_series(30, 1, 20, 0)};
  ComparisonReport report = compare(set, catalog, kPair, Grouping::whole);
  REQUIRE(report.groups.size() == 1);
  CHECK(report.groups[0].id == "all");
  CHECK(*report.groups[0].delta_mean == 0.0);
  CHECK(*report.groups[0].delta_median == 0.0);
}

TEST_CASE("one-sided groups are flagged, not dropped", "[compare]") {
  Catalog catalog = two_class_catalog();
  // rack 25 only has data after the boundary
  std::vector<Sample> late;
  for (int i = 0; i < 10; ++i) late.push_back(Sample::at(1500 + i * 10.0, 5.0));
  std::vector<TimeSeries> set{
      shifted_series(23, 1, 10, 1),
      TimeSeries::make(NodeRef::make(25, 1), MetricKind::power_watts(), late),
  };
  ComparisonReport report = compare(set, catalog, kPair, Grouping::by_rack);
  const GroupComparison* r25 = report.find("r25");
  REQUIRE(r25 != nullptr);
  CHECK(r25->one_sided());
  CHECK_FALSE(r25->a.has_value());
  REQUIRE(r25->b.has_value());
  CHECK_FALSE(r25->delta_mean.has_value());
}

TEST_CASE("whole grouping equals pooled re-summarization", "[compare]") {
  Catalog catalog = two_class_catalog();
  oracle::ValueGen gen(55);
  std::vector<TimeSeries> set;
  std::vector<double> manual_a, manual_b;
  for (int node = 1; node <= 3; ++node) {
    std::vector<Sample> samples;
    for (int i = 0; i < 50; ++i) {
      double ta = std::floor(gen.uniform(0, 999));
      double va = gen.uniform(-100, 100);
      samples.push_back(Sample::at(ta, va));
      double tb = std::floor(gen.uniform(1000, 1999));
      double vb = gen.uniform(-100, 100);
      samples.push_back(Sample::at(tb, vb));
    }
    TimeSeries s = TimeSeries::make(NodeRef::make(23, node),
                                    MetricKind::load1(), samples);
    // duplicates may have collapsed; pull the pooled values from the series
    for (const Sample& sm : s.samples) {
      if (sm.missing()) continue;
      (sm.timestamp < 1000 ? manual_a : manual_b).push_back(*sm.value);
    }
    set.push_back(std::move(s));
  }
  ComparisonReport report = compare(set, catalog, kPair, Grouping::whole);
  oracle::Summary want_a = oracle::summary(manual_a);
  oracle::Summary want_b = oracle::summary(manual_b);
  REQUIRE(report.groups.size() == 1);
  CHECK(oracle::close(report.groups[0].a->mean, want_a.mean));
  CHECK(oracle::close(report.groups[0].b->mean, want_b.mean));
  CHECK(oracle::close(report.groups[0].a->std_dev, want_a.std_dev));
  CHECK(oracle::close(report.groups[0].b->median, want_b.median));
}

TEST_CASE("report is invariant under node input order", "[compare]") {
  Catalog catalog = two_class_catalog();
  std::vector<TimeSeries> set{shifted_series(23, 1, 5, 2),
                              shifted_series(23, 2, 7, 3),
                              shifted_series(30, 1, 100, -4)};
  std::vector<TimeSeries> reversed(set.rbegin(), set.rend());
  ComparisonReport r1 = compare(set, catalog, kPair, Grouping::by_rack);
  ComparisonReport r2 = compare(reversed, catalog, kPair, Grouping::by_rack);
  REQUIRE(r1.groups.size() == r2.groups.size());
  for (std::size_t i = 0; i < r1.groups.size(); ++i) {
    CHECK(r1.groups[i].id == r2.groups[i].id);
    CHECK(r1.groups[i].a->mean == r2.groups[i].a->mean);  // bit-identical
    CHECK(r1.groups[i].b->std_dev == r2.groups[i].b->std_dev);
  }
}

TEST_CASE("deltas are antisymmetric under period swap", "[compare]") {
  Catalog catalog = two_class_catalog();
  std::vector<TimeSeries> set{shifted_series(23, 1, 5, 17),
                              shifted_series(30, 1, 9, -3)};
  ComparisonReport fwd = compare(set, catalog, kPair, Grouping::by_class);
  ComparisonReport rev = compare(set, catalog, kPair.swapped(), Grouping::by_class);
  for (const GroupComparison& g : fwd.groups) {
    const GroupComparison* h = rev.find(g.id);
    REQUIRE(h != nullptr);
    CHECK(*h->delta_mean == -*g.delta_mean);
    CHECK(*h->delta_median == -*g.delta_median);
  }
}

TEST_CASE("percent delta only exists for nonzero baselines", "[compare]") {
  Catalog catalog = two_class_catalog();
  // period a mean is exactly zero
  std::vector<Sample> samples{Sample::at(0, -1), Sample::at(1, 1),
                              Sample::at(1000, 5)};
  std::vector<TimeSeries> set{TimeSeries::make(NodeRef::make(23, 1),
                                               MetricKind::load1(), samples)};
  ComparisonReport report = compare(set, catalog, kPair, Grouping::whole);
  CHECK(report.groups[0].delta_mean.has_value());
  CHECK_FALSE(report.groups[0].pct_delta_mean.has_value());
}

TEST_CASE("compare validates input", "[compare]") {
  Catalog catalog = two_class_catalog();
  std::vector<TimeSeries> empty;
  CHECK_THROWS_MATCHES(compare(empty, catalog, kPair, Grouping::whole), Error,
                       HasCode(Errc::empty_input));
  std::vector<TimeSeries> mixed{shifted_series(23, 1, 1, 0)};
  mixed.push_back(TimeSeries::make(NodeRef::make(23, 2), MetricKind::load1(),
                                   {Sample::at(1, 1)}));
  CHECK_THROWS_MATCHES(compare(mixed, catalog, kPair, Grouping::whole), Error,
                       HasCode(Errc::mixed_metrics));
}

TEST_CASE("rack table layout", "[compare]") {
  Catalog catalog = two_class_catalog();
  std::vector<TimeSeries> set{shifted_series(23, 1, 10, 1),
                              shifted_series(25, 1, 20, 2),
                              shifted_series(30, 1, 30, 3)};
  ComparisonReport report = compare(set, catalog, kPair, Grouping::by_rack);
  TableDoc doc = rack_table(report);
  REQUIRE(doc.headers.size() == 10);
  REQUIRE(doc.rows.size() == 6);  // 3 racks x 2 periods

  // generic racks first, ML after
  CHECK(doc.rows[0][0] == "r23");
  CHECK(doc.rows[2][0] == "r25");
  CHECK(doc.rows[4][0] == "r30");
  CHECK(doc.rows[4][1] == "ML");
  CHECK(doc.rows[0][1] == "Generic");
  CHECK(doc.rows[0][2] == "before");
  CHECK(doc.rows[1][2] == "after");

  SECTION("row values match the oracle") {
    // rack 23 period a values: 10..29
    std::vector<double> values;
    for (int i = 0; i < 20; ++i) values.push_back(10.0 + i);
    oracle::Summary want = oracle::summary(values);
    CHECK(doc.rows[0][3] == "20");
    CHECK(doc.rows[0][4] == TableDoc::format_number(want.mean, 3));
    CHECK(doc.rows[0][5] == TableDoc::format_number(want.std_dev, 3));
    CHECK(doc.rows[0][6] == TableDoc::format_number(want.median, 3));
  }
}

TEST_CASE("rack table demands by-rack grouping", "[compare]") {
  Catalog catalog = two_class_catalog();
  std::vector<TimeSeries> set{shifted_series(23, 1, 10, 1)};
  ComparisonReport report = compare(set, catalog, kPair, Grouping::by_class);
  CHECK_THROWS_MATCHES(rack_table(report), Error,
                       HasCode(Errc::wrong_grouping));
}
