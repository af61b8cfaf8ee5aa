// Copyright 2026 the tracelens authors. All rights reserved.
// Use of this source code is governed by the Apache-2.0 license
// that can be found in the LICENSE file.

#include "tracelens/render.hpp"

#include <regex>

#include <catch2/catch_amalgamated.hpp>

#include "support/matchers.hpp"
#include "support/oracles.hpp"
#include "support/xml_check.hpp"

using namespace tracelens;

namespace {

std::size_t count_occurrences(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

Profile small_profile() {
  std::vector<double> base{3, 4, 6, 9, 7, 5, 4, 3, 2, 2, 3, 4,
                           5, 6, 8, 9, 8, 7, 6, 5, 4, 3, 3, 3};
  Profile p;
  p.kind = ProfileKind::hourly;
  for (double v : base) {
    p.bin_values.push_back(v);
    p.bin_counts.push_back(2);
    p.band_low.push_back(v - 0.5);
    p.band_high.push_back(v + 0.5);
  }
  return p;
}

ChartSpec curve_spec() {
  ChartSpec spec;
  spec.kind = ChartKind::curve;
  spec.title = "hourly";
  spec.x_label = "hour of day";
  spec.y_label = "load";
  spec.series.push_back(ChartSeries{"before", small_profile()});
  return spec;
}

void require_well_formed(const std::string& svg) {
  auto err = xmlcheck::check(svg);
  INFO(err.value_or(""));
  REQUIRE_FALSE(err.has_value());
}

// every plotted mark must stay inside the plot frame (no clipped data);
// the frame is y in [44, height-52] with a pixel of slack
void check_geometry_within(const std::string& svg, double height) {
  const double top = 43.0;
  const double bottom = height - 51.0;
  auto check_y = [&](double v) {
    CHECK(v >= top);
    CHECK(v <= bottom);
  };
  static const std::regex coord(R"((?:cy|y1|y2)="(-?[0-9.]+)\")");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), coord);
       it != std::sregex_iterator(); ++it) {
    check_y(std::stod((*it)[1]));
  }
  static const std::regex pts(R"(points="([^"]*)\")");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), pts);
       it != std::sregex_iterator(); ++it) {
    std::string body = (*it)[1];
    static const std::regex pair(R"(([0-9.-]+),([0-9.-]+))");
    for (auto p = std::sregex_iterator(body.begin(), body.end(), pair);
         p != std::sregex_iterator(); ++p) {
      check_y(std::stod((*p)[2]));
    }
  }
  // path data: absolute M/L commands with alternating x y tokens
  static const std::regex path(R"( d="([^"]*)\")");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), path);
       it != std::sregex_iterator(); ++it) {
    std::string body = (*it)[1];
    static const std::regex num(R"(-?[0-9]+\.?[0-9]*)");
    std::size_t index = 0;
    for (auto p = std::sregex_iterator(body.begin(), body.end(), num);
         p != std::sregex_iterator(); ++p, ++index) {
      if (index % 2 == 1) check_y(std::stod((*p)[0]));
    }
  }
}

}  // namespace

TEST_CASE("violin annotates the max density", "[render]") {
  std::vector<double> values;
  oracle::ValueGen gen(17);
  for (int i = 0; i < 500; ++i) values.push_back(gen.gaussian() * 10 + 100);
  DensityCurve density = kde(values);
  ViolinData vd{density, box_stats(values)};

  ChartSpec spec;
  spec.kind = ChartKind::violin;
  spec.title = "distribution";
  spec.series.push_back(ChartSeries{"covid", vd});
  std::string svg = render_chart(spec);
  require_well_formed(svg);

  std::string expected = svg::sig3(density.max_density);
  std::string needle = ">" + expected + "</text>";
  CHECK(count_occurrences(svg, needle) == 1);
}

TEST_CASE("degenerate violin falls back to a tick mark", "[render]") {
  ViolinData vd;
  vd.box = box_stats(std::vector<double>{4, 4, 4, 4});
  ChartSpec spec;
  spec.kind = ChartKind::violin;
  spec.series.push_back(ChartSeries{"flat", vd});
  std::string svg = render_chart(spec);
  require_well_formed(svg);
  CHECK(svg.find("path") == std::string::npos);  // no density outline
}

TEST_CASE("curve draws one vertical rule per boundary annotation", "[render]") {
  ChartSpec spec = curve_spec();
  spec.annotations.push_back(ChartAnnotation{12.0, "boundary"});
  std::string svg = render_chart(spec);
  require_well_formed(svg);
  CHECK(count_occurrences(svg, "class=\"annotation-vline\"") == 1);

  SECTION("out-of-domain annotations are dropped") {
    spec.annotations.push_back(ChartAnnotation{999.0, "far away"});
    std::string svg2 = render_chart(spec);
    CHECK(count_occurrences(svg2, "class=\"annotation-vline\"") == 1);
  }
}

TEST_CASE("bar chart with zero std stays well formed", "[render]") {
  ChartSpec spec;
  spec.kind = ChartKind::bar;
  spec.series.push_back(
      ChartSeries{"only", std::vector<BarDatum>{{"r23", 42.0, 0.0}}});
  std::string svg = render_chart(spec);
  require_well_formed(svg);
}

TEST_CASE("every chart kind emits well-formed XML", "[render]") {
  oracle::ValueGen gen(23);
  std::vector<double> va = gen.values(300, 0, 100);
  std::vector<double> vb = gen.values(300, 20, 150);

  ChartSpec curve = curve_spec();
  curve.series.push_back(ChartSeries{"after", small_profile()});

  ChartSpec violin;
  violin.kind = ChartKind::violin;
  violin.series.push_back(ChartSeries{"a", ViolinData{kde(va), box_stats(va)}});
  violin.series.push_back(ChartSeries{"b", ViolinData{kde(vb), box_stats(vb)}});

  ChartSpec box;
  box.kind = ChartKind::box;
  box.series.push_back(ChartSeries{"a", box_stats(va)});
  box.series.push_back(ChartSeries{"b", box_stats(vb)});

  ChartSpec bar;
  bar.kind = ChartKind::bar;
  bar.series.push_back(ChartSeries{
      "a", std::vector<BarDatum>{{"r10", 5, 1}, {"r23", 9, 2}, {"r30", 4, 0.5}}});
  bar.series.push_back(ChartSeries{
      "b", std::vector<BarDatum>{{"r10", 6, 1}, {"r23", 11, 3}, {"r30", 2, 1}}});

  ChartSpec steps;
  steps.kind = ChartKind::ecdf;
  steps.series.push_back(ChartSeries{"a", ecdf(va)});
  steps.series.push_back(ChartSeries{"b", ecdf(vb)});

  for (const ChartSpec* spec : {&curve, &violin, &box, &bar, &steps}) {
    std::string svg = render_chart(*spec);
    require_well_formed(svg);
    check_geometry_within(svg, 540);
  }
}

TEST_CASE("curves break into segments at missing bins", "[render]") {
  Profile p = small_profile();
  p.bin_values[5] = std::nullopt;
  p.band_low[5] = std::nullopt;
  p.band_high[5] = std::nullopt;
  p.bin_counts[5] = 0;
  ChartSpec spec;
  spec.kind = ChartKind::curve;
  spec.series.push_back(ChartSeries{"gappy", p});
  std::string svg = render_chart(spec);
  require_well_formed(svg);
  CHECK(count_occurrences(svg, "<polyline") == 2);
}

TEST_CASE("season curves align on calendar days", "[render]") {
  auto day_profile = [](std::int64_t start_day, std::size_t days) {
    Profile p;
    p.kind = ProfileKind::season;
    p.season_start_day = start_day;
    for (std::size_t i = 0; i < days; ++i) {
      p.bin_values.push_back(10.0 + static_cast<double>(i));
      p.bin_counts.push_back(1);
      p.band_low.push_back(std::nullopt);
      p.band_high.push_back(std::nullopt);
    }
    return p;
  };
  std::int64_t day0 = days_from_civil(2020, 2, 20);
  ChartSpec spec;
  spec.kind = ChartKind::curve;
  spec.x_label = "date";
  spec.series.push_back(ChartSeries{"early", day_profile(day0, 10)});
  spec.series.push_back(ChartSeries{"late", day_profile(day0 + 7, 10)});
  spec.annotations.push_back(ChartAnnotation{7.0, "split"});
  std::string svg = render_chart(spec);
  require_well_formed(svg);
  CHECK(count_occurrences(svg, "class=\"annotation-vline\"") == 1);
  // date tick labels from the earliest series' start day
  CHECK(svg.find("2020-02-20") != std::string::npos);
}

TEST_CASE("ecdf charts stay compact for huge value sets", "[render]") {
  oracle::ValueGen gen(99);
  std::vector<double> v = gen.values(300000, 0, 1e6);
  ChartSpec spec;
  spec.kind = ChartKind::ecdf;
  spec.series.push_back(ChartSeries{"big", ecdf(v)});
  std::string svg = render_chart(spec);
  require_well_formed(svg);
  // pixel-resolution decimation: bounded by the plot area, not the data
  CHECK(svg.size() < 300000);
  // the curve still ends at p == 1 (the top of the padded axis)
  CHECK(svg.find("path") != std::string::npos);
}

TEST_CASE("labels with XML metacharacters are escaped", "[render]") {
  ChartSpec spec = curve_spec();
  spec.title = "a < b & \"c\" > d";
  spec.series[0].label = "<script>";
  std::string svg = render_chart(spec);
  require_well_formed(svg);
  CHECK(svg.find("<script>") == std::string::npos);
}

TEST_CASE("rendering is deterministic", "[render]") {
  ChartSpec spec = curve_spec();
  spec.annotations.push_back(ChartAnnotation{8.0, "split"});
  std::string first = render_chart(spec);
  std::string second = render_chart(spec);
  CHECK(first == second);
}

TEST_CASE("axis range covers the payload", "[render]") {
  ChartSpec spec = curve_spec();
  auto range = chart_value_range(spec);
  CHECK(range.lo <= 2 - 0.5);   // smallest band_low
  CHECK(range.hi >= 9 + 0.5);   // largest band_high
}

TEST_CASE("renderer rejects bad specs", "[render]") {
  ChartSpec empty;
  empty.kind = ChartKind::curve;
  CHECK_THROWS_MATCHES(render_chart(empty), Error, HasCode(Errc::empty_spec));

  ChartSpec wrong;
  wrong.kind = ChartKind::curve;
  wrong.series.push_back(ChartSeries{"x", ecdf(std::vector<double>{1.0, 2.0})});
  CHECK_THROWS_MATCHES(render_chart(wrong), Error,
                       HasCode(Errc::payload_mismatch));

  ChartSpec tiny = curve_spec();
  CHECK_THROWS_MATCHES(render_chart(tiny, ChartSize{100, 100}), Error,
                       HasCode(Errc::bad_config));
}

TEST_CASE("tables emit csv and markdown", "[render]") {
  TableDoc doc;
  doc.headers = {"rack", "mean", "note"};
  doc.col_decimals = {-1, 2, -1};
  doc.add_row({"r23", "12.50", "ok"});
  doc.add_row({"r30", "9.00", "has, comma"});

  SECTION("csv shape and quoting") {
    std::string csv = emit_table(doc, TableFormat::csv);
    CHECK(count_occurrences(csv, "\n") == 3);  // header + 2 rows
    CHECK(csv.find("\"has, comma\"") != std::string::npos);
  }

  SECTION("markdown and csv carry identical cell text") {
    std::string csv = emit_table(doc, TableFormat::csv);
    std::string md = emit_table(doc, TableFormat::markdown);
    for (const auto& row : doc.rows) {
      for (const auto& cell : row) {
        CHECK(md.find(cell) != std::string::npos);
      }
    }
    CHECK(md.find("| rack |") != std::string::npos);
    CHECK(count_occurrences(md, "\n") == 4);  // header + separator + 2 rows
  }

  SECTION("ragged rows are rejected") {
    CHECK_THROWS_MATCHES(doc.add_row({"only-one"}), Error,
                         HasCode(Errc::ragged_rows));
    TableDoc broken = doc;
    broken.rows.push_back({"a", "b"});
    CHECK_THROWS_MATCHES(emit_table(broken, TableFormat::csv), Error,
                         HasCode(Errc::ragged_rows));
  }
}

TEST_CASE("number formatting is stable", "[render]") {
  CHECK(TableDoc::format_number(1.23456, 3) == "1.235");
  CHECK(TableDoc::format_number(-0.0001, 3) == "0.000");
  CHECK(TableDoc::format_number(5, 0) == "5");
  CHECK(svg::sig3(0.39894) == "0.399");
  CHECK(svg::sig3(1234.0) == "1.23e+03");
}
