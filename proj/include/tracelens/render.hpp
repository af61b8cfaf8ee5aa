// Copyright 2026 the tracelens authors. All rights reserved.
// Use of this source code is governed by the Apache-2.0 license
// that can be found in the LICENSE file.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "tracelens/analysis.hpp"
#include "tracelens/table.hpp"

// Self-contained SVG 1.1 charts: profile curves, violins, boxes, bars with
// error bars, ECDF steps. Rendering is a pure function of (spec, size); the
// same spec always yields byte-identical output.

namespace tracelens {

enum class ChartKind { curve, violin, box, bar, ecdf };

struct BarDatum {
  std::string category;
  double value = 0;
  double err = 0;  // half-length of the error bar (one standard deviation)
};

// A violin glyph is a mirrored density curve with an inner q1/median/q3 box
// and a whisker line. Either part may be absent; a degenerate distribution
// renders as a tick mark at the median.
struct ViolinData {
  std::optional<DensityCurve> density;
  std::optional<BoxStats> box;
};

using ChartPayload =
    std::variant<Profile, ViolinData, BoxStats, std::vector<BarDatum>,
                 EcdfCurve>;

struct ChartSeries {
  std::string label;
  ChartPayload payload;
};

struct ChartAnnotation {
  // Vertical rule at a domain x position (curve: bin units; bar: category
  // units). Used for the period boundary in whole-season curves.
  double x = 0;
  std::string label;
};

struct ChartSpec {
  ChartKind kind = ChartKind::curve;
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<ChartSeries> series;
  std::vector<ChartAnnotation> annotations;
};

struct ChartSize {
  int width = 960;
  int height = 540;
};

namespace svg {

inline std::string esc(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string num(double v) {
  if (!std::isfinite(v)) v = 0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

// Tick label: up to six significant digits, shortest form.
inline std::string tick_label(double v) {
  if (!std::isfinite(v)) v = 0;
  if (v == 0) v = 0;  // normalize -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string sig3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Attr {
  std::string name;
  std::string value;
};

class Writer {
 public:
  void open(std::string_view tag, std::initializer_list<Attr> attrs = {}) {
    element(tag, attrs, false);
    stack_.push_back(std::string(tag));
  }
  void close() {
    out_ += "</" + stack_.back() + ">\n";
    stack_.pop_back();
  }
  void leaf(std::string_view tag, std::initializer_list<Attr> attrs) {
    element(tag, attrs, true);
  }
  void leaf(std::string_view tag, const std::vector<Attr>& attrs) {
    out_ += '<';
    out_ += tag;
    for (const Attr& a : attrs) {
      out_ += ' ' + a.name + "=\"" + esc(a.value) + '"';
    }
    out_ += "/>\n";
  }
  void text_node(double x, double y, std::string_view content,
                 std::string_view style_class, std::string_view anchor = "middle",
                 std::string_view transform = {}) {
    out_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" class=\"" +
            std::string(style_class) + "\" text-anchor=\"" +
            std::string(anchor) + "\"";
    if (!transform.empty()) {
      out_ += " transform=\"" + esc(transform) + "\"";
    }
    out_ += ">" + esc(content) + "</text>\n";
  }
  void raw(std::string_view s) { out_ += s; }
  std::string take() { return std::move(out_); }

 private:
  void element(std::string_view tag, std::initializer_list<Attr> attrs,
               bool self_close) {
    out_ += '<';
    out_ += tag;
    for (const Attr& a : attrs) {
      out_ += ' ' + a.name + "=\"" + esc(a.value) + '"';
    }
    out_ += self_close ? "/>\n" : ">\n";
  }

  std::string out_;
  std::vector<std::string> stack_;
};

}  // namespace svg

namespace detail {

inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                           "#9467bd", "#8c564b", "#e377c2"};
inline constexpr std::size_t kPaletteSize = 6;
inline constexpr std::size_t kMaxOutlierGlyphs = 200;

inline const char* series_color(std::size_t i) {
  return kPalette[i % kPaletteSize];
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool valid() const { return lo <= hi; }

  // Expand by 4% per side; degenerate ranges get a unit of breathing room.
  Range padded() const {
    Range r = *this;
    if (!r.valid()) {
      r.lo = 0;
      r.hi = 1;
      return r;
    }
    if (r.lo == r.hi) {
      double pad = std::abs(r.lo) * 0.05 + 1.0;
      r.lo -= pad;
      r.hi += pad;
      return r;
    }
    double pad = (r.hi - r.lo) * 0.04;
    r.lo -= pad;
    r.hi += pad;
    return r;
  }
};

struct LinScale {
  double d0 = 0, d1 = 1;  // domain
  double r0 = 0, r1 = 1;  // range (pixels)
  double operator()(double v) const {
    return r0 + (v - d0) / (d1 - d0) * (r1 - r0);
  }
};

inline std::vector<double> nice_ticks(double lo, double hi, int target = 5) {
  std::vector<double> ticks;
  if (!(hi > lo)) return ticks;
  double raw = (hi - lo) / target;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double norm = raw / mag;
  double step = mag * (norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0);
  double first = std::ceil(lo / step) * step;
  for (double t = first; t <= hi + step * 1e-9; t += step) {
    double v = t == 0 ? 0 : t;  // normalize -0
    ticks.push_back(v);
  }
  return ticks;
}

struct Frame {
  double x0, x1, y0, y1;  // plot rectangle, y0 = top
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

inline const Profile& as_profile(const ChartSeries& s) {
  const Profile* p = std::get_if<Profile>(&s.payload);
  if (p == nullptr) {
    throw Error(Errc::payload_mismatch,
                "curve series '" + s.label + "' does not carry a profile");
  }
  return *p;
}
inline const ViolinData& as_violin(const ChartSeries& s) {
  const ViolinData* p = std::get_if<ViolinData>(&s.payload);
  if (p == nullptr) {
    throw Error(Errc::payload_mismatch,
                "violin series '" + s.label + "' does not carry violin data");
  }
  if (!p->density.has_value() && !p->box.has_value()) {
    throw Error(Errc::empty_spec, "violin series '" + s.label + "' is empty");
  }
  return *p;
}
inline const BoxStats& as_box(const ChartSeries& s) {
  const BoxStats* p = std::get_if<BoxStats>(&s.payload);
  if (p == nullptr) {
    throw Error(Errc::payload_mismatch,
                "box series '" + s.label + "' does not carry box stats");
  }
  return *p;
}
inline const std::vector<BarDatum>& as_bars(const ChartSeries& s) {
  const std::vector<BarDatum>* p = std::get_if<std::vector<BarDatum>>(&s.payload);
  if (p == nullptr) {
    throw Error(Errc::payload_mismatch,
                "bar series '" + s.label + "' does not carry bar data");
  }
  return *p;
}
inline const EcdfCurve& as_ecdf(const ChartSeries& s) {
  const EcdfCurve* p = std::get_if<EcdfCurve>(&s.payload);
  if (p == nullptr) {
    throw Error(Errc::payload_mismatch,
                "ecdf series '" + s.label + "' does not carry an ecdf");
  }
  return *p;
}

}  // namespace detail

// Value-axis extent of every finite payload value; the rendered axis always
// covers this range.
inline detail::Range chart_value_range(const ChartSpec& spec) {
  detail::Range r;
  for (const ChartSeries& s : spec.series) {
    switch (spec.kind) {
      case ChartKind::curve: {
        const Profile& p = detail::as_profile(s);
        for (std::size_t i = 0; i < p.size(); ++i) {
          if (p.bin_values[i]) r.include(*p.bin_values[i]);
          if (p.band_low[i]) r.include(*p.band_low[i]);
          if (p.band_high[i]) r.include(*p.band_high[i]);
        }
        break;
      }
      case ChartKind::violin: {
        const ViolinData& v = detail::as_violin(s);
        if (v.density) {
          r.include(v.density->grid.front());
          r.include(v.density->grid.back());
        }
        if (v.box) {
          r.include(v.box->whisker_low);
          r.include(v.box->whisker_high);
          for (double o : v.box->outliers) r.include(o);
        }
        break;
      }
      case ChartKind::box: {
        const BoxStats& b = detail::as_box(s);
        r.include(b.whisker_low);
        r.include(b.whisker_high);
        for (double o : b.outliers) r.include(o);
        break;
      }
      case ChartKind::bar: {
        for (const BarDatum& d : detail::as_bars(s)) {
          r.include(0);
          r.include(d.value - d.err);
          r.include(d.value + d.err);
        }
        break;
      }
      case ChartKind::ecdf: {
        r.include(0);
        r.include(1);
        break;
      }
    }
  }
  return r;
}

namespace detail {

inline void draw_frame_and_y_axis(svg::Writer& w, const Frame& f,
                                  const LinScale& y, const ChartSpec& spec,
                                  int width, int height) {
  w.leaf("rect", {{"x", "0"},
                  {"y", "0"},
                  {"width", std::to_string(width)},
                  {"height", std::to_string(height)},
                  {"fill", "#ffffff"}});
  // horizontal grid + y tick labels
  for (double t : nice_ticks(y.d0, y.d1)) {
    double py = y(t);
    w.leaf("line", {{"x1", svg::num(f.x0)},
                    {"y1", svg::num(py)},
                    {"x2", svg::num(f.x1)},
                    {"y2", svg::num(py)},
                    {"stroke", "#e0e0e0"},
                    {"stroke-width", "1"}});
    w.text_node(f.x0 - 6, py + 3.5, svg::tick_label(t), "tick", "end");
  }
  w.leaf("rect", {{"x", svg::num(f.x0)},
                  {"y", svg::num(f.y0)},
                  {"width", svg::num(f.width())},
                  {"height", svg::num(f.height())},
                  {"fill", "none"},
                  {"stroke", "#444444"},
                  {"stroke-width", "1"}});
  if (!spec.title.empty()) {
    w.text_node(width / 2.0, 24, spec.title, "title");
  }
  if (!spec.x_label.empty()) {
    w.text_node(f.x0 + f.width() / 2.0, height - 10, spec.x_label, "label");
  }
  if (!spec.y_label.empty()) {
    double cx = 15, cy = f.y0 + f.height() / 2.0;
    w.text_node(cx, cy, spec.y_label, "label", "middle",
                "rotate(-90 " + svg::num(cx) + " " + svg::num(cy) + ")");
  }
}

inline void draw_legend(svg::Writer& w, const Frame& f,
                        const std::vector<ChartSeries>& series) {
  if (series.size() < 2) return;
  double lx = f.x1 - 150;
  double ly = f.y0 + 10;
  for (std::size_t i = 0; i < series.size(); ++i) {
    double row = ly + 16.0 * static_cast<double>(i);
    w.leaf("line", {{"x1", svg::num(lx)},
                    {"y1", svg::num(row)},
                    {"x2", svg::num(lx + 18)},
                    {"y2", svg::num(row)},
                    {"stroke", series_color(i)},
                    {"stroke-width", "2.5"}});
    w.text_node(lx + 24, row + 4, series[i].label, "legend", "start");
  }
}

inline void draw_vline(svg::Writer& w, const Frame& f, double px,
                       const std::string& label) {
  std::vector<svg::Attr> attrs = {
      {"class", "annotation-vline"}, {"x1", svg::num(px)},
      {"y1", svg::num(f.y0)},        {"x2", svg::num(px)},
      {"y2", svg::num(f.y1)},        {"stroke", "#555555"},
      {"stroke-width", "1.5"},       {"stroke-dasharray", "5,4"}};
  w.leaf("line", attrs);
  if (!label.empty()) {
    w.text_node(px + 4, f.y0 + 12, label, "annotation", "start");
  }
}

// Contiguous present-bin runs as polyline/band geometry.
inline void draw_profile_series(svg::Writer& w, const Profile& p,
                                double x_offset, const LinScale& x,
                                const LinScale& y, const char* color) {
  // p25-p75 band
  std::size_t i = 0;
  while (i < p.size()) {
    if (!p.band_low[i] || !p.band_high[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < p.size() && p.band_low[j + 1] && p.band_high[j + 1]) ++j;
    if (j > i) {
      std::string d;
      for (std::size_t k = i; k <= j; ++k) {
        d += (k == i ? "M" : "L") +
             svg::num(x(x_offset + static_cast<double>(k))) + " " +
             svg::num(y(*p.band_high[k]));
      }
      for (std::size_t k = j + 1; k-- > i;) {
        d += "L" + svg::num(x(x_offset + static_cast<double>(k))) + " " +
             svg::num(y(*p.band_low[k]));
      }
      d += "Z";
      w.leaf("path", {{"d", d},
                      {"fill", color},
                      {"fill-opacity", "0.15"},
                      {"stroke", "none"}});
    }
    i = j + 1;
  }
  // value line; isolated bins render as dots
  i = 0;
  while (i < p.size()) {
    if (!p.bin_values[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < p.size() && p.bin_values[j + 1]) ++j;
    if (j == i) {
      w.leaf("circle", {{"cx", svg::num(x(x_offset + static_cast<double>(i)))},
                        {"cy", svg::num(y(*p.bin_values[i]))},
                        {"r", "2.5"},
                        {"fill", color}});
    } else {
      std::string pts;
      for (std::size_t k = i; k <= j; ++k) {
        if (!pts.empty()) pts += ' ';
        pts += svg::num(x(x_offset + static_cast<double>(k))) + "," +
               svg::num(y(*p.bin_values[k]));
      }
      w.leaf("polyline", {{"points", pts},
                          {"fill", "none"},
                          {"stroke", color},
                          {"stroke-width", "1.8"}});
    }
    i = j + 1;
  }
}

}  // namespace detail

inline std::string render_chart(const ChartSpec& spec, ChartSize size = {}) {
  if (spec.series.empty()) {
    throw Error(Errc::empty_spec, "chart has no series");
  }
  if (size.width < 200 || size.height < 150) {
    throw Error(Errc::bad_config, "chart size below 200x150");
  }

  using detail::Frame;
  using detail::LinScale;
  const Frame f{64.0, static_cast<double>(size.width) - 20.0, 44.0,
                static_cast<double>(size.height) - 52.0};

  detail::Range vr = chart_value_range(spec).padded();
  LinScale y{vr.lo, vr.hi, f.y1, f.y0};

  svg::Writer w;
  w.open("svg", {{"xmlns", "http://www.w3.org/2000/svg"},
                 {"width", std::to_string(size.width)},
                 {"height", std::to_string(size.height)},
                 {"viewBox", "0 0 " + std::to_string(size.width) + " " +
                                 std::to_string(size.height)}});
  w.raw("<style>\n"
        "text { font-family: sans-serif; fill: #222222; }\n"
        ".title { font-size: 15px; font-weight: bold; }\n"
        ".label { font-size: 12px; }\n"
        ".tick { font-size: 10px; }\n"
        ".legend { font-size: 11px; }\n"
        ".annotation { font-size: 10px; fill: #444444; }\n"
        ".category { font-size: 11px; }\n"
        "</style>\n");
  detail::draw_frame_and_y_axis(w, f, y, spec, size.width, size.height);

  switch (spec.kind) {
    case ChartKind::curve: {
      // Series align on bin index; season profiles align on calendar day.
      std::vector<const Profile*> profiles;
      std::int64_t day0 = std::numeric_limits<std::int64_t>::max();
      for (const ChartSeries& s : spec.series) {
        const Profile& p = detail::as_profile(s);
        if (p.kind != detail::as_profile(spec.series.front()).kind) {
          throw Error(Errc::payload_mismatch, "curve mixes profile kinds");
        }
        profiles.push_back(&p);
        if (p.kind == ProfileKind::season) {
          day0 = std::min(day0, p.season_start_day);
        }
      }
      const ProfileKind kind = profiles.front()->kind;
      double x_max = 1;
      for (const Profile* p : profiles) {
        double off = kind == ProfileKind::season
                         ? static_cast<double>(p->season_start_day - day0)
                         : 0.0;
        x_max = std::max(x_max, off + static_cast<double>(p->size() - 1));
      }
      LinScale x{0, x_max, f.x0, f.x1};

      // x ticks per kind
      if (kind == ProfileKind::hourly) {
        for (int h = 0; h <= 21; h += 3) {
          double px = x(h);
          w.text_node(px, f.y1 + 16, std::to_string(h) + ":00", "tick");
        }
      } else if (kind == ProfileKind::weekly) {
        for (int d = 0; d < 7; ++d) {
          double px = x(d * 24 + 12);
          w.text_node(px, f.y1 + 16, weekday_abbrev(d), "tick");
        }
      } else {
        int nticks = 6;
        std::int64_t prev = -1;
        for (int t = 0; t <= nticks; ++t) {
          std::int64_t idx = static_cast<std::int64_t>(
              std::llround(x_max * static_cast<double>(t) / nticks));
          if (idx == prev) continue;
          prev = idx;
          CivilDate date = civil_from_days(day0 + idx);
          w.text_node(x(static_cast<double>(idx)), f.y1 + 16,
                      format_date(date), "tick");
        }
      }

      for (std::size_t i = 0; i < profiles.size(); ++i) {
        double off = kind == ProfileKind::season
                         ? static_cast<double>(profiles[i]->season_start_day -
                                               day0)
                         : 0.0;
        detail::draw_profile_series(w, *profiles[i], off, x, y,
                                    detail::series_color(i));
      }
      for (const ChartAnnotation& a : spec.annotations) {
        if (a.x >= 0 && a.x <= x_max) detail::draw_vline(w, f, x(a.x), a.label);
      }
      detail::draw_legend(w, f, spec.series);
      break;
    }

    case ChartKind::violin: {
      const double slot = f.width() / static_cast<double>(spec.series.size());
      double global_max_density = 0;
      for (const ChartSeries& s : spec.series) {
        const ViolinData& v = detail::as_violin(s);
        if (v.density) {
          global_max_density = std::max(global_max_density, v.density->max_density);
        }
      }
      for (std::size_t i = 0; i < spec.series.size(); ++i) {
        const ViolinData& v = detail::as_violin(spec.series[i]);
        const double cx = f.x0 + slot * (static_cast<double>(i) + 0.5);
        const char* color = detail::series_color(i);
        if (v.density) {
          const DensityCurve& dc = *v.density;
          const double wmax = slot * 0.35;
          const double dscale =
              global_max_density > 0 ? wmax / global_max_density : 0;
          std::string d;
          for (std::size_t k = 0; k < dc.grid.size(); ++k) {
            d += (k == 0 ? "M" : "L") +
                 svg::num(cx + dc.density[k] * dscale) + " " +
                 svg::num(y(dc.grid[k]));
          }
          for (std::size_t k = dc.grid.size(); k-- > 0;) {
            d += "L" + svg::num(cx - dc.density[k] * dscale) + " " +
                 svg::num(y(dc.grid[k]));
          }
          d += "Z";
          w.leaf("path", {{"d", d},
                          {"fill", color},
                          {"fill-opacity", "0.45"},
                          {"stroke", color},
                          {"stroke-width", "1"}});
          // annotate the peak density value next to the widest point
          std::size_t peak = 0;
          for (std::size_t k = 1; k < dc.density.size(); ++k) {
            if (dc.density[k] > dc.density[peak]) peak = k;
          }
          w.text_node(cx + wmax + 6, y(dc.grid[peak]) + 3,
                      svg::sig3(dc.max_density), "annotation", "start");
        }
        if (v.box) {
          const BoxStats& b = *v.box;
          w.leaf("line", {{"x1", svg::num(cx)},
                          {"y1", svg::num(y(b.whisker_low))},
                          {"x2", svg::num(cx)},
                          {"y2", svg::num(y(b.whisker_high))},
                          {"stroke", "#222222"},
                          {"stroke-width", "1"}});
          double bh = y(b.q1) - y(b.q3);
          w.leaf("rect", {{"x", svg::num(cx - 5)},
                          {"y", svg::num(y(b.q3))},
                          {"width", "10"},
                          {"height", svg::num(bh)},
                          {"fill", "#222222"}});
          w.leaf("circle", {{"cx", svg::num(cx)},
                            {"cy", svg::num(y(b.median))},
                            {"r", "3"},
                            {"fill", "#ffffff"},
                            {"stroke", "#222222"},
                            {"stroke-width", "0.8"}});
          if (!v.density) {
            // degenerate distribution: a plain tick at the median
            w.leaf("line", {{"x1", svg::num(cx - 14)},
                            {"y1", svg::num(y(b.median))},
                            {"x2", svg::num(cx + 14)},
                            {"y2", svg::num(y(b.median))},
                            {"stroke", color},
                            {"stroke-width", "2"}});
          }
        }
        w.text_node(cx, f.y1 + 16, spec.series[i].label, "category");
      }
      break;
    }

    case ChartKind::box: {
      const double slot = f.width() / static_cast<double>(spec.series.size());
      for (std::size_t i = 0; i < spec.series.size(); ++i) {
        const BoxStats& b = detail::as_box(spec.series[i]);
        const double cx = f.x0 + slot * (static_cast<double>(i) + 0.5);
        const double half = slot * 0.22;
        const char* color = detail::series_color(i);
        w.leaf("line", {{"x1", svg::num(cx)},
                        {"y1", svg::num(y(b.whisker_low))},
                        {"x2", svg::num(cx)},
                        {"y2", svg::num(y(b.whisker_high))},
                        {"stroke", "#333333"},
                        {"stroke-width", "1"}});
        for (double wy : {b.whisker_low, b.whisker_high}) {
          w.leaf("line", {{"x1", svg::num(cx - half * 0.5)},
                          {"y1", svg::num(y(wy))},
                          {"x2", svg::num(cx + half * 0.5)},
                          {"y2", svg::num(y(wy))},
                          {"stroke", "#333333"},
                          {"stroke-width", "1"}});
        }
        w.leaf("rect", {{"x", svg::num(cx - half)},
                        {"y", svg::num(y(b.q3))},
                        {"width", svg::num(half * 2)},
                        {"height", svg::num(y(b.q1) - y(b.q3))},
                        {"fill", color},
                        {"fill-opacity", "0.5"},
                        {"stroke", color},
                        {"stroke-width", "1.2"}});
        w.leaf("line", {{"x1", svg::num(cx - half)},
                        {"y1", svg::num(y(b.median))},
                        {"x2", svg::num(cx + half)},
                        {"y2", svg::num(y(b.median))},
                        {"stroke", "#111111"},
                        {"stroke-width", "1.6"}});
        // outliers, strided down to a bounded number of glyphs
        const auto& outs = b.outliers;
        std::size_t stride =
            outs.size() <= detail::kMaxOutlierGlyphs
                ? 1
                : (outs.size() + detail::kMaxOutlierGlyphs - 1) /
                      detail::kMaxOutlierGlyphs;
        for (std::size_t k = 0; k < outs.size(); k += stride) {
          w.leaf("circle", {{"cx", svg::num(cx)},
                            {"cy", svg::num(y(outs[k]))},
                            {"r", "2"},
                            {"fill", "none"},
                            {"stroke", color},
                            {"stroke-width", "0.8"}});
        }
        if (stride > 1 && !outs.empty()) {
          w.leaf("circle", {{"cx", svg::num(cx)},
                            {"cy", svg::num(y(outs.back()))},
                            {"r", "2"},
                            {"fill", "none"},
                            {"stroke", color},
                            {"stroke-width", "0.8"}});
        }
        w.text_node(cx, f.y1 + 16, spec.series[i].label, "category");
      }
      break;
    }

    case ChartKind::bar: {
      // category order: first appearance across series
      std::vector<std::string> cats;
      for (const ChartSeries& s : spec.series) {
        for (const BarDatum& d : detail::as_bars(s)) {
          if (std::find(cats.begin(), cats.end(), d.category) == cats.end()) {
            cats.push_back(d.category);
          }
        }
      }
      if (cats.empty()) throw Error(Errc::empty_spec, "bar chart has no bars");
      const double slot = f.width() / static_cast<double>(cats.size());
      const double group_w = slot * 0.8;
      const double bar_w = group_w / static_cast<double>(spec.series.size());
      const double base = y(std::max(0.0, vr.lo));

      for (std::size_t si = 0; si < spec.series.size(); ++si) {
        const char* color = detail::series_color(si);
        for (const BarDatum& d : detail::as_bars(spec.series[si])) {
          std::size_t ci = static_cast<std::size_t>(
              std::find(cats.begin(), cats.end(), d.category) - cats.begin());
          double gx = f.x0 + slot * static_cast<double>(ci) + slot * 0.1 +
                      bar_w * static_cast<double>(si);
          double top = y(d.value);
          double rect_y = std::min(top, base);
          double rect_h = std::abs(base - top);
          w.leaf("rect", {{"x", svg::num(gx)},
                          {"y", svg::num(rect_y)},
                          {"width", svg::num(bar_w)},
                          {"height", svg::num(rect_h)},
                          {"fill", color},
                          {"fill-opacity", "0.8"}});
          double ecx = gx + bar_w / 2;
          w.leaf("line", {{"x1", svg::num(ecx)},
                          {"y1", svg::num(y(d.value - d.err))},
                          {"x2", svg::num(ecx)},
                          {"y2", svg::num(y(d.value + d.err))},
                          {"stroke", "#222222"},
                          {"stroke-width", "1"}});
          for (double ey : {d.value - d.err, d.value + d.err}) {
            w.leaf("line", {{"x1", svg::num(ecx - 3)},
                            {"y1", svg::num(y(ey))},
                            {"x2", svg::num(ecx + 3)},
                            {"y2", svg::num(y(ey))},
                            {"stroke", "#222222"},
                            {"stroke-width", "1"}});
          }
        }
      }
      const bool rotate = cats.size() > 12;
      for (std::size_t ci = 0; ci < cats.size(); ++ci) {
        double px = f.x0 + slot * (static_cast<double>(ci) + 0.5);
        if (rotate) {
          w.text_node(px, f.y1 + 14, cats[ci], "category", "end",
                      "rotate(-45 " + svg::num(px) + " " +
                          svg::num(f.y1 + 14) + ")");
        } else {
          w.text_node(px, f.y1 + 16, cats[ci], "category");
        }
      }
      for (const ChartAnnotation& a : spec.annotations) {
        double px = f.x0 + slot * a.x;
        if (a.x >= 0 && a.x <= static_cast<double>(cats.size())) {
          detail::draw_vline(w, f, px, a.label);
        }
      }
      detail::draw_legend(w, f, spec.series);
      break;
    }

    case ChartKind::ecdf: {
      detail::Range xr;
      for (const ChartSeries& s : spec.series) {
        const EcdfCurve& c = detail::as_ecdf(s);
        xr.include(c.x.front());
        xr.include(c.x.back());
      }
      xr = xr.padded();
      LinScale x{xr.lo, xr.hi, f.x0, f.x1};
      for (double t : detail::nice_ticks(xr.lo, xr.hi)) {
        w.text_node(x(t), f.y1 + 16, svg::tick_label(t), "tick");
      }
      for (std::size_t i = 0; i < spec.series.size(); ++i) {
        const EcdfCurve& c = detail::as_ecdf(spec.series[i]);
        // decimate to pixel resolution: a step is only drawn once the pen
        // moves at least half a pixel, so giant value sets stay compact
        std::string d = "M" + svg::num(x(c.x[0])) + " " + svg::num(y(0));
        d += "L" + svg::num(x(c.x[0])) + " " + svg::num(y(c.p[0]));
        double pen_x = x(c.x[0]);
        double pen_y = y(c.p[0]);
        double held_p = c.p[0];
        for (std::size_t k = 1; k < c.x.size(); ++k) {
          double px = x(c.x[k]);
          double py = y(c.p[k]);
          if (k + 1 < c.x.size() && std::abs(px - pen_x) < 0.5 &&
              std::abs(py - pen_y) < 0.5) {
            held_p = c.p[k];
            continue;
          }
          d += "L" + svg::num(px) + " " + svg::num(y(held_p));
          d += "L" + svg::num(px) + " " + svg::num(py);
          pen_x = px;
          pen_y = py;
          held_p = c.p[k];
        }
        w.leaf("path", {{"d", d},
                        {"fill", "none"},
                        {"stroke", detail::series_color(i)},
                        {"stroke-width", "1.8"}});
      }
      detail::draw_legend(w, f, spec.series);
      break;
    }
  }

  w.close();  // svg
  return w.take();
}

}  // namespace tracelens
