#pragma once

// Static SVG 1.1 rendering of a FiperView. Two panels share one row grid:
// left holds labels and |weight| bars colored by sign, right holds the box
// plot or stacked bar with the yellow predicate layer and the diamond marker.
// Output is a pure function of (view, geometry).

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include "fiper/error.hpp"
#include "fiper/view.hpp"

namespace fiper {

struct SvgGeometry {
  double left_width = 340;   // labels + importance bars
  double right_width = 420;  // distribution charts
  double row_height = 30;
  double header_height = 36;
  double gap = 24;
  std::size_t label_chars = 24;  // longer names are truncated on the left
};

namespace svg_detail {

/// Two-decimal fixed notation, never "-0.00".
inline std::string num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  std::string s = ec == std::errc() ? std::string(buf, ptr) : std::string("0.00");
  if (s == "-0.00") s = "0.00";
  return s;
}

inline std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default:
        // XML 1.0 forbids most C0 controls
        if (static_cast<unsigned char>(c) < 0x20 && c != '\t' && c != '\n' && c != '\r')
          out += "&#xFFFD;";
        else
          out += c;
    }
  }
  return out;
}

inline std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (char c : s)
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  return n;
}

/// Keeps the last `budget - 1` code points behind a leading ellipsis.
inline std::string truncate_left(std::string_view s, std::size_t budget) {
  const std::size_t len = utf8_length(s);
  if (len <= budget || budget == 0) return std::string(s);
  std::size_t skip = len - (budget - 1);
  std::size_t i = 0;
  for (; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) {
      if (skip == 0) break;
      --skip;
    }
  }
  return "…" + std::string(s.substr(i));
}

inline std::string value_text(const Value& v) {
  if (const double* d = std::get_if<double>(&v)) return format_number(*d);
  return std::get<std::string>(v);
}

inline std::string tooltip(const FiperRow& row) {
  std::string t = row.feature + ": weight " + format_number(row.weight);
  if (row.summary.is_numerical()) {
    const auto& f = row.summary.five();
    t += "; min " + format_number(f.min) + ", q1 " + format_number(f.q1) + ", median " + format_number(f.median) +
         ", q3 " + format_number(f.q3) + ", max " + format_number(f.max) + "; value " + value_text(row.observed);
  } else {
    const auto& entries = row.summary.categories().entries;
    const std::size_t idx = row.marker.segment_index.value_or(0);
    const std::size_t count = idx < entries.size() ? entries[idx].count : 0;
    t += "; value " + value_text(row.observed) + " (" + std::to_string(count) + " of " +
         std::to_string(row.summary.categories().total()) + ")";
  }
  return t;
}

inline std::string diamond(double cx, double cy, double r, const std::string& color) {
  return "<polygon class=\"marker\" points=\"" + num(cx) + "," + num(cy - r) + " " + num(cx + r) + "," + num(cy) + " " +
         num(cx) + "," + num(cy + r) + " " + num(cx - r) + "," + num(cy) + "\" fill=\"" + color +
         "\" stroke=\"#ffffff\" stroke-width=\"1\"/>";
}

}  // namespace svg_detail

inline std::string render_svg(const FiperView& view, const SvgGeometry& g = {}) {
  using namespace svg_detail;
  if (!(g.left_width > 0) || !(g.right_width > 0) || !(g.row_height > 0) || !(g.header_height >= 0) ||
      !(g.gap >= 0))
    throw Error("invalid-geometry", "panel widths and row height must be positive", "geometry");

  const Palette& pal = view.options.palette;
  const double width = g.left_width + g.gap + g.right_width;
  const double height = g.header_height + g.row_height * static_cast<double>(view.rows.size()) + 8;
  const double label_w = g.left_width * 0.5;
  const double bar_x = label_w + 6;
  const double bar_max = std::max(0.0, g.left_width - bar_x - 48);
  const double chart_pad = 8;
  const double chart_w = g.right_width - 2 * chart_pad;
  const double mid = g.row_height / 2;

  double max_abs = 0.0;
  for (const auto& r : view.rows) max_abs = std::max(max_abs, std::fabs(r.weight));

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(width) + "\" height=\"" +
       num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) +
       "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<title>" + escape("explanation " + view.bundle_id + " (prediction: " + view.prediction + ")") + "</title>\n";

  // Left panel
  s += "<g class=\"panel-importance\">\n";
  s += "<text class=\"panel-header\" x=\"0.00\" y=\"" + num(g.header_height - 12) +
       "\" font-weight=\"bold\">Feature importance</text>\n";
  for (std::size_t i = 0; i < view.rows.size(); ++i) {
    const auto& row = view.rows[i];
    const double y = g.header_height + g.row_height * static_cast<double>(i);
    const double len = max_abs > 0 ? bar_max * std::fabs(row.weight) / max_abs : 0.0;
    const std::string& color = row.weight < 0 ? pal.negative_color : pal.positive_color;
    s += "<g class=\"fi-row\" data-row=\"" + std::to_string(i) + "\" data-feature=\"" + escape(row.feature) +
         "\" transform=\"translate(0.00," + num(y) + ")\">\n";
    s += "<title>" + escape(tooltip(row)) + "</title>\n";
    s += "<text x=\"" + num(label_w) + "\" y=\"" + num(mid + 4) + "\" text-anchor=\"end\"" +
         (row.in_rule ? " font-weight=\"bold\"" : "") + ">" + escape(truncate_left(row.feature, g.label_chars)) +
         "</text>\n";
    s += "<rect class=\"fi-bar " + std::string(to_string(row.weight_sign)) + "\" x=\"" + num(bar_x) + "\" y=\"" +
         num(mid - 8) + "\" width=\"" + num(len) + "\" height=\"16.00\" fill=\"" + color + "\"/>\n";
    s += "<text x=\"" + num(bar_x + len + 4) + "\" y=\"" + num(mid + 4) + "\" fill=\"#444444\">" +
         escape(format_number(std::round(row.weight * 1000) / 1000)) + "</text>\n";
    s += "</g>\n";
  }
  s += "</g>\n";

  // Right panel
  s += "<g class=\"panel-rule\" transform=\"translate(" + num(g.left_width + g.gap) + ",0.00)\">\n";
  s += "<text class=\"panel-header\" x=\"0.00\" y=\"" + num(g.header_height - 12) +
       "\" font-weight=\"bold\">Rule predicates" + escape(" (prediction: " + view.prediction + ")") + "</text>\n";
  for (std::size_t i = 0; i < view.rows.size(); ++i) {
    const auto& row = view.rows[i];
    const double y = g.header_height + g.row_height * static_cast<double>(i);
    auto x_of = [&](double t) { return chart_pad + chart_w * t; };
    s += "<g class=\"chart-row " + std::string(row.summary.is_numerical() ? "boxplot" : "stacked") +
         "\" data-row=\"" + std::to_string(i) + "\" data-feature=\"" + escape(row.feature) +
         "\" transform=\"translate(0.00," + num(y) + ")\">\n";
    s += "<title>" + escape(tooltip(row)) + "</title>\n";

    if (row.summary.is_numerical()) {
      const auto& f = row.summary.five();
      auto px = [&](double v) { return x_of(axis_position(f, v)); };
      if (row.highlight) {
        const double x0 = x_of(row.highlight->start), x1 = x_of(row.highlight->end);
        s += "<rect class=\"highlight\" x=\"" + num(x0) + "\" y=\"" + num(mid - 11) + "\" width=\"" +
             num(std::max(x1 - x0, 2.0)) + "\" height=\"22.00\" fill=\"" + pal.highlight_color + "\"/>\n";
      }
      s += "<line class=\"whisker\" x1=\"" + num(px(f.min)) + "\" y1=\"" + num(mid) + "\" x2=\"" + num(px(f.max)) +
           "\" y2=\"" + num(mid) + "\" stroke=\"#555555\"/>\n";
      for (double v : {f.min, f.max})
        s += "<line class=\"whisker-cap\" x1=\"" + num(px(v)) + "\" y1=\"" + num(mid - 5) + "\" x2=\"" + num(px(v)) +
             "\" y2=\"" + num(mid + 5) + "\" stroke=\"#555555\"/>\n";
      s += "<rect class=\"box\" x=\"" + num(px(f.q1)) + "\" y=\"" + num(mid - 7) + "\" width=\"" +
           num(px(f.q3) - px(f.q1)) + "\" height=\"14.00\" fill=\"#d9d9d9\" fill-opacity=\"0.8\" stroke=\"#555555\"/>\n";
      s += "<line class=\"median\" x1=\"" + num(px(f.median)) + "\" y1=\"" + num(mid - 7) + "\" x2=\"" +
           num(px(f.median)) + "\" y2=\"" + num(mid + 7) + "\" stroke=\"#222222\" stroke-width=\"2\"/>\n";
    } else {
      const auto& entries = row.summary.categories().entries;
      const double total = static_cast<double>(row.summary.categories().total());
      double before = 0.0;
      for (std::size_t k = 0; k < entries.size(); ++k) {
        const double w = total > 0 ? static_cast<double>(entries[k].count) / total : 0.0;
        const bool lit = row.highlight && k < row.highlight->flags.size() && row.highlight->flags[k];
        const std::string fill = lit ? pal.highlight_color : (k % 2 == 0 ? "#bdbdbd" : "#e0e0e0");
        s += "<rect class=\"segment" + std::string(lit ? " highlight" : "") + "\" data-label=\"" +
             escape(entries[k].label) + "\" data-count=\"" + std::to_string(entries[k].count) + "\" x=\"" +
             num(x_of(before / (total > 0 ? total : 1))) + "\" y=\"" + num(mid - 8) + "\" width=\"" +
             num(chart_w * w) + "\" height=\"16.00\" fill=\"" + fill + "\" stroke=\"#ffffff\"/>\n";
        before += static_cast<double>(entries[k].count);
      }
    }
    s += diamond(x_of(row.marker.normalized), mid, 6, pal.marker_color) + "\n";
    s += "</g>\n";
  }
  s += "</g>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace fiper
