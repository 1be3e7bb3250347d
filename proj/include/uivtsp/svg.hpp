#pragma once

#include <algorithm>
#include <charconv>
#include <string>
#include <utility>
#include <vector>

namespace uivtsp {

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

namespace detail {

inline std::string svg_num(double v, int precision = 2) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
  if (ec != std::errc{}) return "0";
  std::string s(buf, end);
  // trim trailing zeros to keep the files compact but still deterministic
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  return s;
}

inline std::string svg_label(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 4);
  if (ec != std::errc{}) return "0";
  return std::string(buf, end);
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace detail

// Plain hand-assembled SVG line chart. No external tooling, no timestamps,
// no randomness: the same data always yields byte-identical output.
inline std::string render_line_chart(const std::string& title, const std::string& x_label,
                                     const std::string& y_label,
                                     const std::vector<Series>& series) {
  using detail::svg_num;
  using detail::xml_escape;
  static constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                             "#ff7f0e", "#9467bd", "#8c564b"};
  constexpr double kW = 720, kH = 480, kL = 70, kR = 170, kT = 42, kB = 56;
  const double plot_w = kW - kL - kR, plot_h = kH - kT - kB;

  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const Series& s : series)
    for (auto [x, y] : s.points) {
      if (first) {
        xmin = xmax = x;
        ymin = ymax = y;
        first = false;
      } else {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double ypad = (ymax - ymin) * 0.05;
  ymin -= ypad;
  ymax += ypad;

  auto sx = [&](double x) { return kL + (x - xmin) / (xmax - xmin) * plot_w; };
  auto sy = [&](double y) { return kT + plot_h - (y - ymin) / (ymax - ymin) * plot_h; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + svg_num(kW, 0) + "\" height=\"" +
         svg_num(kH, 0) + "\" viewBox=\"0 0 " + svg_num(kW, 0) + " " + svg_num(kH, 0) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + svg_num(kL + plot_w / 2) +
         "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
         xml_escape(title) + "</text>\n";

  for (int i = 0; i <= 4; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 4.0;
    const double fy = ymin + (ymax - ymin) * i / 4.0;
    const double px = sx(fx), py = sy(fy);
    out += "<line x1=\"" + svg_num(px) + "\" y1=\"" + svg_num(kT) + "\" x2=\"" + svg_num(px) +
           "\" y2=\"" + svg_num(kT + plot_h) + "\" stroke=\"#dddddd\"/>\n";
    out += "<line x1=\"" + svg_num(kL) + "\" y1=\"" + svg_num(py) + "\" x2=\"" +
           svg_num(kL + plot_w) + "\" y2=\"" + svg_num(py) + "\" stroke=\"#dddddd\"/>\n";
    out += "<text x=\"" + svg_num(px) + "\" y=\"" + svg_num(kT + plot_h + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           detail::svg_label(fx) + "</text>\n";
    out += "<text x=\"" + svg_num(kL - 8) + "\" y=\"" + svg_num(py + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           detail::svg_label(fy) + "</text>\n";
  }
  out += "<rect x=\"" + svg_num(kL) + "\" y=\"" + svg_num(kT) + "\" width=\"" + svg_num(plot_w) +
         "\" height=\"" + svg_num(plot_h) + "\" fill=\"none\" stroke=\"#333333\"/>\n";
  out += "<text x=\"" + svg_num(kL + plot_w / 2) + "\" y=\"" + svg_num(kH - 14) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
         xml_escape(x_label) + "</text>\n";
  out += "<text x=\"20\" y=\"" + svg_num(kT + plot_h / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 20 " +
         svg_num(kT + plot_h / 2) + ")\">" + xml_escape(y_label) + "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const char* color = kPalette[si % (sizeof kPalette / sizeof kPalette[0])];
    const Series& s = series[si];
    if (!s.points.empty()) {
      std::string pts;
      for (auto [x, y] : s.points) {
        if (!pts.empty()) pts += ' ';
        pts += svg_num(sx(x)) + "," + svg_num(sy(y));
      }
      out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
             "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
      for (auto [x, y] : s.points)
        out += "<circle cx=\"" + svg_num(sx(x)) + "\" cy=\"" + svg_num(sy(y)) +
               "\" r=\"3\" fill=\"" + std::string(color) + "\"/>\n";
    }
    const double ly = kT + 14 + 18 * static_cast<double>(si);
    out += "<line x1=\"" + svg_num(kW - kR + 12) + "\" y1=\"" + svg_num(ly) + "\" x2=\"" +
           svg_num(kW - kR + 34) + "\" y2=\"" + svg_num(ly) + "\" stroke=\"" +
           std::string(color) + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + svg_num(kW - kR + 40) + "\" y=\"" + svg_num(ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + xml_escape(s.name) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace uivtsp
