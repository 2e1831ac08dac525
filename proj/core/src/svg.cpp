#include "rotnft/svg.hpp"

#include "rotnft/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rotnft {

SvgPlot::SvgPlot(int width, int height) : w_(width), h_(height) {}

void SvgPlot::polyline(const std::vector<double>& x, const std::vector<double>& y,
                       const std::string& color, double stroke_width,
                       const std::string& label) {
  if (x.size() != y.size()) throw DomainError("svg: series size mismatch");
  series_.push_back({x, y, color, stroke_width, label});
}

void SvgPlot::cell(double x0, double y0, double x1, double y1, double v) {
  cells_.push_back({x0, y0, x1, y1, std::clamp(v, 0.0, 1.0)});
}

void SvgPlot::hline(double y, const std::string& color) { hlines_.push_back({y, color}); }

void SvgPlot::title(const std::string& text) { title_ = text; }

std::string SvgPlot::render() {
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  auto account = [&](double x, double y) {
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
  };
  for (const auto& s : series_)
    for (size_t i = 0; i < s.x.size(); ++i) account(s.x[i], s.y[i]);
  for (const auto& c : cells_) {
    account(c.x0, c.y0);
    account(c.x1, c.y1);
  }
  for (const auto& [y, color] : hlines_) account(xmin, y);
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;

  const double margin = 40.0;
  auto px = [&](double x) { return margin + (x - xmin) / (xmax - xmin) * (w_ - 2 * margin); };
  auto py = [&](double y) { return h_ - margin - (y - ymin) / (ymax - ymin) * (h_ - 2 * margin); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\""
      << h_ << "\" viewBox=\"0 0 " << w_ << " " << h_ << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (const auto& c : cells_) {
    const int r = static_cast<int>(255 * c.v);
    const int b = 255 - r;
    char color[16];
    std::snprintf(color, sizeof(color), "#%02x40%02x", r, b);
    out << "<rect x=\"" << px(c.x0) << "\" y=\"" << py(c.y1) << "\" width=\""
        << px(c.x1) - px(c.x0) << "\" height=\"" << py(c.y0) - py(c.y1)
        << "\" fill=\"" << color << "\"/>\n";
  }
  out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\""
      << w_ - 2 * margin << "\" height=\"" << h_ - 2 * margin
      << "\" fill=\"none\" stroke=\"#888\"/>\n";

  for (const auto& [y, color] : hlines_) {
    out << "<line x1=\"" << px(xmin) << "\" y1=\"" << py(y) << "\" x2=\"" << px(xmax)
        << "\" y2=\"" << py(y) << "\" stroke=\"" << color
        << "\" stroke-dasharray=\"4 3\"/>\n";
  }

  for (const auto& s : series_) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\""
        << s.width << "\" points=\"";
    for (size_t i = 0; i < s.x.size(); ++i) {
      out << px(s.x[i]) << "," << py(s.y[i]) << " ";
    }
    out << "\"/>\n";
  }

  double ly = margin + 14;
  for (const auto& s : series_) {
    if (s.label.empty()) continue;
    out << "<text x=\"" << margin + 8 << "\" y=\"" << ly << "\" fill=\"" << s.color
        << "\" font-size=\"12\" font-family=\"monospace\">" << s.label << "</text>\n";
    ly += 14;
  }
  if (!title_.empty()) {
    out << "<text x=\"" << w_ / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\""
        << " font-family=\"monospace\">" << title_ << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void SvgPlot::write_file(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("svg: cannot open " + path);
  out << render();
}

}  // namespace rotnft
