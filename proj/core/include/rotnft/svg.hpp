#pragma once

#include <string>
#include <vector>

namespace rotnft {

// Dependency-free SVG emitter for line plots and cell heatmaps.
class SvgPlot {
 public:
  SvgPlot(int width = 720, int height = 480);

  void polyline(const std::vector<double>& x, const std::vector<double>& y,
                const std::string& color, double stroke_width = 1.2,
                const std::string& label = {});
  // Filled cell for heatmap slices; v in [0,1] maps to a blue-red ramp.
  void cell(double x0, double y0, double x1, double y1, double v);
  void hline(double y, const std::string& color);
  void title(const std::string& text);

  std::string render();
  void write_file(const std::string& path);

 private:
  struct Series {
    std::vector<double> x, y;
    std::string color;
    double width;
    std::string label;
  };
  struct Cell {
    double x0, y0, x1, y1, v;
  };
  int w_, h_;
  std::string title_;
  std::vector<Series> series_;
  std::vector<Cell> cells_;
  std::vector<std::pair<double, std::string>> hlines_;
};

}  // namespace rotnft
