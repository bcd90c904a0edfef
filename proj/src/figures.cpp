#include "wic/figures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

namespace wic {

namespace {

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                 "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

// Blue (negative) - white (zero) - red (positive).
std::string diverging(double v, double scale) {
  const double t = scale > 0.0 ? std::clamp(v / scale, -1.0, 1.0) : 0.0;
  int r = 255;
  int g = 255;
  int b = 255;
  if (t > 0) {
    g = b = static_cast<int>(std::lround(255 * (1.0 - t)));
  } else {
    r = g = static_cast<int>(std::lround(255 * (1.0 + t)));
  }
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

std::string svg_open(double w, double h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(w) + "\" height=\"" + px(h) +
         "\" viewBox=\"0 0 " + px(w) + " " + px(h) + "\" font-family=\"sans-serif\">\n"
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string text(double x, double y, const std::string& s, int size = 12,
                 const char* anchor = "middle") {
  return "<text x=\"" + px(x) + "\" y=\"" + px(y) + "\" font-size=\"" + std::to_string(size) +
         "\" text-anchor=\"" + anchor + "\">" + escape(s) + "</text>\n";
}

std::string rect(double x, double y, double w, double h, const std::string& fill,
                 const std::string& extra = "") {
  return "<rect x=\"" + px(x) + "\" y=\"" + px(y) + "\" width=\"" + px(w) + "\" height=\"" +
         px(h) + "\" fill=\"" + fill + "\"" + extra + "/>\n";
}

std::string grid_panel(const GridSpec& spec, double x0, double y0, double cell,
                       const Matrix* values, double scale) {
  std::string out;
  for (int r = 0; r < spec.height(); ++r) {
    for (int c = 0; c < spec.width(); ++c) {
      const Cell cl{r, c};
      std::string fill = "#f4f4f4";
      if (spec.is_wall(cl)) fill = "#404040";
      else if (values) fill = diverging((*values)(r, c), scale);
      out += rect(x0 + c * cell, y0 + r * cell, cell, cell, fill,
                  " stroke=\"#cccccc\" stroke-width=\"0.5\"");
    }
  }
  const Cell s = spec.start();
  out += rect(x0 + s.col * cell + cell * 0.3, y0 + s.row * cell + cell * 0.3, cell * 0.4,
              cell * 0.4, "none", " stroke=\"black\" stroke-width=\"1.5\"");
  return out;
}

}  // namespace

std::string heatmap_csv(const std::vector<Matrix>& maps) {
  std::string out = "skill,row,col,value\n";
  char buf[96];
  for (std::size_t w = 0; w < maps.size(); ++w) {
    for (Eigen::Index r = 0; r < maps[w].rows(); ++r) {
      for (Eigen::Index c = 0; c < maps[w].cols(); ++c) {
        const double v = maps[w](r, c);
        if (std::isnan(v)) continue;
        std::snprintf(buf, sizeof(buf), "%zu,%ld,%ld,%.17g\n", w, static_cast<long>(r),
                      static_cast<long>(c), v);
        out += buf;
      }
    }
  }
  return out;
}

std::string endpoints_csv(const std::vector<EndpointRow>& rows) {
  std::string out = "skill,row,col,distance\n";
  for (const auto& r : rows)
    out += std::to_string(r.skill.index) + ',' + std::to_string(r.end.row) + ',' +
           std::to_string(r.end.col) + ',' + std::to_string(r.distance) + '\n';
  return out;
}

std::string heatmap_svg(const GridSpec& spec, const std::vector<Matrix>& maps,
                        const std::string& title) {
  const double cell = 14.0;
  const double pad = 20.0;
  const double panel_w = spec.width() * cell;
  const double panel_h = spec.height() * cell;
  double scale = 0.0;
  for (const auto& m : maps)
    for (Eigen::Index i = 0; i < m.size(); ++i)
      if (!std::isnan(m.data()[i])) scale = std::max(scale, std::abs(m.data()[i]));
  const double width = pad + maps.size() * (panel_w + pad);
  const double height = panel_h + 3 * pad + 20;
  std::string out = svg_open(width, height);
  out += text(width / 2, pad, title + "  (|max| = " + fmt(scale) + ")", 14);
  for (std::size_t w = 0; w < maps.size(); ++w) {
    const double x0 = pad + w * (panel_w + pad);
    const double y0 = 2 * pad;
    out += grid_panel(spec, x0, y0, cell, &maps[w], scale);
    out += text(x0 + panel_w / 2, y0 + panel_h + pad, "skill " + std::to_string(w));
  }
  out += "</svg>\n";
  return out;
}

std::string endpoints_svg(const GridSpec& spec, const std::vector<EndpointRow>& rows,
                          int skill_count, const std::string& title) {
  const double cell = 24.0;
  const double pad = 20.0;
  const double width = spec.width() * cell + 2 * pad + 90;
  const double height = spec.height() * cell + 3 * pad;
  std::string out = svg_open(width, height);
  out += text(width / 2, pad, title, 14);
  const double x0 = pad;
  const double y0 = 2 * pad;
  out += grid_panel(spec, x0, y0, cell, nullptr, 0.0);
  // Deterministic jitter from a fixed LCG so repeated endpoints stay visible.
  std::uint64_t state = 0x9e3779b97f4a7c15ULL;
  auto jitter = [&state] {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(state >> 11) * 0x1.0p-53 - 0.5;
  };
  for (const auto& r : rows) {
    const double cx = x0 + (r.end.col + 0.5 + 0.6 * jitter()) * cell;
    const double cy = y0 + (r.end.row + 0.5 + 0.6 * jitter()) * cell;
    out += "<circle cx=\"" + px(cx) + "\" cy=\"" + px(cy) + "\" r=\"3\" fill=\"" +
           kPalette[static_cast<std::size_t>(r.skill.index) % kPalette.size()] +
           "\" fill-opacity=\"0.7\"/>\n";
  }
  for (int w = 0; w < skill_count; ++w) {
    const double ly = y0 + 10 + w * 18;
    const double lx = x0 + spec.width() * cell + 15;
    out += "<circle cx=\"" + px(lx) + "\" cy=\"" + px(ly) + "\" r=\"5\" fill=\"" +
           kPalette[static_cast<std::size_t>(w) % kPalette.size()] + "\"/>\n";
    out += text(lx + 10, ly + 4, "skill " + std::to_string(w), 12, "start");
  }
  out += "</svg>\n";
  return out;
}

std::string curves_svg(const std::vector<Curve>& curves, const std::string& title,
                       const std::string& y_label) {
  const double width = 640;
  const double height = 400;
  const double left = 70;
  const double right = 150;
  const double top = 40;
  const double bottom = 50;
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      if (std::isnan(c.mean[i])) continue;
      const double sd = c.stddev.empty() ? 0.0 : c.stddev[i];
      xmin = std::min(xmin, c.x[i]);
      xmax = std::max(xmax, c.x[i]);
      ymin = std::min(ymin, c.mean[i] - sd);
      ymax = std::max(ymax, c.mean[i] + sd);
    }
  }
  if (!(xmin < xmax)) { xmin = 0; xmax = 1; }
  if (!(ymin < ymax)) { ymin -= 1; ymax += 1; }
  const double pw = width - left - right;
  const double ph = height - top - bottom;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return top + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

  std::string out = svg_open(width, height);
  out += text(width / 2 - right / 2, 22, title, 14);
  out += rect(left, top, pw, ph, "none", " stroke=\"black\"");
  for (int k = 0; k <= 4; ++k) {
    const double yv = ymin + (ymax - ymin) * k / 4.0;
    const double xv = xmin + (xmax - xmin) * k / 4.0;
    out += text(left - 6, sy(yv) + 4, fmt(yv), 10, "end");
    out += text(sx(xv), top + ph + 16, fmt(xv), 10);
  }
  out += text(left + pw / 2, height - 12, "update", 12);
  out += "<text x=\"16\" y=\"" + px(top + ph / 2) + "\" font-size=\"12\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 16 " + px(top + ph / 2) + ")\">" + escape(y_label) + "</text>\n";
  for (std::size_t ci = 0; ci < curves.size(); ++ci) {
    const auto& c = curves[ci];
    const char* colour = kPalette[ci % kPalette.size()];
    if (!c.stddev.empty()) {
      std::string band;
      for (std::size_t i = 0; i < c.x.size(); ++i)
        if (!std::isnan(c.mean[i])) band += px(sx(c.x[i])) + "," + px(sy(c.mean[i] + c.stddev[i])) + " ";
      for (std::size_t i = c.x.size(); i-- > 0;)
        if (!std::isnan(c.mean[i])) band += px(sx(c.x[i])) + "," + px(sy(c.mean[i] - c.stddev[i])) + " ";
      out += "<polygon points=\"" + band + "\" fill=\"" + colour + "\" fill-opacity=\"0.2\"/>\n";
    }
    std::string line;
    for (std::size_t i = 0; i < c.x.size(); ++i)
      if (!std::isnan(c.mean[i])) line += px(sx(c.x[i])) + "," + px(sy(c.mean[i])) + " ";
    out += "<polyline points=\"" + line + "\" fill=\"none\" stroke=\"" + colour +
           "\" stroke-width=\"1.5\"/>\n";
    out += rect(left + pw + 12, top + 8 + ci * 18, 12, 4, colour);
    out += text(left + pw + 30, top + 14 + ci * 18, c.label, 11, "start");
  }
  out += "</svg>\n";
  return out;
}

}  // namespace wic
