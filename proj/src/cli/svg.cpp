#include "lydia/cli/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace lydia::cli {

namespace {

constexpr double kPanelW = 480, kPanelH = 360;
constexpr double kLeft = 70, kRight = 20, kTop = 36, kBottom = 50;
constexpr std::array<const char*, 6> kColors{"#1f77b4", "#d62728", "#2ca02c",
                                             "#ff7f0e", "#9467bd", "#8c564b"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
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

// 1, 2 or 5 times a power of ten, giving about five intervals over `span`.
double nice_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

void nice_range(double& lo, double& hi) {
  const double step = nice_step(hi - lo);
  lo = std::floor(lo / step) * step;
  hi = std::ceil(hi / step) * step;
}

struct Axis {
  bool log = false;
  double lo = 0, hi = 1;

  double map(double v) const { return log ? std::log10(v) : v; }
  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
};

void render_panel(std::ostringstream& svg, const PlotPanel& panel, double x_off) {
  Axis ax{panel.log_x}, ay{panel.log_y};
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (const auto& s : panel.series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!ax.usable(s.x[i]) || !ay.usable(s.y[i])) continue;
      xlo = std::min(xlo, ax.map(s.x[i]));
      xhi = std::max(xhi, ax.map(s.x[i]));
      ylo = std::min(ylo, ay.map(s.y[i]));
      yhi = std::max(yhi, ay.map(s.y[i]));
    }
  if (!(xlo <= xhi) || !(ylo <= yhi)) return;
  if (xhi == xlo) xhi = xlo + 1;
  if (yhi == ylo) yhi = ylo + 1;
  if (ay.log) {
    ylo = std::floor(ylo);
    yhi = std::ceil(yhi);
  }
  if (ax.log) {
    xlo = std::floor(xlo);
    xhi = std::ceil(xhi);
  }
  if (!ax.log) nice_range(xlo, xhi);
  if (!ay.log) nice_range(ylo, yhi);
  ax.lo = xlo, ax.hi = xhi, ay.lo = ylo, ay.hi = yhi;

  const double pw = kPanelW - kLeft - kRight, ph = kPanelH - kTop - kBottom;
  auto px = [&](double v) { return x_off + kLeft + (ax.map(v) - ax.lo) / (ax.hi - ax.lo) * pw; };
  auto py = [&](double v) { return kTop + ph - (ay.map(v) - ay.lo) / (ay.hi - ay.lo) * ph; };

  svg << "<rect x=\"" << fmt(x_off + kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(pw)
      << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  svg << "<text x=\"" << fmt(x_off + kPanelW / 2) << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-size=\"14\">" << escape(panel.title) << "</text>\n";
  svg << "<text x=\"" << fmt(x_off + kLeft + pw / 2) << "\" y=\"" << fmt(kPanelH - 10)
      << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(panel.x_label) << "</text>\n";
  svg << "<text x=\"" << fmt(x_off + 14) << "\" y=\"" << fmt(kTop + ph / 2)
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 " << fmt(x_off + 14)
      << ' ' << fmt(kTop + ph / 2) << ")\">" << escape(panel.y_label) << "</text>\n";

  // Ticks: decades on log axes, round steps otherwise.
  auto ticks = [](const Axis& a) {
    std::vector<double> t;
    if (a.log) {
      const int step = std::max(1, static_cast<int>((a.hi - a.lo) / 8));
      for (int e = static_cast<int>(a.lo); e <= static_cast<int>(a.hi); e += step) t.push_back(e);
    } else {
      const double step = nice_step(a.hi - a.lo);
      for (double v = a.lo; v <= a.hi + 1e-9 * step; v += step) t.push_back(std::abs(v) < 1e-9 * step ? 0.0 : v);
    }
    return t;
  };
  auto label = [](const Axis& a, double v) {
    char buf[32];
    if (a.log)
      std::snprintf(buf, sizeof buf, "1e%d", static_cast<int>(v));
    else
      std::snprintf(buf, sizeof buf, "%.3g", v);
    return std::string(buf);
  };
  for (double tv : ticks(ax)) {
    const double x = x_off + kLeft + (tv - ax.lo) / (ax.hi - ax.lo) * pw;
    svg << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(kTop + ph + 16)
        << "\" text-anchor=\"middle\" font-size=\"10\">" << label(ax, tv) << "</text>\n";
  }
  for (double tv : ticks(ay)) {
    const double y = kTop + ph - (tv - ay.lo) / (ay.hi - ay.lo) * ph;
    svg << "<text x=\"" << fmt(x_off + kLeft - 4) << "\" y=\"" << fmt(y + 3)
        << "\" text-anchor=\"end\" font-size=\"10\">" << label(ay, tv) << "</text>\n";
  }

  for (std::size_t k = 0; k < panel.series.size(); ++k) {
    const auto& s = panel.series[k];
    const char* color = kColors[k % kColors.size()];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.3\" points=\"";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      if (ax.usable(s.x[i]) && ay.usable(s.y[i])) svg << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i])) << ' ';
    svg << "\"/>\n";
    const double ly = kTop + 14 + 14 * static_cast<double>(k);
    svg << "<line x1=\"" << fmt(x_off + kLeft + pw - 110) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\""
        << fmt(x_off + kLeft + pw - 90) << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << fmt(x_off + kLeft + pw - 86) << "\" y=\"" << fmt(ly)
        << "\" font-size=\"10\">" << escape(s.label) << "</text>\n";
  }
}

}  // namespace

std::string render_svg(const std::vector<PlotPanel>& panels) {
  std::ostringstream svg;
  const double width = kPanelW * static_cast<double>(std::max<std::size_t>(1, panels.size()));
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\""
      << fmt(kPanelH) << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i)
    render_panel(svg, panels[i], kPanelW * static_cast<double>(i));
  svg << "</svg>\n";
  return svg.str();
}

bool write_svg(const std::string& path, const std::vector<PlotPanel>& panels) {
  std::ofstream out(path);
  if (!out) return false;
  out << render_svg(panels);
  return static_cast<bool>(out);
}

}  // namespace lydia::cli
