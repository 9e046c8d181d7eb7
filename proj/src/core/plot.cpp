#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "experiment.hpp"

namespace longlab {

namespace {

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) {
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))
      out += c;
    else if (c >= 'A' && c <= 'Z')
      out += char(c - 'A' + 'a');
    else if (!out.empty() && out.back() != '-')
      out += '-';
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out.empty() ? "series" : out;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else
      out += c;
  }
  return out;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string coord(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct Axis {
  double lo = 0.0, hi = 1.0;  // in plot coordinates (log10 when logarithmic)
  bool logscale = false;

  double unit(double t) const { return (t - lo) / (hi - lo); }
  double label_value(double t) const { return logscale ? std::pow(10.0, t) : t; }
};

Axis make_axis(std::vector<double> ts, bool logscale) {
  Axis ax;
  ax.logscale = logscale;
  ax.lo = *std::min_element(ts.begin(), ts.end());
  ax.hi = *std::max_element(ts.begin(), ts.end());
  double span = ax.hi - ax.lo;
  double pad = span > 0.0 ? 0.05 * span : (logscale ? 0.5 : std::max(1.0, std::abs(ax.lo)));
  ax.lo -= pad;
  ax.hi += pad;
  return ax;
}

double fitted_slope(const std::vector<std::pair<double, double>>& pts) {
  double n = double(pts.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

bool render_series(const PlotSeries& s, const std::filesystem::path& file) {
  std::vector<std::pair<double, double>> pts;
  for (auto& [x, y] : s.points) {
    if (!std::isfinite(x) || !std::isfinite(y)) continue;
    if (s.loglog && !(x > 0.0 && y > 0.0)) continue;
    pts.emplace_back(s.loglog ? std::log10(x) : x, s.loglog ? std::log10(y) : y);
  }
  if (pts.size() < 2) return false;

  const double W = 640, H = 480, L = 70, R = 24, T = 40, B = 56;
  std::vector<double> xs, ys;
  for (auto& [x, y] : pts) {
    xs.push_back(x);
    ys.push_back(y);
  }
  Axis ax = make_axis(xs, s.loglog);
  Axis ay = make_axis(ys, s.loglog);
  auto px = [&](double t) { return L + ax.unit(t) * (W - L - R); };
  auto py = [&](double t) { return H - B - ay.unit(t) * (H - T - B); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
         "viewBox=\"0 0 640 480\">\n";
  svg += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  svg += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"15\">" + escape_xml(s.name) + "</text>\n";

  const int kTicks = 5;
  for (int k = 0; k < kTicks; ++k) {
    double fx = ax.lo + (ax.hi - ax.lo) * k / (kTicks - 1);
    double fy = ay.lo + (ay.hi - ay.lo) * k / (kTicks - 1);
    std::string gx = coord(px(fx)), gy = coord(py(fy));
    svg += "<line x1=\"" + gx + "\" y1=\"" + coord(T) + "\" x2=\"" + gx + "\" y2=\"" +
           coord(H - B) + "\" stroke=\"#dddddd\"/>\n";
    svg += "<line x1=\"" + coord(L) + "\" y1=\"" + gy + "\" x2=\"" + coord(W - R) + "\" y2=\"" +
           gy + "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + gx + "\" y=\"" + coord(H - B + 18) +
           "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"11\">" +
           fmt(ax.label_value(fx)) + "</text>\n";
    svg += "<text x=\"" + coord(L - 6) + "\" y=\"" + coord(py(fy) + 4) +
           "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">" +
           fmt(ay.label_value(fy)) + "</text>\n";
  }
  svg += "<rect x=\"" + coord(L) + "\" y=\"" + coord(T) + "\" width=\"" + coord(W - L - R) +
         "\" height=\"" + coord(H - T - B) + "\" fill=\"none\" stroke=\"black\"/>\n";

  svg += "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\" points=\"";
  for (auto& [x, y] : pts) svg += coord(px(x)) + "," + coord(py(y)) + " ";
  svg += "\"/>\n";
  for (auto& [x, y] : pts)
    svg += "<circle cx=\"" + coord(px(x)) + "\" cy=\"" + coord(py(y)) +
           "\" r=\"3\" fill=\"#1f6fb2\"/>\n";

  std::string xl = s.xlabel + (s.loglog ? " (log)" : "");
  std::string yl = s.ylabel + (s.loglog ? " (log)" : "");
  svg += "<text x=\"" + coord((L + W - R) / 2) + "\" y=\"" + coord(H - 12) +
         "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\">" +
         escape_xml(xl) + "</text>\n";
  svg += "<text x=\"18\" y=\"" + coord((T + H - B) / 2) +
         "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\" "
         "transform=\"rotate(-90 18 " + coord((T + H - B) / 2) + ")\">" +
         escape_xml(yl) + "</text>\n";

  if (s.annotate_slope) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "fitted slope %.3f", fitted_slope(pts));
    svg += "<text x=\"" + coord(W - R - 8) + "\" y=\"" + coord(T + 18) +
           "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"13\">" +
           std::string(buf) + "</text>\n";
  }
  svg += "</svg>\n";

  std::ofstream out(file, std::ios::binary);
  if (!out) fail(Err::IoError, "cannot write plot '" + file.string() + "'");
  out << svg;
  return true;
}

}  // namespace

int write_plot_files(const RunReport& r, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(Err::IoError, "cannot create output directory '" + out_dir + "'");
  int written = 0;
  for (const PlotSeries& s : r.series) {
    std::string name = sanitize(r.kind) + "-" + sanitize(s.name) + ".svg";
    if (render_series(s, std::filesystem::path(out_dir) / name)) ++written;
  }
  if (written == 0)
    std::fprintf(stderr, "warning: report '%s' has no plottable series, nothing drawn\n",
                 r.kind.c_str());
  return written;
}

}  // namespace longlab
