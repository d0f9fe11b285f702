#include "qqcm/plot.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "qqcm/errors.hpp"
#include "qqcm/experiments.hpp"

namespace qqcm {

namespace {

struct Layout {
  std::string x_column;
  std::vector<std::string> y_columns;
  std::string x_label;
  std::string y_label;
};

Layout layout_for(PlotKind kind) {
  switch (kind) {
    case PlotKind::Sweep:
      return {"param", {"mean_C"}, "sweep parameter", "E(C)"};
    case PlotKind::Trajectory:
      return {"n", {"C"}, "collision n", "C"};
    case PlotKind::Lindley:
      return {"x", {"F_numeric", "F_empirical"}, "x", "CDF"};
    case PlotKind::Cdf:
      return {"x", {"F"}, "x", "F(x)"};
    case PlotKind::Queue:
      return {"n", {"Wq"}, "ancilla n", "Wq"};
    case PlotKind::Auto:
      break;
  }
  throw ArgumentError("plot kind must be resolved before layout");
}

// Fixed, locale-independent short formatting for tick labels and coordinates.
std::string fmt(double v, int precision) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general,
                                 precision);
  return std::string(buf.data(), res.ptr);
}

std::string coord(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), std::round(v * 100.0) / 100.0,
                                 std::chars_format::fixed, 2);
  return std::string(buf.data(), res.ptr);
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 60.0;
constexpr std::size_t kMaxPoints = 4000;
constexpr std::array<const char*, 4> kColors = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

}  // namespace

PlotKind plot_kind_from_string(const std::string& s) {
  if (s == "auto") return PlotKind::Auto;
  if (s == "sweep") return PlotKind::Sweep;
  if (s == "trajectory") return PlotKind::Trajectory;
  if (s == "lindley") return PlotKind::Lindley;
  if (s == "cdf") return PlotKind::Cdf;
  if (s == "queue") return PlotKind::Queue;
  throw ArgumentError("unknown plot kind '" + s + "'");
}

PlotKind detect_plot_kind(const CsvTable& table) {
  const auto has = [&](const char* name) { return table.column(name) >= 0; };
  if (has("mean_C")) return PlotKind::Sweep;
  if (has("F_numeric")) return PlotKind::Lindley;
  if (has("C") && has("t_depart")) return PlotKind::Trajectory;
  if (has("Wq")) return PlotKind::Queue;
  if (has("x") && has("F")) return PlotKind::Cdf;
  throw ArgumentError("cannot tell the plot kind from the CSV header");
}

std::string render_svg(const CsvTable& table, PlotKind kind) {
  if (table.rows.empty()) throw ArgumentError("CSV has no data rows");
  if (kind == PlotKind::Auto) kind = detect_plot_kind(table);
  const Layout layout = layout_for(kind);

  const int xc = table.column(layout.x_column);
  if (xc < 0) throw ArgumentError("CSV lacks column '" + layout.x_column + "'");
  std::vector<int> ycs;
  for (const auto& name : layout.y_columns) {
    const int c = table.column(name);
    if (c < 0) throw ArgumentError("CSV lacks column '" + name + "'");
    ycs.push_back(c);
  }

  const std::size_t n = table.rows.size();
  const std::size_t stride = (n + kMaxPoints - 1) / kMaxPoints;
  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (const auto& row : table.rows) {
    const double x = row[static_cast<std::size_t>(xc)];
    if (!std::isfinite(x)) throw ArgumentError("CSV contains a non-finite value");
    x_lo = std::min(x_lo, x);
    x_hi = std::max(x_hi, x);
    for (int c : ycs) {
      const double y = row[static_cast<std::size_t>(c)];
      if (!std::isfinite(y)) throw ArgumentError("CSV contains a non-finite value");
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  }
  if (x_hi == x_lo) { x_lo -= 0.5; x_hi += 0.5; }
  if (y_hi == y_lo) { y_lo -= 0.5; y_hi += 0.5; }
  const double pad = 0.05 * (y_hi - y_lo);
  y_lo -= pad;
  y_hi += pad;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * pw; };
  const auto py = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * ph; };

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << coord(kWidth) << "\" height=\""
    << coord(kHeight) << "\" viewBox=\"0 0 " << coord(kWidth) << ' ' << coord(kHeight) << "\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << coord(kWidth) << "\" height=\"" << coord(kHeight)
    << "\" fill=\"white\"/>\n";
  s << "<rect x=\"" << coord(kLeft) << "\" y=\"" << coord(kTop) << "\" width=\"" << coord(pw)
    << "\" height=\"" << coord(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

  s << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int k = 0; k <= 5; ++k) {
    const double xv = x_lo + (x_hi - x_lo) * k / 5.0;
    const double yv = y_lo + (y_hi - y_lo) * k / 5.0;
    s << "<line x1=\"" << coord(px(xv)) << "\" y1=\"" << coord(kTop + ph) << "\" x2=\""
      << coord(px(xv)) << "\" y2=\"" << coord(kTop + ph + 5) << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << coord(px(xv)) << "\" y=\"" << coord(kTop + ph + 18)
      << "\" text-anchor=\"middle\">" << fmt(xv, 4) << "</text>\n";
    s << "<line x1=\"" << coord(kLeft - 5) << "\" y1=\"" << coord(py(yv)) << "\" x2=\""
      << coord(kLeft) << "\" y2=\"" << coord(py(yv)) << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << coord(kLeft - 8) << "\" y=\"" << coord(py(yv) + 4)
      << "\" text-anchor=\"end\">" << fmt(yv, 4) << "</text>\n";
  }
  s << "<text x=\"" << coord(kLeft + pw / 2) << "\" y=\"" << coord(kHeight - 15)
    << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(layout.x_label) << "</text>\n";
  s << "<text x=\"18\" y=\"" << coord(kTop + ph / 2) << "\" text-anchor=\"middle\" font-size=\"13\""
    << " transform=\"rotate(-90 18 " << coord(kTop + ph / 2) << ")\">" << escape(layout.y_label)
    << "</text>\n";
  s << "</g>\n";

  for (std::size_t series = 0; series < ycs.size(); ++series) {
    const auto c = static_cast<std::size_t>(ycs[series]);
    const char* color = kColors[series % kColors.size()];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < n; i += stride) {
      const auto& row = table.rows[i];
      if (i > 0) s << ' ';
      s << coord(px(row[static_cast<std::size_t>(xc)])) << ',' << coord(py(row[c]));
    }
    s << "\"/>\n";
    if (n <= 50) {
      for (const auto& row : table.rows) {
        s << "<circle cx=\"" << coord(px(row[static_cast<std::size_t>(xc)])) << "\" cy=\""
          << coord(py(row[c])) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      }
    }
    s << "<text x=\"" << coord(kLeft + pw - 10) << "\" y=\"" << coord(kTop + 16 + 14.0 * series)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color
      << "\">" << escape(layout.y_columns[series]) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void cmd_plot(const std::string& csv_path, PlotKind kind, const std::string& svg_path) {
  const CsvTable table = read_csv(csv_path);
  const std::string svg = render_svg(table, kind);
  write_text_file(svg_path, svg);
}

}  // namespace qqcm
