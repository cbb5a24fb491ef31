#include "encore/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "encore/stats.hpp"

namespace encore {

namespace {

struct BoxStats {
  double q25, median, q75, whisker_lo, whisker_hi;
  std::vector<double> outliers;
};

BoxStats box_stats(const std::vector<double>& values) {
  BoxStats s{};
  s.q25 = quantile(values, 0.25);
  s.median = quantile(values, 0.5);
  s.q75 = quantile(values, 0.75);
  const double iqr = s.q75 - s.q25;
  const double lo_fence = s.q25 - 1.5 * iqr;
  const double hi_fence = s.q75 + 1.5 * iqr;
  s.whisker_lo = s.q75;
  s.whisker_hi = s.q25;
  for (double v : values) {
    if (v < lo_fence || v > hi_fence) {
      s.outliers.push_back(v);
    } else {
      s.whisker_lo = std::min(s.whisker_lo, v);
      s.whisker_hi = std::max(s.whisker_hi, v);
    }
  }
  return s;
}

// Rounds x up to a tick-friendly step: 1, 2, or 5 times a power of ten.
double nice_step(double x) {
  const double mag = std::pow(10.0, std::floor(std::log10(x)));
  const double frac = x / mag;
  if (frac <= 1.0) return mag;
  if (frac <= 2.0) return 2.0 * mag;
  if (frac <= 5.0) return 5.0 * mag;
  return 10.0 * mag;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_boxplot_svg(const std::string& path, const std::string& title,
                       const std::string& y_label,
                       const std::vector<BoxGroup>& groups) {
  constexpr double kLeft = 78, kRight = 24, kTop = 46, kBottom = 64;
  constexpr double kGroupWidth = 84, kPlotHeight = 300;
  const double n_slots = std::max<std::size_t>(groups.size(), 1);
  const double width = kLeft + kRight + kGroupWidth * n_slots;
  const double height = kTop + kPlotHeight + kBottom;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& g : groups) {
    for (double v : g.values) {
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const bool has_data = std::isfinite(lo);
  if (!has_data) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo <= 0.0) {
    const double pad = std::max(1e-9, std::abs(hi) * 0.1 + 0.5);
    lo -= pad;
    hi += pad;
  } else {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  const auto y_of = [&](double v) {
    return kTop + kPlotHeight * (hi - v) / (hi - lo);
  };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width)
      << "\" height=\"" << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << ' '
      << fmt(height) << "\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  out << "<text x=\"" << fmt(width / 2) << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-size=\"15\" fill=\"#1a1a1a\">" << escape_xml(title) << "</text>\n";
  out << "<text x=\"18\" y=\"" << fmt(kTop + kPlotHeight / 2)
      << "\" text-anchor=\"middle\" font-size=\"12\" fill=\"#1a1a1a\" transform=\"rotate(-90 18 "
      << fmt(kTop + kPlotHeight / 2) << ")\">" << escape_xml(y_label) << "</text>\n";

  // Axis with round-number ticks.
  const double step = nice_step((hi - lo) / 5.0);
  out << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop) << "\" x2=\""
      << fmt(kLeft) << "\" y2=\"" << fmt(kTop + kPlotHeight)
      << "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-12 * step; t += step) {
    const double y = y_of(t);
    out << "<line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << fmt(y) << "\" x2=\""
        << fmt(kLeft) << "\" y2=\"" << fmt(y) << "\" stroke=\"#444444\"/>\n";
    out << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(y) << "\" x2=\""
        << fmt(width - kRight) << "\" y2=\"" << fmt(y)
        << "\" stroke=\"#e3e3e3\" stroke-width=\"0.7\"/>\n";
    out << "<text x=\"" << fmt(kLeft - 9) << "\" y=\"" << fmt(y + 4)
        << "\" text-anchor=\"end\" font-size=\"11\" fill=\"#333333\">" << fmt(t)
        << "</text>\n";
  }

  for (std::size_t i = 0; i < groups.size(); ++i) {
    const double cx = kLeft + kGroupWidth * (static_cast<double>(i) + 0.5);
    out << "<text x=\"" << fmt(cx) << "\" y=\"" << fmt(kTop + kPlotHeight + 22)
        << "\" text-anchor=\"middle\" font-size=\"12\" fill=\"#1a1a1a\">"
        << escape_xml(groups[i].label) << "</text>\n";
    std::vector<double> vals;
    for (double v : groups[i].values) {
      if (std::isfinite(v)) vals.push_back(v);
    }
    if (vals.empty()) continue;
    const BoxStats s = box_stats(vals);
    const double half = 24, cap = 13;
    out << "<line x1=\"" << fmt(cx) << "\" y1=\"" << fmt(y_of(s.whisker_lo))
        << "\" x2=\"" << fmt(cx) << "\" y2=\"" << fmt(y_of(s.q25))
        << "\" stroke=\"#2f5597\"/>\n";
    out << "<line x1=\"" << fmt(cx) << "\" y1=\"" << fmt(y_of(s.q75)) << "\" x2=\""
        << fmt(cx) << "\" y2=\"" << fmt(y_of(s.whisker_hi))
        << "\" stroke=\"#2f5597\"/>\n";
    out << "<line x1=\"" << fmt(cx - cap) << "\" y1=\"" << fmt(y_of(s.whisker_lo))
        << "\" x2=\"" << fmt(cx + cap) << "\" y2=\"" << fmt(y_of(s.whisker_lo))
        << "\" stroke=\"#2f5597\"/>\n";
    out << "<line x1=\"" << fmt(cx - cap) << "\" y1=\"" << fmt(y_of(s.whisker_hi))
        << "\" x2=\"" << fmt(cx + cap) << "\" y2=\"" << fmt(y_of(s.whisker_hi))
        << "\" stroke=\"#2f5597\"/>\n";
    out << "<rect x=\"" << fmt(cx - half) << "\" y=\"" << fmt(y_of(s.q75))
        << "\" width=\"" << fmt(2 * half) << "\" height=\""
        << fmt(std::max(y_of(s.q25) - y_of(s.q75), 0.5))
        << "\" fill=\"#8db4e2\" fill-opacity=\"0.85\" stroke=\"#2f5597\"/>\n";
    out << "<line x1=\"" << fmt(cx - half) << "\" y1=\"" << fmt(y_of(s.median))
        << "\" x2=\"" << fmt(cx + half) << "\" y2=\"" << fmt(y_of(s.median))
        << "\" stroke=\"#1f3864\" stroke-width=\"2\"/>\n";
    for (double v : s.outliers) {
      out << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(y_of(v))
          << "\" r=\"2.5\" fill=\"none\" stroke=\"#c0504d\"/>\n";
    }
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace encore
