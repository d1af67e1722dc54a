// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#include "shrinktm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

namespace shrinktm {
namespace {

std::vector<double> distinct(const Vector& v) {
  std::vector<double> s(v.data(), v.data() + v.size());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end(), [](double a, double b) { return std::abs(a - b) <= 1e-9; }), s.end());
  return s;
}

double quantile(std::vector<double> sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::string color(double value, double limit) {
  double t = limit > 0.0 ? std::clamp(value / limit, -1.0, 1.0) : 0.0;
  // white at 0, (33,102,172) at -1, (178,24,43) at +1
  const double r0 = t < 0 ? 33 : 178, g0 = t < 0 ? 102 : 24, b0 = t < 0 ? 172 : 43;
  t = std::abs(t);
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>(std::lround(255 + t * (r0 - 255))),
                static_cast<int>(std::lround(255 + t * (g0 - 255))), static_cast<int>(std::lround(255 + t * (b0 - 255))));
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

}  // namespace

double color_limit(const Matrix& training) {
  if (training.size() == 0) return 1.0;
  std::vector<double> v(training.data(), training.data() + training.size());
  std::sort(v.begin(), v.end());
  const double limit = std::max(std::abs(quantile(v, 0.01)), std::abs(quantile(v, 0.99)));
  return limit > 0.0 ? limit : 1.0;
}

std::string heatmap_svg(const Locations& locs, const Vector& values, double limit, const std::string& title) {
  if (static_cast<std::size_t>(values.size()) != locs.size()) throw DataError("field length does not match the locations");
  constexpr double size = 400.0, margin = 10.0, top = 30.0;
  const Vector x = locs.coords.col(0);
  const Vector y = locs.dim() > 1 ? Vector(locs.coords.col(1)) : Vector::Zero(x.size());
  const auto xs = distinct(x), ys = distinct(y);
  const bool grid = locs.dim() <= 2 && xs.size() * ys.size() == locs.size();
  const double xmin = xs.front(), xmax = xs.back(), ymin = ys.front(), ymax = ys.back();
  const double xspan = xmax > xmin ? xmax - xmin : 1.0, yspan = ymax > ymin ? ymax - ymin : 1.0;
  const double cw = size / static_cast<double>(grid ? xs.size() : 1), ch = size / static_cast<double>(grid ? ys.size() : 1);

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 2 * margin << "\" height=\""
      << size + margin + top << "\">\n";
  if (!title.empty())
    out << "<text x=\"" << margin << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << escape(title)
        << "</text>\n";
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    const std::string fill = color(values(k), limit);
    if (grid) {
      const auto ix = std::lower_bound(xs.begin(), xs.end(), x(k) - 1e-9) - xs.begin();
      const auto iy = std::lower_bound(ys.begin(), ys.end(), y(k) - 1e-9) - ys.begin();
      out << "<rect x=\"" << margin + static_cast<double>(ix) * cw << "\" y=\""
          << top + size - static_cast<double>(iy + 1) * ch << "\" width=\"" << cw << "\" height=\"" << ch
          << "\" fill=\"" << fill << "\"/>\n";
    } else {
      const double px = margin + size * (x(k) - xmin) / xspan, py = top + size - size * (y(k) - ymin) / yspan;
      out << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"4\" fill=\"" << fill << "\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace shrinktm
