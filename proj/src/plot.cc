// Copyright 2026 The ONRAP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "onrap/plot.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <boost/histogram.hpp>

namespace onrap {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b"};

std::string Num(double v) {
  // Two decimals are plenty for pixel coordinates.
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string Escape(const std::string& text) {
  std::string out;
  for (char c : text) {
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

// "Nice" tick step for a span, 1/2/5 times a power of ten.
double TickStep(double span, int target) {
  if (!(span > 0)) return 1.0;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10 * mag;
}

class Canvas {
 public:
  Canvas(double x0, double x1, double y0, double y1, double width,
         double height, double margin)
      : x0_(x0), x1_(x1), y0_(y0), y1_(y1), w_(width), h_(height),
        m_(margin) {}

  double X(double x) const { return m_ + (x - x0_) / (x1_ - x0_) * w_; }
  double Y(double y) const { return m_ + (y1_ - y) / (y1_ - y0_) * h_; }
  double Scale() const { return w_ / (x1_ - x0_); }

  void Header(std::ostream& out, const std::string& title) const {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
        << Num(w_ + 2 * m_) << "\" height=\"" << Num(h_ + 2 * m_)
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << Num(m_) << "\" y=\"" << Num(m_ * 0.5)
        << "\" font-size=\"14\">" << Escape(title) << "</text>\n";
  }

  void Axes(std::ostream& out, const std::string& x_label,
            const std::string& y_label) const {
    out << "<rect x=\"" << Num(m_) << "\" y=\"" << Num(m_) << "\" width=\""
        << Num(w_) << "\" height=\"" << Num(h_)
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    const double sx = TickStep(x1_ - x0_, 8);
    for (double t = std::ceil(x0_ / sx) * sx; t <= x1_ + 1e-9 * sx; t += sx) {
      out << "<line x1=\"" << Num(X(t)) << "\" y1=\"" << Num(m_ + h_)
          << "\" x2=\"" << Num(X(t)) << "\" y2=\"" << Num(m_ + h_ + 4)
          << "\" stroke=\"black\"/><text x=\"" << Num(X(t)) << "\" y=\""
          << Num(m_ + h_ + 16) << "\" text-anchor=\"middle\">"
          << Tick(t, sx) << "</text>\n";
    }
    const double sy = TickStep(y1_ - y0_, 6);
    for (double t = std::ceil(y0_ / sy) * sy; t <= y1_ + 1e-9 * sy; t += sy) {
      out << "<line x1=\"" << Num(m_ - 4) << "\" y1=\"" << Num(Y(t))
          << "\" x2=\"" << Num(m_) << "\" y2=\"" << Num(Y(t))
          << "\" stroke=\"black\"/><text x=\"" << Num(m_ - 6) << "\" y=\""
          << Num(Y(t) + 4) << "\" text-anchor=\"end\">" << Tick(t, sy)
          << "</text>\n";
    }
    out << "<text x=\"" << Num(m_ + w_ / 2) << "\" y=\""
        << Num(m_ + h_ + 34) << "\" text-anchor=\"middle\">"
        << Escape(x_label) << "</text>\n"
        << "<text transform=\"translate(" << Num(m_ * 0.3) << ","
        << Num(m_ + h_ / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
        << Escape(y_label) << "</text>\n";
  }

  // Content written until EndClip stays inside the plot frame.
  void BeginClip(std::ostream& out) const {
    out << "<defs><clipPath id=\"frame\"><rect x=\"" << Num(m_) << "\" y=\""
        << Num(m_) << "\" width=\"" << Num(w_) << "\" height=\"" << Num(h_)
        << "\"/></clipPath></defs>\n<g clip-path=\"url(#frame)\">\n";
  }
  static void EndClip(std::ostream& out) { out << "</g>\n"; }

  void Polyline(std::ostream& out, std::span<const Point2> pts,
                const std::string& style) const {
    if (pts.size() < 2) return;
    out << "<polyline fill=\"none\" " << style << " points=\"";
    for (const Point2& p : pts) out << Num(X(p.x)) << ',' << Num(Y(p.y)) << ' ';
    out << "\"/>\n";
  }

 private:
  static std::string Tick(double t, double step) {
    if (std::abs(t) < 1e-12 * step) t = 0;
    char buf[32];
    const int digits = step >= 1 ? 0 : static_cast<int>(std::ceil(-std::log10(step)));
    std::snprintf(buf, sizeof(buf), "%.*f", digits, t);
    return buf;
  }

  double x0_, x1_, y0_, y1_, w_, h_, m_;
};

}  // namespace

int HistogramBins::first_nonempty() const {
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] > 0) return static_cast<int>(i);
  }
  return -1;
}

HistogramBins MakeHistogram(std::span<const double> values, double width) {
  if (!(width > 0)) throw std::invalid_argument("bin width must be positive");
  HistogramBins bins;
  bins.width = width;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : values) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    } else {
      ++bins.non_finite;
    }
  }
  if (lo > hi) return bins;
  const long first = static_cast<long>(std::floor(lo / width));
  const long last = static_cast<long>(std::floor(hi / width));
  const auto n = static_cast<unsigned>(last - first + 1);
  bins.lo = first * width;
  namespace bh = boost::histogram;
  auto h = bh::make_histogram(
      bh::axis::regular<>(n, bins.lo, bins.lo + n * width));
  for (double v : values) {
    if (std::isfinite(v)) h(v);
  }
  bins.counts.resize(n);
  for (auto&& cell : bh::indexed(h, bh::coverage::all)) {
    const int i = cell.index();
    // Rounding can push a value onto the outer edges; fold them back.
    const int k = std::clamp(i, 0, static_cast<int>(n) - 1);
    bins.counts[k] += static_cast<int>(*cell);
  }
  return bins;
}

void WriteHistogramSvg(std::ostream& out, const std::string& title,
                       const std::string& x_label,
                       std::span<const HistogramSeries> series,
                       double bin_width) {
  std::vector<HistogramBins> bins;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  int peak = 1;
  for (const HistogramSeries& s : series) {
    bins.push_back(MakeHistogram(s.values, bin_width));
    const HistogramBins& b = bins.back();
    if (b.counts.empty()) continue;
    lo = std::min(lo, b.lo);
    hi = std::max(hi, b.left(static_cast<int>(b.counts.size())));
    peak = std::max(peak, *std::max_element(b.counts.begin(), b.counts.end()));
  }
  if (lo > hi) {
    lo = 0;
    hi = bin_width;
  }
  const Canvas canvas(lo, hi, 0, peak * 1.05, 640, 360, 60);
  canvas.Header(out, title);
  canvas.Axes(out, x_label, "count");
  // Series are drawn side by side inside each bin.
  const double slot = bin_width / std::max<std::size_t>(series.size(), 1);
  for (std::size_t s = 0; s < series.size(); ++s) {
    const HistogramBins& b = bins[s];
    const char* color = kPalette[s % std::size(kPalette)];
    for (std::size_t i = 0; i < b.counts.size(); ++i) {
      if (b.counts[i] == 0) continue;
      const double x = b.left(static_cast<int>(i)) + s * slot;
      out << "<rect x=\"" << Num(canvas.X(x)) << "\" y=\""
          << Num(canvas.Y(b.counts[i])) << "\" width=\""
          << Num(std::max(canvas.X(x + slot) - canvas.X(x) - 0.5, 0.5))
          << "\" height=\"" << Num(canvas.Y(0) - canvas.Y(b.counts[i]))
          << "\" fill=\"" << color << "\"/>\n";
    }
    std::string label = series[s].label;
    if (b.non_finite > 0) {
      label += " (" + std::to_string(b.non_finite) + " non-finite omitted)";
    }
    out << "<rect x=\"" << Num(canvas.X(lo) + 480) << "\" y=\""
        << Num(70 + 16 * s) << "\" width=\"10\" height=\"10\" fill=\""
        << color << "\"/><text x=\"" << Num(canvas.X(lo) + 494) << "\" y=\""
        << Num(79 + 16 * s) << "\">" << Escape(label) << "</text>\n";
  }
  out << "</svg>\n";
}

void WriteOverlaySvg(std::ostream& out, const OverlayInput& input) {
  double x0 = std::numeric_limits<double>::infinity();
  double x1 = -x0, y0 = x0, y1 = -x0;
  auto grow = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return;
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  };
  for (const Point2& p : input.route) grow(p.x, p.y);
  if (input.trace != nullptr) {
    for (const Pose2& p : input.trace->traversed) grow(p.x, p.y);
  }
  if (!(x0 <= x1)) {
    x0 = y0 = -1;
    x1 = y1 = 1;
  }
  const double pad = 3.0;
  x0 -= pad;
  x1 += pad;
  y0 -= pad;
  y1 += pad;
  const double width = 960;
  const double height = std::clamp(width * (y1 - y0) / (x1 - x0), 120.0, 2000.0);
  // Keep meters square: widen the shorter extent.
  const double aspect = width / height;
  if ((x1 - x0) / (y1 - y0) < aspect) {
    const double extra = (y1 - y0) * aspect - (x1 - x0);
    x0 -= extra / 2;
    x1 += extra / 2;
  } else {
    const double extra = (x1 - x0) / aspect - (y1 - y0);
    y0 -= extra / 2;
    y1 += extra / 2;
  }
  const Canvas canvas(x0, x1, y0, y1, width, height, 60);
  canvas.Header(out, input.title);
  canvas.Axes(out, "x [m]", "y [m]");
  canvas.BeginClip(out);
  auto inside = [&](const Point2& p) {
    return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
  };

  for (const PlacedGrid& g : input.grids) {
    const GridSpec& spec = g.grid.spec();
    const double half = 0.5 * spec.cell_size * canvas.Scale();
    for (int i = 0; i < g.grid.rows(); ++i) {
      for (int j = 0; j < g.grid.cols(); ++j) {
        if (!g.grid.Occupied(i, j)) continue;
        const Point2 w = EgoToWorld(g.pose, {spec.ColX(j), spec.RowY(i)});
        if (!inside(w)) continue;
        out << "<rect x=\"" << Num(canvas.X(w.x) - half) << "\" y=\""
            << Num(canvas.Y(w.y) - half) << "\" width=\"" << Num(2 * half)
            << "\" height=\"" << Num(2 * half)
            << "\" fill=\"#e377c2\" fill-opacity=\"0.35\"/>\n";
      }
    }
  }
  for (const AxisAlignedBox& b : input.scene.boxes) {
    out << "<rect x=\"" << Num(canvas.X(b.min_x)) << "\" y=\""
        << Num(canvas.Y(b.max_y)) << "\" width=\""
        << Num(canvas.X(b.max_x) - canvas.X(b.min_x)) << "\" height=\""
        << Num(canvas.Y(b.min_y) - canvas.Y(b.max_y))
        << "\" fill=\"#555\"/>\n";
  }
  const double dot = std::max(0.15 * canvas.Scale(), 1.5);
  for (const Point2& p : input.scene.points) {
    if (!inside(p)) continue;
    out << "<circle cx=\"" << Num(canvas.X(p.x)) << "\" cy=\""
        << Num(canvas.Y(p.y)) << "\" r=\"" << Num(dot)
        << "\" fill=\"#333\"/>\n";
  }
  for (const DynamicAgent& a : input.scene.agents) {
    if (!inside(a.position)) continue;
    out << "<circle cx=\"" << Num(canvas.X(a.position.x)) << "\" cy=\""
        << Num(canvas.Y(a.position.y)) << "\" r=\"" << Num(2 * dot)
        << "\" fill=\"none\" stroke=\"#333\"/>\n";
  }
  canvas.Polyline(out, input.route,
                  "stroke=\"#999\" stroke-width=\"1.5\" "
                  "stroke-dasharray=\"6 4\"");
  if (input.trace != nullptr) {
    for (const CycleRecord& c : input.trace->cycles) {
      canvas.Polyline(out, c.reference,
                      "stroke=\"#2ca02c\" stroke-opacity=\"0.25\" "
                      "stroke-width=\"1\"");
    }
    for (const CycleRecord& c : input.trace->cycles) {
      canvas.Polyline(out, c.planned,
                      "stroke=\"#1f77b4\" stroke-opacity=\"0.3\" "
                      "stroke-width=\"1\"");
    }
    std::vector<Point2> path;
    for (const Pose2& p : input.trace->traversed) path.push_back({p.x, p.y});
    canvas.Polyline(out, path,
                    "stroke=\"#d62728\" stroke-width=\"2.5\" "
                    "stroke-linejoin=\"round\"");
  }
  Canvas::EndClip(out);
  const char* legend[][2] = {{"#999", "route"},
                             {"#2ca02c", "references"},
                             {"#1f77b4", "planned paths"},
                             {"#d62728", "traversed"},
                             {"#333", "obstacles"},
                             {"#e377c2", "occupied cells"}};
  for (std::size_t i = 0; i < std::size(legend); ++i) {
    out << "<rect x=\"" << Num(width - 70) << "\" y=\"" << Num(70 + 16 * i)
        << "\" width=\"10\" height=\"10\" fill=\"" << legend[i][0]
        << "\"/><text x=\"" << Num(width - 56) << "\" y=\""
        << Num(79 + 16 * i) << "\">" << legend[i][1] << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace onrap
