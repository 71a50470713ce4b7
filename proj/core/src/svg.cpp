// Copyright 2026 The swingup Authors
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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "swingup/serialize.hpp"

namespace swingup::io {
namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string hex(const std::array<int, 3>& c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
  return buf;
}

}  // namespace

std::array<int, 3> colormap(double t) {
  // Degree-6 polynomial fit of viridis, sampled on 256 levels.
  static constexpr double c[7][3] = {
      {0.2777273272234177, 0.005407344544966578, 0.3340998053353061},
      {0.1050930431085774, 1.404613529898575, 1.384590162594685},
      {-0.3308618287255563, 0.214847559468213, 0.09509516302823659},
      {-4.634230498983486, -5.799100973351585, -19.33244095627987},
      {6.228269936347081, 14.17993336680509, 56.69055260068105},
      {4.776384997670288, -13.74514537774601, -65.35303263337234},
      {-5.435455855934631, 4.645852612178535, 26.3124352495832},
  };
  if (!(t >= 0.0)) t = 0.0;  // NaN maps to the bottom of the scale
  const double level = std::round(std::min(t, 1.0) * 255.0) / 255.0;
  std::array<int, 3> rgb{};
  for (int k = 0; k < 3; ++k) {
    double v = c[6][k];
    for (int i = 5; i >= 0; --i) v = v * level + c[i][k];
    rgb[static_cast<std::size_t>(k)] = static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  }
  return rgb;
}

std::string heatmap_svg(const protocols::ScanGrid& g) {
  const double left = 80, top = 30, plot_w = 600, plot_h = 360, bar_x = 710, bar_w = 18;
  const double width = 800, height = 470;
  const std::size_t nr = g.amplitude.size(), nc = g.detuning.size();
  const double cw = plot_w / static_cast<double>(nc), ch = plot_h / static_cast<double>(nr);

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // Row 0 (smallest amplitude) at the bottom.
  for (std::size_t r = 0; r < nr; ++r) {
    const double y = top + plot_h - static_cast<double>(r + 1) * ch;
    for (std::size_t c = 0; c < nc; ++c) {
      const double v = g.at(r, c);
      s << "<rect x=\"" << fmt("%.3f", left + static_cast<double>(c) * cw) << "\" y=\"" << fmt("%.3f", y)
        << "\" width=\"" << fmt("%.3f", cw + 0.01) << "\" height=\"" << fmt("%.3f", ch + 0.01)
        << "\" fill=\"" << (std::isnan(v) ? std::string("#ff00ff") : hex(colormap(v))) << "\"/>\n";
    }
  }
  s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
    << "\" fill=\"none\" stroke=\"black\"/>\n";

  const std::size_t xticks = std::min<std::size_t>(nc, 6);
  for (std::size_t k = 0; k < xticks; ++k) {
    const std::size_t c = xticks == 1 ? 0 : k * (nc - 1) / (xticks - 1);
    const double x = left + (static_cast<double>(c) + 0.5) * cw;
    s << "<line x1=\"" << fmt("%.3f", x) << "\" y1=\"" << top + plot_h << "\" x2=\"" << fmt("%.3f", x)
      << "\" y2=\"" << top + plot_h + 5 << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << fmt("%.3f", x) << "\" y=\"" << top + plot_h + 18 << "\" text-anchor=\"middle\">"
      << fmt("%g", g.detuning[c]) << "</text>\n";
  }
  const std::size_t yticks = std::min<std::size_t>(nr, 6);
  for (std::size_t k = 0; k < yticks; ++k) {
    const std::size_t r = yticks == 1 ? 0 : k * (nr - 1) / (yticks - 1);
    const double y = top + plot_h - (static_cast<double>(r) + 0.5) * ch;
    s << "<line x1=\"" << left - 5 << "\" y1=\"" << fmt("%.3f", y) << "\" x2=\"" << left << "\" y2=\""
      << fmt("%.3f", y) << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << left - 8 << "\" y=\"" << fmt("%.3f", y + 4) << "\" text-anchor=\"end\">"
      << fmt("%.3g", g.amplitude[r]) << "</text>\n";
  }
  s << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << top + plot_h + 40
    << "\" text-anchor=\"middle\">detuning (GHz)</text>\n";
  s << "<text transform=\"translate(22," << top + plot_h / 2
    << ") rotate(-90)\" text-anchor=\"middle\">amplitude (&#8730;pJ)</text>\n";

  constexpr int kBarSteps = 64;
  for (int k = 0; k < kBarSteps; ++k) {
    const double t0 = k / static_cast<double>(kBarSteps);
    const double y = top + plot_h * (1.0 - (k + 1) / static_cast<double>(kBarSteps));
    s << "<rect x=\"" << bar_x << "\" y=\"" << fmt("%.3f", y) << "\" width=\"" << bar_w << "\" height=\""
      << fmt("%.3f", plot_h / kBarSteps + 0.01) << "\" fill=\"" << hex(colormap(t0 + 0.5 / kBarSteps))
      << "\"/>\n";
  }
  s << "<rect x=\"" << bar_x << "\" y=\"" << top << "\" width=\"" << bar_w << "\" height=\"" << plot_h
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double v : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const double y = top + plot_h * (1.0 - v);
    s << "<text x=\"" << bar_x + bar_w + 5 << "\" y=\"" << fmt("%.3f", y + 4) << "\">" << fmt("%g", v)
      << "</text>\n";
  }
  s << "<text x=\"" << bar_x + bar_w / 2 << "\" y=\"" << top - 10
    << "\" text-anchor=\"middle\">inversion</text>\n";
  s << "</svg>\n";
  return s.str();
}

}  // namespace swingup::io
