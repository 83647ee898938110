#include "polar_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace opde::cli {

namespace {
std::string escape_xml(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}
}  // namespace

std::string polar_plot_svg(const dist::PoseDistribution& d, const std::string& title) {
  constexpr double size = 480.0;
  constexpr double c = size / 2.0;
  constexpr double r_max = 190.0;
  const double peak = std::max(d.probs.maxCoeff(), 1e-12);

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size + 40
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (double f : {0.25, 0.5, 0.75, 1.0}) {
    os << "<circle cx=\"" << c << "\" cy=\"" << c << "\" r=\"" << f * r_max
       << "\" fill=\"none\" stroke=\"#ccc\"/>\n";
  }
  char buf[160];
  for (int deg = 0; deg < 360; deg += 45) {
    const double a = deg * std::numbers::pi / 180.0;
    std::snprintf(buf, sizeof buf, "<line x1=\"%g\" y1=\"%g\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#ddd\"/>\n", c, c,
                  c + r_max * std::cos(a), c - r_max * std::sin(a));
    os << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\">%d</text>\n",
                  c + (r_max + 16) * std::cos(a), c - (r_max + 16) * std::sin(a) + 4, deg);
    os << buf;
  }
  const char* colors[2] = {"#d62728", "#2ca02c"};
  const char* dashes[2] = {"", " stroke-dasharray=\"6 4\""};
  for (int ref = 0; ref < 2; ++ref) {
    os << "<polygon fill=\"none\" stroke=\"" << colors[ref] << "\" stroke-width=\"1.5\"" << dashes[ref]
       << " points=\"";
    for (int i = 0; i < d.n_revolution; ++i) {
      const double a = i * d.step_deg() * std::numbers::pi / 180.0;
      const double r = r_max * d.prob(ref, i) / peak;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", c + r * std::cos(a), c - r * std::sin(a));
      os << buf;
    }
    os << "\"/>\n";
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"10\" y=\"%g\">reflection 0 (solid): %.3f   reflection 1 (dashed): %.3f   peak %.3g</text>\n",
                size + 25, d.reflection_mass(0), d.reflection_mass(1), peak);
  os << buf;
  if (!title.empty()) os << "<text x=\"10\" y=\"16\">" << escape_xml(title) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace opde::cli
