#include "ccts/report/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ccts/core/dataset_io.hpp"
#include "ccts/core/error.hpp"

namespace ccts::report {
namespace {

constexpr int kCell = 56;
constexpr int kLeft = 90;
constexpr int kTop = 60;

std::string escape(const std::string& s) {
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

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Five-pointed star centred at (cx, cy).
std::string star(double cx, double cy, double r) {
  std::ostringstream os;
  os << "<polygon class=\"star\" fill=\"#000000\" points=\"";
  for (int i = 0; i < 10; ++i) {
    const double ang = -M_PI / 2 + i * M_PI / 5;
    const double rad = i % 2 == 0 ? r : r * 0.4;
    if (i) os << ' ';
    os << fixed(cx + rad * std::cos(ang), 2) << ',' << fixed(cy + rad * std::sin(ang), 2);
  }
  os << "\"/>";
  return os.str();
}

}  // namespace

std::string diverging_color(double value, double range) {
  double t = range > 0 ? std::clamp(value / range, -1.0, 1.0) : 0.0;
  // white -> red (178, 24, 43) or white -> blue (33, 102, 172)
  const int r_end = t >= 0 ? 178 : 33, g_end = t >= 0 ? 24 : 102, b_end = t >= 0 ? 43 : 172;
  t = std::abs(t);
  const auto mix = [t](int end) {
    return static_cast<int>(std::lround(255.0 + (end - 255.0) * t));
  };
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", mix(r_end), mix(g_end), mix(b_end));
  return buf;
}

std::string heatmap_svg(const attribution::AttributionResult& r, const std::string& title,
                        double range) {
  if (r.cells.empty()) throw DataError("cannot draw an empty attribution result");
  if (range <= 0) {
    for (const auto& c : r.cells) {
      if (!c.missing) range = std::max(range, std::abs(c.ate));
    }
  }
  std::vector<std::string> columns;
  if (r.has_channel_columns) columns = r.channel_names;
  columns.push_back("global");
  const int ncol = static_cast<int>(columns.size());
  const int nrow = static_cast<int>(r.concepts.size());
  const int width = kLeft + ncol * kCell + 20;
  const int height = kTop + nrow * kCell + 40;

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
     << height << "\" viewBox=\"0 0 " << width << ' ' << height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<text x=\"" << kLeft << "\" y=\"20\" font-size=\"14\">" << escape(title)
     << "</text>\n";
  os << "<text x=\"" << kLeft << "\" y=\"" << height - 12 << "\">colour range &#177;"
     << fixed(range, 4) << " bits; star = interval excludes 0</text>\n";
  for (int j = 0; j < ncol; ++j) {
    os << "<text x=\"" << kLeft + j * kCell + kCell / 2 << "\" y=\"" << kTop - 8
       << "\" text-anchor=\"middle\">" << escape(columns[static_cast<std::size_t>(j)])
       << "</text>\n";
  }
  for (int i = 0; i < nrow; ++i) {
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << kTop + i * kCell + kCell / 2 + 4
       << "\" text-anchor=\"end\">concept " << r.concepts[static_cast<std::size_t>(i)]
       << "</text>\n";
  }
  std::string stars;
  for (int i = 0; i < nrow; ++i) {
    for (int j = 0; j < ncol; ++j) {
      const int concept_id = r.concepts[static_cast<std::size_t>(i)];
      // the last column is the global one
      const std::optional<std::size_t> ch =
          j + 1 < ncol ? std::optional<std::size_t>(static_cast<std::size_t>(j))
                       : std::nullopt;
      const auto& cell = r.cell(concept_id, ch);
      const int x = kLeft + j * kCell, y = kTop + i * kCell;
      const std::string fill = cell.missing ? "#bdbdbd" : diverging_color(cell.ate, range);
      os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell << "\" height=\""
         << kCell << "\" fill=\"" << fill << "\" stroke=\"#ffffff\"><title>concept "
         << concept_id << ", " << escape(columns[static_cast<std::size_t>(j)]) << ": ";
      if (cell.missing) {
        os << "missing (" << escape(cell.error) << ")";
      } else {
        os << format_double(cell.ate) << " [" << format_double(cell.low) << ", "
           << format_double(cell.high) << "]";
      }
      os << "</title></rect>\n";
      if (!cell.missing && cell.significant) {
        stars += star(x + kCell / 2.0, y + kCell / 2.0, kCell * 0.22) + "\n";
      }
    }
  }
  os << stars << "</svg>\n";
  return os.str();
}

void emit_heatmap(const attribution::AttributionResult& r, const std::string& path,
                  const std::string& title, double range) {
  const std::string svg = heatmap_svg(r, title, range);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os << svg;
  if (!os) throw IoError("failed writing '" + path + "'");
}

}  // namespace ccts::report
