#include "bq/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bq/errors.hpp"

namespace bq::io {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v == 0.0 ? 0.0 : v);  // folds -0 into 0
  return buf;
}

Csv::Csv(std::vector<std::string> header) : header_(std::move(header)) {}

void Csv::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw DomainError("csv row width does not match header");
  rows_.push_back(std::move(cells));
}

std::string Csv::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw DomainError("table has no column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

std::string Table::csv() const {
  Csv out(header);
  for (const auto& r : rows) {
    std::vector<std::string> cells;
    for (double v : r) cells.push_back(fmt(v));
    out.add_row(std::move(cells));
  }
  return out.str();
}

namespace {

constexpr double kWidth = 720, kHeight = 460;
constexpr double kLeft = 70, kRight = 150, kTop = 30, kBottom = 50;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

struct Range {
  double lo = INFINITY, hi = -INFINITY;
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(lo < hi)) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

std::string svg_lines(const Table& table, const std::string& x_col, const std::string& y_col,
                      const std::string& group_col) {
  if (table.rows.empty()) throw DomainError("svg: empty table");
  const std::size_t xc = table.column(x_col), yc = table.column(y_col), gc = table.column(group_col);

  std::vector<double> groups;
  Range xr, yr;
  for (const auto& r : table.rows) {
    if (std::find(groups.begin(), groups.end(), r[gc]) == groups.end()) groups.push_back(r[gc]);
    if (std::isfinite(r[xc]) && std::isfinite(r[yc])) {
      xr.add(r[xc]);
      yr.add(r[yc]);
    }
  }
  if (!(xr.lo <= xr.hi)) throw DomainError("svg: no finite points");
  xr.pad();
  yr.pad();
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // Axes and ticks.
  s << "<g stroke=\"black\" fill=\"none\">\n"
    << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(kLeft + pw) << "\" y2=\""
    << num(kTop + ph) << "\"/>\n"
    << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft) << "\" y2=\""
    << num(kTop + ph) << "\"/>\n</g>\n<g fill=\"black\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xr.lo + i * (xr.hi - xr.lo) / 4, yv = yr.lo + i * (yr.hi - yr.lo) / 4;
    s << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(kTop + ph + 18) << "\" text-anchor=\"middle\">"
      << label(xv) << "</text>\n"
      << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">" << label(yv)
      << "</text>\n";
  }
  s << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 10) << "\" text-anchor=\"middle\">"
    << x_col << "</text>\n"
    << "<text x=\"16\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << num(kTop + ph / 2) << ")\">" << y_col << "</text>\n</g>\n";

  for (std::size_t g = 0; g < groups.size(); ++g) {
    const char* colour = kPalette[g % std::size(kPalette)];
    s << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const auto& r : table.rows) {
      if (r[gc] != groups[g] || !std::isfinite(r[xc]) || !std::isfinite(r[yc])) continue;
      s << (first ? "" : " ") << num(px(r[xc])) << ',' << num(py(r[yc]));
      first = false;
    }
    s << "\"/>\n";
    const double ly = kTop + 10 + 18 * g, lx = kLeft + pw + 15;
    s << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 20) << "\" y2=\"" << num(ly)
      << "\" stroke=\"" << colour << "\" stroke-width=\"1.5\"/>\n"
      << "<text x=\"" << num(lx + 26) << "\" y=\"" << num(ly + 4) << "\">" << group_col << " = " << label(groups[g])
      << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void emit_svg_lines(const Table& table, const std::string& x_col, const std::string& y_col,
                    const std::string& group_col, const std::filesystem::path& out) {
  write_atomic(out, svg_lines(table, x_col, y_col, group_col));
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  const auto tmp = dir / ("." + path.filename().string() + ".tmp");
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace bq::io
