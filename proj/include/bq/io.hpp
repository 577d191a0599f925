#pragma once

// Output helpers: number formatting, CSV tables, SVG line charts and
// atomic file writes.

#include <filesystem>
#include <string>
#include <vector>

namespace bq::io {

/// Shortest round-trip-safe form used in every output file (%.15g, "nan").
std::string fmt(double v);

/// Rows of preformatted cells under a header.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  void add_row(std::vector<std::string> cells);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Numeric table, the input of the plot emitter.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Column index; DomainError when absent.
  std::size_t column(const std::string& name) const;
  std::string csv() const;
};

/// Standalone SVG with one polyline per distinct value of `group_col`, axes and a legend.
/// DomainError on an empty table or a missing column.
std::string svg_lines(const Table& table, const std::string& x_col, const std::string& y_col,
                      const std::string& group_col);

void emit_svg_lines(const Table& table, const std::string& x_col, const std::string& y_col,
                    const std::string& group_col, const std::filesystem::path& out);

/// Write via a temporary file in the same directory and rename over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace bq::io
