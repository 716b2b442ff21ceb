#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace levdyn {

/// Round-trip formatting: 17 significant digits, "nan"/"inf" for non-finite.
std::string format_double(double v);

/// Minimal comma-separated writer. Lines starting with '#' are comments.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void comment(std::string_view text);
  void header(const std::vector<std::string>& columns);

  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(std::size_t v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(std::string_view v);
  void end_row();

 private:
  void separator();

  std::ostream& out_;
  bool row_open_ = false;
};

struct CsvTable {
  std::vector<std::string> comments;  // without the leading '#'
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws std::out_of_range if absent.
  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::size_t col) const;
};

/// Reads what CsvWriter emits. Throws std::runtime_error on ragged rows.
CsvTable read_csv(std::istream& in);

}  // namespace levdyn
