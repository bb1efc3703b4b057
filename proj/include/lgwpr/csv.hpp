#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace lgwpr::csv {

/// RFC-4180 table: a header row plus data rows of equal width.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws ValidationError when absent.
  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;
};

Table parse(std::istream& in);
Table read(const std::filesystem::path& path);

/// Parses a numeric cell; throws ParseError carrying the 1-based file row
/// (header = row 1) and 1-based column.
double to_double(const std::string& cell, std::size_t row, std::size_t column);

/// Quotes a field when it contains a delimiter, quote, or line break.
std::string escape(std::string_view field);

/// %.10g, with "NA" for NaN and "Inf"/"-Inf" for infinities.
std::string format(double value);
/// %.17g, for lossless round trips.
std::string format_exact(double value);

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path);
  ~Writer();
  Writer(const Writer&) = delete;
  Writer& operator=(const Writer&) = delete;

  void row(const std::vector<std::string>& fields);
  void close();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace lgwpr::csv
