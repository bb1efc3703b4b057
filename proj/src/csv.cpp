#include "lgwpr/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lgwpr/error.hpp"

namespace lgwpr::csv {

std::size_t Table::column(std::string_view name) const {
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == name) return c;
  throw ValidationError("missing column '" + std::string(name) + "'");
}

bool Table::has_column(std::string_view name) const {
  for (const auto& h : header)
    if (h == name) return true;
  return false;
}

namespace {

// Returns false at end of input.
bool next_record(std::istream& in, std::vector<std::string>& out,
                 std::size_t line) {
  out.clear();
  int ch = in.get();
  if (ch == EOF) return false;
  std::string field;
  bool quoted = false;
  bool after_quote = false;
  for (;; ch = in.get()) {
    if (quoted) {
      if (ch == EOF)
        throw ParseError("unterminated quoted field", line, out.size() + 1);
      if (ch == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          quoted = false;
          after_quote = true;
        }
      } else {
        field.push_back(static_cast<char>(ch));
      }
      continue;
    }
    if (ch == '"' && field.empty() && !after_quote) {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(field));
      field.clear();
      after_quote = false;
    } else if (ch == '\r') {
      if (in.peek() == '\n') in.get();
      break;
    } else if (ch == '\n' || ch == EOF) {
      break;
    } else {
      if (after_quote)
        throw ParseError("characters after closing quote", line,
                         out.size() + 1);
      field.push_back(static_cast<char>(ch));
    }
  }
  out.push_back(std::move(field));
  return true;
}

bool blank(const std::vector<std::string>& record) {
  return record.size() == 1 && record[0].empty();
}

}  // namespace

Table parse(std::istream& in) {
  Table table;
  std::vector<std::string> record;
  std::size_t line = 1;
  if (!next_record(in, record, line)) throw ParseError("empty CSV", 1, 1);
  if (!record.empty() && record[0].size() >= 3 &&
      record[0].compare(0, 3, "\xEF\xBB\xBF") == 0)
    record[0].erase(0, 3);
  table.header = record;
  while (next_record(in, record, ++line)) {
    if (blank(record)) continue;
    if (record.size() != table.header.size())
      throw ParseError("row has " + std::to_string(record.size()) +
                           " fields, header has " +
                           std::to_string(table.header.size()),
                       line, record.size());
    table.rows.push_back(record);
  }
  return table;
}

Table read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return parse(in);
}

double to_double(const std::string& cell, std::size_t row,
                 std::size_t column) {
  auto fail = [&] {
    return ParseError("non-numeric cell '" + cell + "' at row " +
                          std::to_string(row) + ", column " +
                          std::to_string(column),
                      row, column);
  };
  std::size_t b = cell.find_first_not_of(" \t");
  std::size_t e = cell.find_last_not_of(" \t");
  if (b == std::string::npos) throw fail();
  std::string trimmed = cell.substr(b, e - b + 1);
  if (trimmed == "NA" || trimmed == "nan" || trimmed == "NaN")
    return std::nan("");
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(trimmed.c_str(), &end);
  if (end != trimmed.c_str() + trimmed.size() || errno == ERANGE) throw fail();
  return v;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos)
    return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

namespace {
std::string printf_double(const char* fmt, double value) {
  if (std::isnan(value)) return "NA";
  if (std::isinf(value)) return value > 0 ? "Inf" : "-Inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, value);
  return buf;
}
}  // namespace

std::string format(double value) { return printf_double("%.10g", value); }
std::string format_exact(double value) { return printf_double("%.17g", value); }

struct Writer::Impl {
  std::ofstream out;
  std::filesystem::path path;
};

Writer::Writer(const std::filesystem::path& path)
    : impl_(std::make_unique<Impl>()) {
  impl_->path = path;
  impl_->out.open(path, std::ios::binary | std::ios::trunc);
  if (!impl_->out)
    throw IoError("cannot open '" + path.string() + "' for writing");
}

Writer::~Writer() = default;

void Writer::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) impl_->out << ',';
    impl_->out << escape(fields[i]);
  }
  impl_->out << '\n';
}

void Writer::close() {
  impl_->out.close();
  if (impl_->out.fail())
    throw IoError("failed writing '" + impl_->path.string() + "'");
}

}  // namespace lgwpr::csv
