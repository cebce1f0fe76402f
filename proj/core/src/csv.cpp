#include "mmot/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include "mmot/error.hpp"

namespace mmot {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cell);
      cell.clear();
    } else if (ch != '\r' && ch != ' ' && ch != '\t') {
      cell.push_back(ch);
    }
  }
  out.push_back(cell);
  return out;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "cli", "row " + std::to_string(line) + ": " + what);
}

}  // namespace

CsvTable read_csv(std::istream& in, const std::vector<std::string>& expected) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    if (table.header.empty()) {
      if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        line.erase(0, 3);
      }
      table.header = split(line);
      if (!expected.empty() && table.header != expected) {
        std::string want;
        for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
        parse_error(line_no, "expected header '" + want + "'");
      }
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != table.header.size()) {
      parse_error(line_no, "expected " + std::to_string(table.header.size()) + " columns, got " +
                               std::to_string(cells.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto& s = cells[c];
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), row[c]);
      if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        parse_error(line_no, "column '" + table.header[c] + "' is not a number: '" + s + "'");
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) parse_error(line_no, "missing header");
  return table;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out) {
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> values) {
  row(std::vector<double>(values));
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    out_ << (i ? "," : "") << format_double(values[i]);
  }
  out_ << '\n';
}

}  // namespace mmot
