#pragma once

// Minimal numeric CSV: a header line followed by rows of doubles. Numbers
// are written in shortest round-trip form so files reload bit-exactly.

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <vector>

namespace mmot {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// When `expected` is nonempty the header must match it exactly. Errors
/// report 1-based file line numbers.
CsvTable read_csv(std::istream& in, const std::vector<std::string>& expected = {});

std::string format_double(double value);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  void row(std::initializer_list<double> values);
  void row(const std::vector<double>& values);

 private:
  std::ostream& out_;
};

}  // namespace mmot
