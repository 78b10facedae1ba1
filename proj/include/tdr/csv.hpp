#pragma once

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <string>
#include <variant>
#include <vector>

#include "tdr/errors.hpp"

namespace tdr {

// Deterministic double formatting: shortest round-trip form via %.17g is too
// noisy; use %.12g everywhere so identical runs give byte-identical files.
inline std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

using CsvCell = std::variant<long long, double, std::string>;

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header)
      : out_(path) {
    if (!out_) throw NumericalError("cannot open output file: " + path);
    write_strings(header);
  }

  void row(std::initializer_list<CsvCell> cells) {
    row(std::vector<CsvCell>(cells));
  }

  void row(const std::vector<CsvCell>& cells) {
    std::string line;
    bool first = true;
    for (const auto& c : cells) {
      if (!first) line += ',';
      first = false;
      if (std::holds_alternative<long long>(c))
        line += std::to_string(std::get<long long>(c));
      else if (std::holds_alternative<double>(c))
        line += fmt_double(std::get<double>(c));
      else
        line += std::get<std::string>(c);
    }
    out_ << line << '\n';
  }

 private:
  void write_strings(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ',';
      line += cells[i];
    }
    out_ << line << '\n';
  }
  std::ofstream out_;
};

}  // namespace tdr
