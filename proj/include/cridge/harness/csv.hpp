#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace cridge::harness {

using CsvCell = std::variant<double, std::int64_t, std::string>;

/// Header-first CSV writer. Doubles use 17 significant digits.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);

  void row(const std::vector<CsvCell>& cells);

 private:
  std::ostream& out_;
  std::size_t width_;
};

std::string format_double(double v);

}  // namespace cridge::harness
