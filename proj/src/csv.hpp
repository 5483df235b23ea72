#pragma once

#include <cstdio>
#include <iosfwd>
#include <string>
#include <vector>

namespace recip::detail {

// round-trip exact decimal text
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);

}  // namespace recip::detail
