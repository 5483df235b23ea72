#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>

#include "csv.hpp"
#include "recip/error.hpp"
#include "recip/signal.hpp"

namespace recip {

namespace detail {

std::size_t CsvTable::column(const std::string& name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) fail(ErrorKind::io, "missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cell);
      cell.clear();
    } else if (ch != '\r' && ch != ' ' && ch != '\t') {
      cell += ch;
    }
  }
  out.push_back(cell);
  return out;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  while (std::getline(in, line) && line.find_first_not_of(" \t\r") == std::string::npos) {
  }
  require(!line.empty(), ErrorKind::io, "empty csv input");
  t.header = split(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split(line);
    require(cells.size() == t.header.size(), ErrorKind::io,
            "line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                " fields");
    std::vector<double> row(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto& c = cells[i];
      auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), row[i]);
      if (ec != std::errc() || ptr != c.data() + c.size())
        fail(ErrorKind::io, "line " + std::to_string(lineno) + ": bad number '" + c + "'");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace detail

using detail::num;

void write_signal_csv(std::ostream& out, const ComplexSignal& signal) {
  out << "t,re,im\n";
  for (std::size_t k = 0; k < signal.values.size(); ++k)
    out << num(signal.grid.time(k)) << ',' << num(signal.values[k].real()) << ','
        << num(signal.values[k].imag()) << '\n';
}

ComplexSignal read_signal_csv(std::istream& in, bool cyclic) {
  auto table = detail::read_csv(in);
  const auto ct = table.column("t"), cr = table.column("re"), ci = table.column("im");
  std::vector<double> t;
  ComplexSignal s;
  for (auto& row : table.rows) {
    t.push_back(row[ct]);
    s.values.emplace_back(row[cr], row[ci]);
  }
  s.grid = TimeGrid::from_times(t, cyclic);
  s.validate();
  return s;
}

void write_polar_csv(std::ostream& out, const PolarDecomposition& polar) {
  out << "t,log_modulus,phase,flagged\n";
  for (std::size_t k = 0; k < polar.grid.n; ++k)
    out << num(polar.grid.time(k)) << ',' << num(polar.log_modulus[k]) << ','
        << num(polar.phase[k]) << ',' << (polar.zero_flags[k] ? 1 : 0) << '\n';
}

PolarDecomposition read_polar_csv(std::istream& in, bool cyclic) {
  auto table = detail::read_csv(in);
  const auto ct = table.column("t"), cl = table.column("log_modulus"),
             cp = table.column("phase"), cf = table.column("flagged");
  std::vector<double> t;
  PolarDecomposition p;
  for (auto& row : table.rows) {
    t.push_back(row[ct]);
    p.log_modulus.push_back(row[cl]);
    p.phase.push_back(row[cp]);
    p.zero_flags.push_back(row[cf] != 0.0);
  }
  p.grid = TimeGrid::from_times(t, cyclic);
  const std::size_t n = p.grid.n;
  p.anchor = std::min(n - 1, static_cast<std::size_t>(std::max(0.0, -p.grid.t_start / p.grid.dt)));
  if (cyclic) {
    // the seam step is not stored; take the mean of the neighbouring steps
    const double edge = 0.5 * ((p.phase[1] - p.phase[0]) + (p.phase[n - 1] - p.phase[n - 2]));
    p.period_increment = p.phase[n - 1] - p.phase[0] + edge;
  }
  return p;
}

}  // namespace recip
