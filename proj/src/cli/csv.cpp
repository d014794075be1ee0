#include "lydia/cli/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lydia/errors.hpp"

namespace lydia::cli {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_diagnostics_csv(std::ostream& out, std::span<const DiagnosticsRecord> records) {
  out << "k,t,f_gap,E,grad_norm,step_norm\n";
  for (const auto& r : records) {
    out << r.k << ',' << format_number(r.t) << ',' << format_number(r.f_gap) << ','
        << format_number(r.E) << ',' << format_number(r.grad_norm) << ','
        << format_number(r.step_norm) << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, std::span<const TrajectorySample> samples) {
  const std::size_t dim = samples.empty() ? 0 : samples.front().x.size();
  out << 't';
  for (std::size_t i = 1; i <= dim; ++i) out << ",x" << i;
  for (std::size_t i = 1; i <= dim; ++i) out << ",v" << i;
  out << ",E\n";
  for (const auto& s : samples) {
    out << format_number(s.t);
    for (double xi : s.x) out << ',' << format_number(xi);
    for (double vi : s.v) out << ',' << format_number(vi);
    out << ',' << format_number(s.E) << '\n';
  }
}

std::map<std::string, std::vector<double>> read_csv_columns(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("'" + path + "' is empty");

  std::vector<std::string> names;
  {
    std::stringstream header(line);
    std::string name;
    while (std::getline(header, name, ',')) names.push_back(name);
  }
  std::map<std::string, std::vector<double>> columns;
  for (const auto& n : names) columns[n];

  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream fields(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(fields, cell, ',')) {
      if (col >= names.size()) throw ConfigError("row " + std::to_string(row) + " has extra fields");
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw ConfigError("row " + std::to_string(row) + ": bad number '" + cell + "'");
      columns[names[col++]].push_back(v);
    }
    if (col != names.size()) throw ConfigError("row " + std::to_string(row) + " is short");
  }
  return columns;
}

}  // namespace lydia::cli
