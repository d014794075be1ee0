#pragma once

#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lydia/odesim.hpp"
#include "lydia/optimizers.hpp"

namespace lydia::cli {

/// %.17g, enough to round-trip any double.
std::string format_number(double v);

/// Header `k,t,f_gap,E,grad_norm,step_norm`.
void write_diagnostics_csv(std::ostream& out, std::span<const DiagnosticsRecord> records);

/// Header `t,x1..xn,v1..vn,E`.
void write_trajectory_csv(std::ostream& out, std::span<const TrajectorySample> samples);

/// Numeric CSV with a header row, keyed by column name. Throws ConfigError
/// if the file cannot be read or a row is malformed.
std::map<std::string, std::vector<double>> read_csv_columns(const std::string& path);

}  // namespace lydia::cli
