#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "carma/path.hpp"
#include "carma/recovery.hpp"

namespace carma::io {

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double x);

/// SampledPath CSV: header "t,y1..yd", one row per observation, t = k*h.
void write_path_csv(const SampledPath& path, const std::string& filename);
SampledPath read_path_csv(const std::string& filename);

/// RecoveredIncrements CSV: header "n,t,delta_l".
void write_increments_csv(const RecoveredIncrements& inc, const std::string& filename);

/// Generic table: header row then one formatted row per entry.
void write_table_csv(const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows,
                     const std::string& filename);

}  // namespace carma::io
