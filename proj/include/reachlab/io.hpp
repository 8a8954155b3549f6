#pragma once

#include <string>

#include "reachlab/lab.hpp"

namespace reachlab {

/// Shortest text that reads back to the same double ("%.17g").
std::string format_double(double value);

/// Header `x0,...,x{n-1}` then one point per line.
std::string cloud_to_csv(const PointCloud& cloud);
PointCloud cloud_from_csv(const std::string& text, double resolution = 0.0);

/// Header `delta,rho_h,dir_ab,dir_ba,slack`, the three slack terms, then the
/// report's extra columns.
std::string rows_to_csv(const SweepReport& report);

/// Inverse of rows_to_csv; the verdicts are recomputed with judge().
SweepReport rows_from_csv(const std::string& text, SweepKind kind);

std::string read_text_file(const std::string& path);
/// Writes via a temporary file and rename so readers never see half a file.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace reachlab
