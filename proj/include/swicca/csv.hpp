#pragma once

#include <ostream>
#include <string>

#include "swicca/linalg.hpp"

namespace swicca {

// Matrix file format shared by all CLI subcommands: plain CSV, one row per
// line, no header, values written with "%.17g" so doubles round-trip exactly.

std::string format_double(double v);

Mat read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Mat& m);
void write_matrix_csv(std::ostream& os, const Mat& m);

}  // namespace swicca
