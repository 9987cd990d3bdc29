#include "swicca/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <vector>

#include "swicca/errors.hpp"

namespace swicca {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Mat read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw input_error("cannot open matrix file: " + path);
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.c_str();
    while (true) {
      char* end = nullptr;
      const double v = std::strtod(p, &end);
      if (end == p) {
        throw input_error(path + ":" + std::to_string(lineno) + ": not a number");
      }
      if (!std::isfinite(v)) {
        throw input_error(path + ":" + std::to_string(lineno) + ": non-finite value");
      }
      row.push_back(v);
      while (*end == ' ' || *end == '\t') ++end;
      if (*end == ',') {
        p = end + 1;
      } else if (*end == '\0') {
        break;
      } else {
        throw input_error(path + ":" + std::to_string(lineno) + ": unexpected character");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw input_error(path + ":" + std::to_string(lineno) + ": ragged row (got " +
                        std::to_string(row.size()) + " values, expected " +
                        std::to_string(rows.front().size()) + ")");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw input_error(path + ": empty matrix file");
  }
  Mat m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
  }
  return m;
}

void write_matrix_csv(std::ostream& os, const Mat& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) os << ',';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

void write_matrix_csv(const std::string& path, const Mat& m) {
  std::ofstream out(path);
  if (!out) {
    throw input_error("cannot open output file: " + path);
  }
  write_matrix_csv(out, m);
  if (!out) {
    throw input_error("write failed: " + path);
  }
}

}  // namespace swicca
