#pragma once

// Point-cloud CSV files. Header is `x1,...,xd` (uniform weights) or
// `w,x1,...,xd` (weights renormalized). Numbers are written with 17
// significant digits so a write/read cycle is lossless.

#include "robot/core.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace robot {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    std::string_view f = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.remove_suffix(1);
    out.push_back(f);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double parse_number(std::string_view f, const std::string& where) {
  double v = 0.0;
  if (!f.empty() && f.front() == '+') f.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc() || ptr != f.data() + f.size() || f.empty()) throw CsvError(where + ": not a number: '" + std::string(f) + "'");
  return v;
}

}  // namespace detail

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline DiscreteMeasure parse_measure_csv(std::istream& in, const std::string& name = "csv") {
  std::string line;
  if (!std::getline(in, line)) throw CsvError(name + ": empty file");
  const auto header = detail::split_fields(line);
  const bool weighted = !header.empty() && header.front() == "w";
  const std::size_t first = weighted ? 1 : 0;
  if (header.size() <= first) throw CsvError(name + ": header has no coordinate columns");
  for (std::size_t k = first; k < header.size(); ++k)
    if (header[k] != "x" + std::to_string(k - first + 1)) throw CsvError(name + ": expected header x1,...,xd or w,x1,...,xd");
  const std::size_t d = header.size() - first;

  std::vector<double> coords;
  std::vector<double> weights;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto f = detail::split_fields(line);
    const std::string where = name + ":" + std::to_string(lineno);
    if (f.size() != header.size()) throw CsvError(where + ": expected " + std::to_string(header.size()) + " fields");
    if (weighted) weights.push_back(detail::parse_number(f[0], where));
    for (std::size_t k = first; k < f.size(); ++k) coords.push_back(detail::parse_number(f[k], where));
  }
  const auto n = static_cast<Index>(coords.size() / d);
  if (n == 0) throw CsvError(name + ": no data rows");
  Matrix X(n, static_cast<Index>(d));
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < static_cast<Index>(d); ++c) X(r, c) = coords[static_cast<std::size_t>(r) * d + static_cast<std::size_t>(c)];
  try {
    if (!weighted) return make_measure(std::move(X));
    return make_measure(std::move(X), Eigen::Map<Vector>(weights.data(), n));
  } catch (const InvalidArgument& e) {
    throw CsvError(name + ": " + e.what());
  }
}

inline DiscreteMeasure read_measure_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError(path + ": cannot open");
  return parse_measure_csv(in, path);
}

inline void write_measure_csv(std::ostream& out, const DiscreteMeasure& mu, bool with_weights = false) {
  if (with_weights) out << "w,";
  for (Index c = 0; c < mu.dim(); ++c) out << (c ? "," : "") << 'x' << c + 1;
  out << '\n';
  for (Index r = 0; r < mu.size(); ++r) {
    if (with_weights) out << format_number(mu.weights()(r)) << ',';
    for (Index c = 0; c < mu.dim(); ++c) out << (c ? "," : "") << format_number(mu.points()(r, c));
    out << '\n';
  }
}

/// Headerless dense matrix, one row per line.
inline void write_matrix_csv(std::ostream& out, const Matrix& M) {
  for (Index r = 0; r < M.rows(); ++r) {
    for (Index c = 0; c < M.cols(); ++c) out << (c ? "," : "") << format_number(M(r, c));
    out << '\n';
  }
}

}  // namespace robot
