#include "encore/matrix_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace encore {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& field, const std::string& context) {
  const char* s = field.c_str();
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(s, &end);
  while (end && *end == ' ') ++end;
  if (end == s || (end && *end != '\0')) {
    throw std::runtime_error("not a number: '" + field + "' (" + context + ")");
  }
  return v;
}

std::vector<std::string> split_csv_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c == '\r' && i + 1 == line.size()) {
      // trailing CR from CRLF files
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

namespace {

std::vector<std::vector<double>> read_numeric_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split_csv_record(line);
    std::vector<double> row;
    row.reserve(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      row.push_back(parse_double(fields[j], path + ":" + std::to_string(lineno) +
                                                ":" + std::to_string(j + 1)));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error("ragged row at " + path + ":" + std::to_string(lineno));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  auto rows = read_numeric_rows(path);
  if (rows.empty()) throw std::runtime_error("no data rows in " + path);
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_matrix_csv(const Eigen::MatrixXd& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

Eigen::VectorXd read_vector_csv(const std::string& path) {
  Eigen::MatrixXd m = read_matrix_csv(path);
  if (m.cols() != 1) throw std::runtime_error(path + ": expected one column");
  return m.col(0);
}

void write_vector_csv(const Eigen::VectorXd& v, const std::string& path) {
  write_matrix_csv(v, path);
}

}  // namespace encore
