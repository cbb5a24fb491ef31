#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace encore {

/// Reads a headerless numeric CSV into a dense matrix. Lines starting with
/// '#' and blank lines are skipped; ragged rows are an error.
Eigen::MatrixXd read_matrix_csv(const std::string& path);

/// Writes a dense matrix as headerless CSV with round-trip precision.
void write_matrix_csv(const Eigen::MatrixXd& m, const std::string& path);

Eigen::VectorXd read_vector_csv(const std::string& path);
void write_vector_csv(const Eigen::VectorXd& v, const std::string& path);

/// Splits one CSV record, honoring double-quoted fields and embedded quotes.
std::vector<std::string> split_csv_record(const std::string& line);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Strict string-to-double conversion; the whole field must be consumed.
double parse_double(const std::string& field, const std::string& context);

}  // namespace encore
