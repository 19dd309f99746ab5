#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <Eigen/Core>

namespace ipa::csv {

// Plain CSV: one row per line, comma separated, no header. Blank lines and
// lines starting with '#' are skipped. All rows must have equal width.
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);
Eigen::MatrixXd parse_matrix(std::istream& in, const std::string& source);

// A vector file is a single column.
Eigen::VectorXd read_vector(const std::filesystem::path& path);

// 17 significant digits so that a write/read cycle is exact.
std::string format_real(double x);

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m);
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);
void write_vector(std::ostream& out, const Eigen::VectorXd& v);
void write_vector(const std::filesystem::path& path, const Eigen::VectorXd& v);

}  // namespace ipa::csv
