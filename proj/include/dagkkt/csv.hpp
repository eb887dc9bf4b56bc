#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>

namespace dagkkt {

/// Reads a headerless comma-separated matrix. Every row must have the same
/// number of columns; blank lines are ignored.
Eigen::MatrixXd read_csv_matrix(std::istream& in);
Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path);

/// Writes with 17 significant digits so that values round-trip exactly.
void write_csv_matrix(std::ostream& out, const Eigen::MatrixXd& m);
void write_csv_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);

}  // namespace dagkkt
