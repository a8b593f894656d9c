#pragma once

// Matrix files and atomic writes.
//
// CSV: header "# rows cols", then one line per matrix row, comma-separated,
// numbers in shortest round-trip form.
// Binary: "SBD1", rows and cols as little-endian u64, then little-endian
// f64 values in column-major order.

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <string_view>

namespace sbd {

namespace fs = std::filesystem;

/// Writes via a temporary file in the target directory and a rename.
void write_file_atomic(const fs::path& path, std::string_view bytes);
std::string read_file(const fs::path& path);

std::string format_double(double v);

std::string matrix_to_csv(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_csv(std::string_view text);
std::string matrix_to_binary(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_binary(std::string_view bytes);

/// Format chosen by extension: ".bin" is binary, anything else CSV.
void write_matrix(const fs::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(const fs::path& path);

}  // namespace sbd
