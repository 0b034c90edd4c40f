#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

namespace infogeo::io {

/// Read a numeric CSV file (rows = records, '.' decimal, ',' separator).
/// A single leading header row is skipped iff it contains a non-numeric cell.
/// Throws io_error on missing files and validation_error on bad cells.
Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path);

/// Write a matrix as CSV with 17 significant digits, so that reading the file
/// back reproduces the doubles bit for bit. No header row.
void write_csv_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);

/// Shortest-round-trip style formatting used for every numeric artifact.
std::string format_double(double v);

struct ManifestEntry {
    std::string path;
    std::string label;  // empty = unlabeled
};

/// Parse a collection manifest: {"sets":[{"path":..., "label":...}, ...]}.
/// Relative sample paths are resolved against the manifest's directory by the
/// caller; this function returns them verbatim.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);

}  // namespace infogeo::io
