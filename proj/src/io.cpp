#include "infogeo/io.hpp"

#include <json.hpp>

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "infogeo/common.hpp"

namespace infogeo::io {

namespace {

// Split one CSV line on commas. Fields are trimmed of surrounding whitespace;
// quoting is not supported (the data files are plain numeric tables).
std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        const auto begin = field.find_first_not_of(" \t\r");
        if (begin == std::string::npos) {
            out.emplace_back();
        } else {
            const auto end = field.find_last_not_of(" \t\r");
            out.push_back(field.substr(begin, end - begin + 1));
        }
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && errno != ERANGE;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open file: " + path.string());

    std::vector<std::vector<double>> rows;
    std::string line;
    Eigen::Index cols = -1;
    std::size_t line_no = 0;
    bool first_data_row = true;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        const auto fields = split_fields(line);
        std::vector<double> row(fields.size());
        bool all_numeric = true;
        for (std::size_t j = 0; j < fields.size(); ++j) {
            if (!parse_double(fields[j], row[j])) {
                all_numeric = false;
                if (!first_data_row) {
                    throw validation_error("non-numeric cell at row " + std::to_string(line_no) +
                                           ", col " + std::to_string(j + 1) + " in " + path.string());
                }
                break;
            }
        }
        if (!all_numeric) {
            // A non-numeric first row is treated as a header and skipped.
            continue;
        }
        first_data_row = false;

        if (cols < 0) {
            cols = static_cast<Eigen::Index>(row.size());
        } else if (static_cast<Eigen::Index>(row.size()) != cols) {
            throw validation_error("ragged row at line " + std::to_string(line_no) + " in " +
                                   path.string() + ": expected " + std::to_string(cols) +
                                   " fields, got " + std::to_string(row.size()));
        }
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (!std::isfinite(row[j])) {
                throw validation_error("non-finite value at row " + std::to_string(line_no) +
                                       ", col " + std::to_string(j + 1) + " in " + path.string());
            }
        }
        rows.push_back(std::move(row));
    }

    if (rows.empty()) throw validation_error("no data rows in " + path.string());

    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), cols);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

void write_csv_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write file: " + path.string());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
    if (!out) throw io_error("write failed: " + path.string());
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("manifest not found: " + path.string());

    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw validation_error("malformed manifest " + path.string() + ": " + e.what());
    }

    if (!j.is_object() || !j.contains("sets") || !j["sets"].is_array())
        throw validation_error("manifest " + path.string() + " must be an object with a \"sets\" array");

    std::vector<ManifestEntry> entries;
    for (const auto& item : j["sets"]) {
        if (!item.is_object() || !item.contains("path") || !item["path"].is_string())
            throw validation_error("each manifest entry needs a string \"path\" (" + path.string() + ")");
        ManifestEntry e;
        e.path = item["path"].get<std::string>();
        if (item.contains("label")) {
            if (!item["label"].is_string())
                throw validation_error("manifest \"label\" must be a string (" + path.string() + ")");
            e.label = item["label"].get<std::string>();
        }
        entries.push_back(std::move(e));
    }
    if (entries.empty()) throw validation_error("manifest " + path.string() + " lists no sets");
    return entries;
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries) {
    nlohmann::json j;
    j["sets"] = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json item;
        item["path"] = e.path;
        if (!e.label.empty()) item["label"] = e.label;
        j["sets"].push_back(std::move(item));
    }
    std::ofstream out(path);
    if (!out) throw io_error("cannot write manifest: " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace infogeo::io
