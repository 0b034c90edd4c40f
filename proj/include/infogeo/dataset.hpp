#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace infogeo {

/// One dataset: n samples in R^d, rows = samples. Treated throughout as an
/// i.i.d. draw from an unknown density, so n >= 2 (variance estimation and
/// KDE need at least two points).
struct DataSet {
    Eigen::MatrixXd samples;
    std::string label;

    Eigen::Index size() const { return samples.rows(); }
    Eigen::Index dimension() const { return samples.cols(); }
};

/// An ordered family of at least two datasets sharing one ambient dimension.
struct Collection {
    std::vector<DataSet> sets;

    std::size_t size() const { return sets.size(); }
    Eigen::Index dimension() const { return sets.empty() ? 0 : sets.front().dimension(); }

    /// Throws validation_error unless there are >= 2 sets, every set has
    /// >= 2 finite rows, and all ambient dimensions agree.
    void validate() const;
};

/// Load a collection described by a JSON manifest. Relative CSV paths are
/// resolved against the manifest's directory; manifest order defines the
/// index order used everywhere downstream.
Collection load_collection(const std::filesystem::path& manifest_path);

/// Write each set as CSV next to a manifest at `manifest_path`.
void save_collection(const Collection& c, const std::filesystem::path& manifest_path);

/// Draw a reproducible collection of Gaussian datasets, one per mean /
/// covariance pair, each with n_per_set samples. All draws come from a single
/// seeded stream in order, so the result is a pure function of the arguments.
Collection synth_gaussian_collection(const std::vector<Eigen::VectorXd>& means,
                                     const std::vector<Eigen::MatrixXd>& covariances,
                                     Eigen::Index n_per_set, std::uint64_t seed);

}  // namespace infogeo
