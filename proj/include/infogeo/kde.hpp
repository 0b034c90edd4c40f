#pragma once

#include <Eigen/Dense>
#include <optional>

namespace infogeo {

/// Gaussian kernel density estimate with a diagonal bandwidth matrix.
/// `bandwidth` stores the per-coordinate kernel scales h_k; the quadratic
/// form inside the kernel uses diag(h_k^2). (Whether h is a standard
/// deviation or a variance is ambiguous in parts of the literature; here h_k
/// is a standard deviation and its square enters the kernel. See README.)
struct DensityEstimate {
    Eigen::MatrixXd centers;    // n x d kernel locations, n >= 2
    Eigen::VectorXd bandwidth;  // d, strictly positive
};

/// Per-coordinate maximal-smoothing bandwidths h_k = 1.144 * sd_k * n^(-1/5),
/// with sd_k the Bessel-corrected sample standard deviation of column k,
/// floored at 1e-8 * (1 + |column mean|) so degenerate coordinates keep the
/// kernel matrix invertible. Requires n >= 2.
Eigen::VectorXd max_smoothing_bandwidth(const Eigen::MatrixXd& samples);

/// Bundle samples with their maximal-smoothing bandwidths.
DensityEstimate fit_density(const Eigen::MatrixXd& samples);

/// Log density at each query row. With a projection A the estimate is
/// rebuilt on the projected centers — bandwidths recomputed there — and
/// evaluated at the projected queries, so it matches a direct fit on A*x
/// exactly. Far-tail queries return a finite value rather than -infinity.
Eigen::VectorXd log_density(const DensityEstimate& estimate, const Eigen::MatrixXd& queries,
                            const std::optional<Eigen::MatrixXd>& projection = std::nullopt);

/// exp of log_density; strictly positive at every finite query.
Eigen::VectorXd density(const DensityEstimate& estimate, const Eigen::MatrixXd& queries,
                        const std::optional<Eigen::MatrixXd>& projection = std::nullopt);

}  // namespace infogeo
