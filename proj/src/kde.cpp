#include "infogeo/kde.hpp"

#include <cmath>

#include "infogeo/common.hpp"
#include "infogeo/kernels.hpp"

namespace infogeo {

Eigen::VectorXd max_smoothing_bandwidth(const Eigen::MatrixXd& samples) {
    const Eigen::Index n = samples.rows();
    const Eigen::Index d = samples.cols();
    if (n < 2) throw validation_error("bandwidth selection needs at least two samples");

    const double scale = 1.144 * std::pow(static_cast<double>(n), -0.2);
    Eigen::VectorXd h(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        const double mean = samples.col(k).mean();
        const double ss = (samples.col(k).array() - mean).square().sum();
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        const double floor = 1e-8 * (1.0 + std::abs(mean));
        h(k) = std::max(scale * sd, floor);
    }
    return h;
}

DensityEstimate fit_density(const Eigen::MatrixXd& samples) {
    return {samples, max_smoothing_bandwidth(samples)};
}

Eigen::VectorXd log_density(const DensityEstimate& estimate, const Eigen::MatrixXd& queries,
                            const std::optional<Eigen::MatrixXd>& projection) {
    const Eigen::Index d = estimate.centers.cols();
    if (queries.cols() != d)
        throw validation_error("query dimension " + std::to_string(queries.cols()) +
                               " does not match density dimension " + std::to_string(d));
    if (estimate.centers.rows() < 2)
        throw validation_error("density estimate needs at least two centers");

    if (projection) {
        if (projection->cols() != d)
            throw validation_error("projection has " + std::to_string(projection->cols()) +
                                   " columns, expected " + std::to_string(d));
        const DensityEstimate projected = fit_density(estimate.centers * projection->transpose());
        return log_density(projected, queries * projection->transpose());
    }

    if (estimate.bandwidth.size() != d || (estimate.bandwidth.array() <= 0.0).any())
        throw validation_error("density estimate has invalid bandwidths");

    const Eigen::Index n = estimate.centers.rows();
    const Eigen::VectorXd inv_h = estimate.bandwidth.cwiseInverse();
    // log f(x) = log sum_j K(x, c_j) - log n - sum_k log h_k - (d/2) log(2*pi)
    const double log_norm = std::log(static_cast<double>(n)) +
                            estimate.bandwidth.array().log().sum() +
                            0.5 * static_cast<double>(d) * std::log(2.0 * M_PI);
    Eigen::VectorXd out = kernels::log_kernel_sums(queries, estimate.centers, inv_h);
    out.array() -= log_norm;
    return out;
}

Eigen::VectorXd density(const DensityEstimate& estimate, const Eigen::MatrixXd& queries,
                        const std::optional<Eigen::MatrixXd>& projection) {
    // Elementwise std::exp (not Eigen's packet exp) so this is exactly the
    // exponential of log_density, bit for bit.
    return log_density(estimate, queries, projection)
        .unaryExpr([](double v) { return std::exp(v); });
}

}  // namespace infogeo
