#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "infogeo/common.hpp"
#include "infogeo/kde.hpp"
#include "infogeo/rng.hpp"
#include "oracles.hpp"

using namespace infogeo;

TEST_CASE("maximal-smoothing bandwidth on a hand fixture") {
    Eigen::MatrixXd samples(2, 1);
    samples << 0.0, 1.0;
    // Bessel-corrected variance of {0, 1} is 0.5.
    const double expected = 1.144 * std::sqrt(0.5) * std::pow(2.0, -0.2);
    const Eigen::VectorXd h = max_smoothing_bandwidth(samples);
    REQUIRE(h.size() == 1);
    CHECK(h(0) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("bandwidth is per-coordinate and floored for constant columns") {
    NormalSampler rng(1);
    Eigen::MatrixXd samples = oracles::random_gaussian(200, 3, rng);
    samples.col(1) *= 10.0;
    samples.col(2).setConstant(5.0);
    const Eigen::VectorXd h = max_smoothing_bandwidth(samples);
    CHECK(h(1) > 5.0 * h(0));
    CHECK(h(2) == doctest::Approx(1e-8 * 6.0).epsilon(1e-12));  // 1e-8 * (1 + |mean|)
    CHECK((h.array() > 0.0).all());
}

TEST_CASE("bandwidth and density require at least two samples") {
    const Eigen::MatrixXd one = Eigen::MatrixXd::Zero(1, 2);
    CHECK_THROWS_AS((void)max_smoothing_bandwidth(one), validation_error);
    CHECK_THROWS_AS((void)fit_density(one), validation_error);
}

TEST_CASE("log_density matches the brute-force definition") {
    NormalSampler rng(2);
    const Eigen::MatrixXd samples = oracles::random_gaussian(40, 2, rng);
    const Eigen::MatrixXd queries = oracles::random_gaussian(15, 2, rng);
    const DensityEstimate est = fit_density(samples);
    const Eigen::VectorXd got = log_density(est, queries);
    REQUIRE(got.size() == 15);
    for (Eigen::Index i = 0; i < queries.rows(); ++i) {
        const double want =
            oracles::kde_log_density(est.centers, est.bandwidth, queries.row(i).transpose());
        CHECK(got(i) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("density integrates to one in 1-D") {
    NormalSampler rng(3);
    Eigen::MatrixXd samples(60, 1);
    for (Eigen::Index i = 0; i < samples.rows(); ++i) samples(i, 0) = rng.next();
    const DensityEstimate est = fit_density(samples);

    const double lo = samples.minCoeff() - 10.0, hi = samples.maxCoeff() + 10.0;
    const int points = 20001;
    const double step = (hi - lo) / (points - 1);
    Eigen::MatrixXd grid(points, 1);
    for (int i = 0; i < points; ++i) grid(i, 0) = lo + step * i;
    const Eigen::VectorXd values = density(est, grid);
    const double integral =
        (values.sum() - 0.5 * (values(0) + values(points - 1))) * step;
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("density is exp of log_density and finite in far tails") {
    NormalSampler rng(4);
    const Eigen::MatrixXd samples = oracles::random_gaussian(20, 2, rng);
    Eigen::MatrixXd queries(2, 2);
    queries << 0.0, 0.0, 4000.0, -4000.0;
    const DensityEstimate est = fit_density(samples);
    const Eigen::VectorXd lg = log_density(est, queries);
    const Eigen::VectorXd dens = density(est, queries);
    CHECK(std::isfinite(lg(1)));
    CHECK(lg(1) < -1e5);
    CHECK(dens(0) == std::exp(lg(0)));
    CHECK(dens(1) >= 0.0);
}

TEST_CASE("projected evaluation equals a direct fit in the projected space") {
    NormalSampler rng(5);
    const Eigen::MatrixXd samples = oracles::random_gaussian(30, 4, rng);
    const Eigen::MatrixXd queries = oracles::random_gaussian(7, 4, rng);
    const Eigen::MatrixXd a = oracles::random_orthonormal(2, 4, rng);

    const Eigen::VectorXd via_projection = log_density(fit_density(samples), queries, a);
    const Eigen::VectorXd direct =
        log_density(fit_density(samples * a.transpose()), queries * a.transpose());
    CHECK((via_projection.array() == direct.array()).all());
}

TEST_CASE("dimension mismatches are rejected") {
    NormalSampler rng(6);
    const DensityEstimate est = fit_density(oracles::random_gaussian(10, 3, rng));
    const Eigen::MatrixXd queries = oracles::random_gaussian(4, 2, rng);
    CHECK_THROWS_AS((void)log_density(est, queries), validation_error);
}
