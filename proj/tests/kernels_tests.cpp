#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "infogeo/kernels.hpp"
#include "infogeo/rng.hpp"
#include "infogeo/threading.hpp"
#include "oracles.hpp"

using namespace infogeo;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Restores the thread cap on scope exit so tests cannot leak a setting.
struct CapGuard {
    ~CapGuard() { threading::set_cap(0); }
};

Eigen::MatrixXd random_symmetric_graph(Eigen::Index n, NormalSampler& rng) {
    Eigen::MatrixXd g(n, n);
    g.setZero();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double w = 0.05 + std::abs(rng.next());
            g(i, j) = g(j, i) = w;
        }
    return g;
}

}  // namespace

TEST_CASE("threading cap round-trips and reports effective threads") {
    CapGuard guard;
    threading::set_cap(3);
    CHECK(threading::cap() == 3);
    CHECK(threading::effective_threads() >= 1);
    threading::set_cap(0);
    CHECK(threading::cap() == 0);
    CHECK(threading::effective_threads() >= 1);
}

TEST_CASE("log_kernel_sums matches a brute-force log-sum-exp") {
    NormalSampler rng(1);
    const Eigen::MatrixXd queries = oracles::random_gaussian(9, 3, rng);
    const Eigen::MatrixXd samples = oracles::random_gaussian(14, 3, rng);
    const Eigen::VectorXd h = Eigen::Vector3d(0.7, 1.3, 0.4);
    const Eigen::VectorXd got = kernels::log_kernel_sums(queries, samples, h.cwiseInverse());
    REQUIRE(got.size() == queries.rows());
    for (Eigen::Index i = 0; i < queries.rows(); ++i) {
        // The oracle includes the KDE normalization; strip it to isolate the
        // raw kernel sum.
        const double log_norm = std::log(static_cast<double>(samples.rows())) +
                                1.5 * std::log(2.0 * M_PI) + h.array().log().sum();
        const double want =
            oracles::kde_log_density(samples, h, queries.row(i).transpose()) + log_norm;
        CHECK(got(i) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("log_kernel_sums survives catastrophic underflow") {
    Eigen::MatrixXd queries(1, 1), samples(2, 1);
    queries << 0.0;
    samples << 300.0, 301.0;
    const Eigen::VectorXd h = Eigen::VectorXd::Constant(1, 1.0);
    const double got = kernels::log_kernel_sums(queries, samples, h.cwiseInverse())(0);
    CHECK(std::isfinite(got));
    // Dominant term: exp(-0.5 * 300^2); the second adds exp(-300.5) of it.
    const double expected = -0.5 * 300.0 * 300.0 + std::log1p(std::exp(-300.5));
    CHECK(got == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("parallel kernels agree bitwise with the serial references") {
    CapGuard guard;
    NormalSampler rng(2);
    const Eigen::MatrixXd queries = oracles::random_gaussian(33, 4, rng);
    const Eigen::MatrixXd samples = oracles::random_gaussian(57, 4, rng);
    const Eigen::VectorXd inv_h = Eigen::Vector4d(0.5, 2.0, 1.0, 0.8);
    const Eigen::MatrixXd graph = random_symmetric_graph(40, rng);

    const Eigen::VectorXd sums_ref = kernels::serial::log_kernel_sums(queries, samples, inv_h);
    const Eigen::MatrixXd expo_ref = kernels::serial::kernel_exponents(queries, samples, inv_h);
    const Eigen::MatrixXd soft_ref = kernels::serial::row_softmax(expo_ref);
    const Eigen::MatrixXd paths_ref = kernels::serial::dijkstra_all_pairs(graph);

    for (const int threads : {1, 2, 3, 8}) {
        CAPTURE(threads);
        threading::set_cap(threads);
        CHECK((kernels::log_kernel_sums(queries, samples, inv_h).array() == sums_ref.array())
                  .all());
        const Eigen::MatrixXd expo = kernels::kernel_exponents(queries, samples, inv_h);
        CHECK((expo.array() == expo_ref.array()).all());
        CHECK((kernels::row_softmax(expo).array() == soft_ref.array()).all());
        CHECK((kernels::dijkstra_all_pairs(graph).array() == paths_ref.array()).all());
    }
}

TEST_CASE("kernel exponents match the definition on a hand case") {
    Eigen::MatrixXd rows(1, 2), cols(2, 2);
    rows << 1.0, 2.0;
    cols << 1.0, 2.0, 3.0, 0.0;
    const Eigen::VectorXd inv_h = Eigen::Vector2d(1.0, 0.5);
    const Eigen::MatrixXd e = kernels::kernel_exponents(rows, cols, inv_h);
    CHECK(e(0, 0) == 0.0);
    // Difference (-2, 2), scaled (-2, 1): exponent -0.5 * (4 + 1).
    CHECK(e(0, 1) == doctest::Approx(-2.5).epsilon(1e-15));
}

TEST_CASE("row_softmax rows sum to one and tolerate extreme exponents") {
    Eigen::MatrixXd e(2, 3);
    e << 0.0, -1e6, -2e6, 5.0, 5.0, 5.0;
    const Eigen::MatrixXd s = kernels::row_softmax(e);
    CHECK(s(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.row(0).sum() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s(1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK((s.array() >= 0.0).all());

    NormalSampler rng(3);
    const Eigen::MatrixXd random = 50.0 * oracles::random_gaussian(11, 7, rng);
    const Eigen::MatrixXd soft = kernels::row_softmax(random);
    for (Eigen::Index i = 0; i < soft.rows(); ++i)
        CHECK(soft.row(i).sum() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("floyd_warshall finds shortcuts and is an exact fixed point") {
    Eigen::MatrixXd g(4, 4);
    g << 0, 1, 10, kInf,
         1, 0, 2, 8,
         10, 2, 0, 3,
         kInf, 8, 3, 0;
    Eigen::MatrixXd solved = g;
    kernels::floyd_warshall(solved);
    CHECK(solved(0, 2) == 3.0);   // 0-1-2
    CHECK(solved(0, 3) == 6.0);   // 0-1-2-3
    CHECK(solved(1, 3) == 5.0);   // 1-2-3
    CHECK(solved(3, 0) == 6.0);

    Eigen::MatrixXd again = solved;
    kernels::floyd_warshall(again);
    CHECK((again.array() == solved.array()).all());
}

TEST_CASE("floyd_warshall matches the independent oracle exactly") {
    NormalSampler rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::MatrixXd g = random_symmetric_graph(9, rng);
        Eigen::MatrixXd solved = g;
        kernels::floyd_warshall(solved);
        const auto oracle = oracles::floyd_warshall(oracles::to_nested(g));
        for (Eigen::Index i = 0; i < g.rows(); ++i)
            for (Eigen::Index j = 0; j < g.cols(); ++j)
                CHECK(solved(i, j) ==
                      oracle[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    }
}

TEST_CASE("dijkstra agrees with floyd_warshall and handles missing edges") {
    NormalSampler rng(5);
    const Eigen::MatrixXd g = random_symmetric_graph(25, rng);
    Eigen::MatrixXd fw = g;
    kernels::floyd_warshall(fw);
    const Eigen::MatrixXd dj = kernels::dijkstra_all_pairs(g);
    CHECK(((dj - fw).cwiseAbs().maxCoeff()) < 1e-12);

    Eigen::MatrixXd sparse(4, 4);
    sparse << 0, 1, kInf, kInf,
              1, 0, 1, kInf,
              kInf, 1, 0, 1,
              kInf, kInf, 1, 0;
    const Eigen::MatrixXd paths = kernels::dijkstra_all_pairs(sparse);
    CHECK(paths(0, 3) == 3.0);
    CHECK(paths(0, 2) == 2.0);

    Eigen::MatrixXd split(2, 2);
    split << 0, kInf, kInf, 0;
    const Eigen::MatrixXd cut = kernels::dijkstra_all_pairs(split);
    CHECK(std::isinf(cut(0, 1)));
}
