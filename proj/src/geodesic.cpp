#include "infogeo/geodesic.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "infogeo/common.hpp"
#include "infogeo/kernels.hpp"

namespace infogeo {

namespace {

// Graphs up to this size use the sweep solver; beyond it the per-source
// Dijkstra wins and parallelizes over sources.
constexpr Eigen::Index kDenseSolverLimit = 64;

Eigen::MatrixXd knn_sparsify(const Eigen::MatrixXd& direct, Eigen::Index knn) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const Eigen::Index n = direct.rows();

    // Mark each node's knn nearest neighbors (ties broken by index), then
    // keep an edge if either endpoint selected it.
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> keep(n, n);
    keep.setConstant(false);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            return direct(i, a) < direct(i, b);
        });
        Eigen::Index kept = 0;
        for (const Eigen::Index j : order) {
            if (j == i) continue;
            keep(i, j) = true;
            if (++kept == knn) break;
        }
    }

    Eigen::MatrixXd weights = Eigen::MatrixXd::Constant(n, n, inf);
    for (Eigen::Index i = 0; i < n; ++i) {
        weights(i, i) = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j && (keep(i, j) || keep(j, i))) weights(i, j) = direct(i, j);
    }
    return weights;
}

void validate_distance_matrix(const Eigen::MatrixXd& m) {
    const Eigen::Index n = m.rows();
    if (m.cols() != n) throw validation_error("distance matrix must be square");
    if (n == 0) throw validation_error("distance matrix is empty");
    if (!m.allFinite()) throw validation_error("distance matrix has non-finite entries");
    if ((m.array() < 0.0).any()) throw validation_error("distance matrix has negative entries");
    if ((m.diagonal().array() != 0.0).any())
        throw validation_error("distance matrix diagonal must be zero");
    const double scale = m.maxCoeff();
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + scale))
        throw validation_error("distance matrix must be symmetric");
}

}  // namespace

DistanceMatrix geodesic_distances(const DistanceMatrix& direct, const GeodesicOptions& options) {
    validate_distance_matrix(direct.values);
    if (options.knn < 0) throw validation_error("knn must be nonnegative");
    const Eigen::Index n = direct.values.rows();

    Eigen::MatrixXd weights = (options.knn > 0 && options.knn < n - 1)
                                  ? knn_sparsify(direct.values, options.knn)
                                  : direct.values;

    DistanceMatrix out;
    out.kind = DistanceMatrix::Kind::Geodesic;
    if (n <= kDenseSolverLimit) {
        out.values = std::move(weights);
        kernels::floyd_warshall(out.values);
    } else {
        out.values = kernels::dijkstra_all_pairs(weights);
    }

    if (!out.values.allFinite())
        throw validation_error(
            "geodesic graph is disconnected; increase knn or use the complete graph");
    return out;
}

}  // namespace infogeo
