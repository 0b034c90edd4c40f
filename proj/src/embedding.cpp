#include "infogeo/embedding.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "infogeo/common.hpp"

namespace infogeo {

Embedding classical_mds(const DistanceMatrix& distances, Eigen::Index k) {
    const Eigen::MatrixXd& d = distances.values;
    const Eigen::Index n = d.rows();
    if (d.cols() != n) throw validation_error("distance matrix must be square");
    if (n < 2) throw validation_error("embedding needs at least two points");
    if (k < 1 || k > n - 1)
        throw validation_error("embedding dimension must be between 1 and N-1");
    if (!d.allFinite()) throw validation_error("distance matrix has non-finite entries");
    const double scale = d.cwiseAbs().maxCoeff();
    if ((d - d.transpose()).cwiseAbs().maxCoeff() > 1e-8 * (1.0 + scale))
        throw validation_error("distance matrix must be symmetric");

    // Gram matrix via double centering of the squared distances.
    const Eigen::MatrixXd symmetric = 0.5 * (d + d.transpose());
    const Eigen::MatrixXd d2 = symmetric.array().square();
    const Eigen::VectorXd row_means = d2.rowwise().mean();
    const double total_mean = d2.mean();
    Eigen::MatrixXd gram(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            gram(i, j) = -0.5 * (d2(i, j) - row_means(i) - row_means(j) + total_mean);
    gram = 0.5 * (gram + gram.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) throw numerical_error("eigendecomposition failed");
    const Eigen::VectorXd& all_eigenvalues = solver.eigenvalues();  // ascending
    const Eigen::MatrixXd& all_vectors = solver.eigenvectors();

    Embedding out;
    out.coords.resize(n, k);
    out.eigenvalues.resize(k);

    double negative_mass = 0.0, total_mass = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        total_mass += std::abs(all_eigenvalues(i));
        if (all_eigenvalues(i) < 0.0) negative_mass += -all_eigenvalues(i);
    }
    out.clamped_negative_mass = total_mass > 0.0 ? negative_mass / total_mass : 0.0;

    for (Eigen::Index c = 0; c < k; ++c) {
        const Eigen::Index src = n - 1 - c;  // descending order
        const double lambda = std::max(all_eigenvalues(src), 0.0);
        Eigen::VectorXd v = all_vectors.col(src);

        // Deterministic sign: the entry of largest magnitude (first index on
        // ties) is made positive.
        Eigen::Index pivot = 0;
        v.cwiseAbs().maxCoeff(&pivot);
        if (v(pivot) < 0.0) v = -v;

        out.eigenvalues(c) = lambda;
        out.coords.col(c) = v * std::sqrt(lambda);
    }
    return out;
}

Embedding fine_embed(const Collection& c, Eigen::Index k, Metric metric, bool fisher_scale,
                     const GeodesicOptions& geodesic) {
    const DistanceMatrix direct = pairwise_distances(c, metric, std::nullopt, fisher_scale);
    const DistanceMatrix paths = geodesic_distances(direct, geodesic);
    return classical_mds(paths, k);
}

}  // namespace infogeo
