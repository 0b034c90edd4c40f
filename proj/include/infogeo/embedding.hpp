#pragma once

#include <Eigen/Dense>

#include "infogeo/dataset.hpp"
#include "infogeo/distances.hpp"
#include "infogeo/geodesic.hpp"

namespace infogeo {

struct Embedding {
    Eigen::MatrixXd coords;       // N x k, one embedded point per dataset; column means zero
    Eigen::VectorXd eigenvalues;  // retained Gram eigenvalues, descending, clamped at zero
    /// Fraction of the Gram matrix's total absolute eigenvalue mass carried by
    /// negative eigenvalues (those are clamped to zero above and in coords).
    /// Large values mean the distances are far from Euclidean.
    double clamped_negative_mass = 0.0;
};

/// Classical multidimensional scaling: double-center the squared distances,
/// eigendecompose, and scale the leading eigenvectors. Requires
/// 1 <= k <= N-1. Columns are ordered by descending eigenvalue; each
/// eigenvector's sign is fixed by making its largest-magnitude entry (first
/// such index) positive.
Embedding classical_mds(const DistanceMatrix& distances, Eigen::Index k);

/// Full manifold embedding of a collection: pairwise divergences, shortest
/// paths through the complete (or knn-sparsified) graph to approximate
/// manifold geodesics, then classical MDS into k coordinates.
Embedding fine_embed(const Collection& c, Eigen::Index k, Metric metric, bool fisher_scale,
                     const GeodesicOptions& geodesic = {});

}  // namespace infogeo
