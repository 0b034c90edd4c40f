#pragma once

#include <Eigen/Dense>
#include <optional>

#include "infogeo/dataset.hpp"
#include "infogeo/divergence.hpp"

namespace infogeo {

/// Pairwise dissimilarities between the datasets of a collection: either the
/// direct divergence estimates or their shortest-path closure.
struct DistanceMatrix {
    enum class Kind { Direct, Geodesic };

    Eigen::MatrixXd values;  // N x N, symmetric, zero diagonal, finite, >= 0
    Kind kind = Kind::Direct;
};

/// Estimate every pairwise divergence in a collection, optionally after
/// projecting all sets by the same matrix. Each unordered pair is computed
/// once and mirrored, so the matrix is exactly symmetric. Only symmetric
/// metrics are allowed (KL is rejected). With `fisher_scale` the entries are
/// mapped to approximate Fisher information distances (skl and hellinger
/// only).
DistanceMatrix pairwise_distances(const Collection& c, Metric metric,
                                  const std::optional<Eigen::MatrixXd>& projection = std::nullopt,
                                  bool fisher_scale = false);

}  // namespace infogeo
