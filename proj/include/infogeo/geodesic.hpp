#pragma once

#include <Eigen/Dense>

#include "infogeo/distances.hpp"

namespace infogeo {

struct GeodesicOptions {
    /// Keep only the `knn` nearest neighbors of each node (union-symmetrized)
    /// before solving shortest paths; 0 means use the complete graph.
    Eigen::Index knn = 0;
};

/// All-pairs shortest-path closure of a distance matrix: entry (i,j) becomes
/// the length of the cheapest path from i to j through the weighted graph.
/// Output is entrywise <= input, satisfies the triangle inequality, and the
/// operation is idempotent (re-applying it returns its input bit for bit).
/// Small graphs go through the in-place sweep solver, larger ones through
/// per-source Dijkstra. Throws validation_error if sparsification
/// disconnects the graph.
DistanceMatrix geodesic_distances(const DistanceMatrix& direct,
                                  const GeodesicOptions& options = {});

}  // namespace infogeo
