#pragma once

#include <Eigen/Dense>

namespace infogeo::kernels {

// Hot loops shared by density evaluation, the projection gradient, and the
// geodesic solver. Every function here parallelizes only over independent
// output rows and keeps all reductions serial within a row, so results are
// bitwise identical to the serial:: references below for any thread count.

/// For each query row q_i, log sum_j exp(-0.5 * ||(q_i - s_j) ./ h||^2) over
/// sample rows s_j. `inv_bandwidth` holds 1/h_k per coordinate. When a row's
/// largest exponent drops below -700 the sum is rescaled (log-sum-exp) so the
/// result stays finite instead of collapsing to log(0).
Eigen::VectorXd log_kernel_sums(const Eigen::MatrixXd& queries,
                                const Eigen::MatrixXd& samples,
                                const Eigen::VectorXd& inv_bandwidth);

/// Matrix of kernel exponents E(i,j) = -0.5 * ||(r_i - c_j) ./ h||^2 between
/// two point sets.
Eigen::MatrixXd kernel_exponents(const Eigen::MatrixXd& rows,
                                 const Eigen::MatrixXd& cols,
                                 const Eigen::VectorXd& inv_bandwidth);

/// Row-wise softmax of an exponent matrix, computed with the usual row-max
/// shift. Each output row is nonnegative and sums to 1.
Eigen::MatrixXd row_softmax(const Eigen::MatrixXd& exponents);

/// In-place all-pairs shortest paths: the classic triple loop (k outermost),
/// swept repeatedly until a pass changes nothing, so the result is an exact
/// fixed point even under floating-point reassociation. Missing edges are
/// +infinity. Serial by nature; used for small graphs.
void floyd_warshall(Eigen::MatrixXd& dist);

/// All-pairs shortest paths via one binary-heap Dijkstra per source, sources
/// processed in parallel. `weights` is a dense nonnegative matrix with
/// +infinity marking absent edges.
Eigen::MatrixXd dijkstra_all_pairs(const Eigen::MatrixXd& weights);

// Single-threaded references. The parallel versions above must agree with
// these bit for bit; tests compare them directly.
namespace serial {

Eigen::VectorXd log_kernel_sums(const Eigen::MatrixXd& queries,
                                const Eigen::MatrixXd& samples,
                                const Eigen::VectorXd& inv_bandwidth);

Eigen::MatrixXd kernel_exponents(const Eigen::MatrixXd& rows,
                                 const Eigen::MatrixXd& cols,
                                 const Eigen::VectorXd& inv_bandwidth);

Eigen::MatrixXd row_softmax(const Eigen::MatrixXd& exponents);

Eigen::MatrixXd dijkstra_all_pairs(const Eigen::MatrixXd& weights);

}  // namespace serial

}  // namespace infogeo::kernels
