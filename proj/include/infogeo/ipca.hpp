#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "infogeo/dataset.hpp"
#include "infogeo/distances.hpp"
#include "infogeo/divergence.hpp"

namespace infogeo {

/// Cost functionals for projection learning. D is the matrix of ambient
/// pairwise divergences, Dhat(A) its counterpart between the projected
/// datasets, and c > 0 a kernel width. CLI names in parentheses.
enum class CostVariant {
    SquaredError,    // sum_ij (Dhat_ij - D_ij)^2                    (j1)
    KernelError,     // sum_ij (exp(-D_ij/c) - exp(-Dhat_ij/c))^2    (j2)
    NegativeSpread,  // -sum_ij Dhat_ij^2                            (j3)
    KernelMass       // sum_ij exp(-2 Dhat_ij / c)                   (j4)
};

std::string cost_name(CostVariant v);
CostVariant cost_from_name(const std::string& name);  // "j1" .. "j4"

enum class IpcaInit {
    RandomOrthonormal,  // seeded Gaussian matrix, rows orthonormalized by QR
    IdentityBlock       // the first m rows of the d x d identity
};

struct IpcaConfig {
    CostVariant cost = CostVariant::SquaredError;
    Metric metric = Metric::SymmetricKL;  // must be skl or hellinger
    double step = 0.5;        // gradient step mu; halved on backtracking
    double threshold = 1e-6;  // stop when |J_prev - J| <= threshold
    int max_iterations = 500;
    int reorthonormalize_every = 1;  // polar retraction cadence, in steps
    bool backtracking = true;        // refuse steps that increase the cost
    std::uint64_t seed = 0;          // for the random orthonormal start
    IpcaInit init = IpcaInit::RandomOrthonormal;
    /// Kernel width c for the exponential costs; unset = median off-diagonal
    /// ambient divergence (falling back to 1 if that median is zero).
    std::optional<double> kernel_constant;
};

struct IpcaResult {
    Eigen::MatrixXd projection;      // m x d with orthonormal rows
    std::vector<double> cost_trace;  // J at the start plus after every step
    int iterations = 0;
    bool converged = false;
    double kernel_constant = 0.0;  // the c actually used
};

/// Snapshot handed to the observer once per iteration, before the update:
/// the projection the gradient was evaluated at, the constrained descent
/// direction, and the current cost.
struct IpcaIterate {
    int iteration;
    const Eigen::MatrixXd& projection;
    const Eigen::MatrixXd& constrained_step;
    double cost;
};
using IpcaObserver = std::function<void(const IpcaIterate&)>;

/// Learn an m x d row-orthonormal projection that makes divergences between
/// the projected datasets match (or spread, depending on the cost) the
/// ambient ones: constrained gradient descent with a polar retraction back
/// onto the orthonormal manifold, recomputing projected divergences every
/// iteration.
IpcaResult ipca_fit(const Collection& data, Eigen::Index target_dim, const IpcaConfig& config,
                    const IpcaObserver& observer = nullptr);

/// Ambient variables ranked by how much the projection uses them: pairs of
/// (0-based variable index, Euclidean norm of that column of A), sorted by
/// descending weight, ties keeping the lower index first. Squared weights sum
/// to the projection's row count.
std::vector<std::pair<Eigen::Index, double>> variable_ranking(const Eigen::MatrixXd& projection);

// ---- building blocks, exposed for direct verification ----

/// T(1-T) dG/dT of the metric's integrand at t. Bhattacharya has no gradient
/// weight and is rejected.
double dG_dT_weighted(Metric metric, double t);

/// Intermediates of one evaluation-set/center-set pairing inside the
/// divergence gradient, retained for inspection.
struct GradientWorkspace {
    Eigen::MatrixXd kernel;          // Gaussian kernel values, entries in (0, 1]
    Eigen::MatrixXd row_normalized;  // kernel rows rescaled to sum to 1
    Eigen::MatrixXd weighted;        // diag(per-point weights) * row_normalized
    Eigen::MatrixXd accumulator;     // m x d contribution to the gradient
};

/// Gradient of the divergence between two projected sample sets with respect
/// to the projection, holding the (projected-space) bandwidths fixed at the
/// supplied values. When `workspaces` is non-null it receives the four
/// pairings in the order (f,g), (f,f), (g,g), (g,f).
Eigen::MatrixXd divergence_gradient_fixed_bandwidth(
    const Eigen::MatrixXd& samples_f, const Eigen::MatrixXd& samples_g,
    const Eigen::MatrixXd& projection, const Eigen::VectorXd& bandwidth_f,
    const Eigen::VectorXd& bandwidth_g, Metric metric,
    std::vector<GradientWorkspace>* workspaces = nullptr);

/// Same, with bandwidths first refit on the projected samples and then held
/// fixed for the gradient itself.
Eigen::MatrixXd divergence_gradient(const Eigen::MatrixXd& samples_f,
                                    const Eigen::MatrixXd& samples_g,
                                    const Eigen::MatrixXd& projection, Metric metric);

double cost_value(CostVariant variant, const DistanceMatrix& full_distances,
                  const DistanceMatrix& projected_distances, double kernel_constant);

/// Gradient of the cost with respect to the projection: the projected
/// divergence matrix is recomputed at A, then per-pair divergence gradients
/// are combined with the cost's pair coefficients. Deterministic for any
/// thread count.
Eigen::MatrixXd cost_gradient(CostVariant variant, const Collection& collection,
                              const Eigen::MatrixXd& projection, Metric metric,
                              double kernel_constant, const DistanceMatrix& full_distances);

/// Project a raw gradient onto the tangent space of the row-orthonormal
/// manifold at A: G - (G A^T + A G^T) A / 2.
Eigen::MatrixXd constrain_gradient(const Eigen::MatrixXd& gradient,
                                   const Eigen::MatrixXd& projection);

/// Nearest row-orthonormal matrix, (M M^T)^(-1/2) M. Throws numerical_error
/// if M has (numerically) deficient row rank.
Eigen::MatrixXd polar_retract(const Eigen::MatrixXd& m);

}  // namespace infogeo
