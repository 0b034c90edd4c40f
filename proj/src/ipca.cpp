#include "infogeo/ipca.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "infogeo/common.hpp"
#include "infogeo/kde.hpp"
#include "infogeo/kernels.hpp"
#include "infogeo/rng.hpp"
#include "infogeo/threading.hpp"

namespace infogeo {

namespace {

// Sum_i w_i sum_j Wbar_ij (x_i - x_j)(x_i - x_j)^T expanded into four matrix
// products, where S = diag(w) Wbar. Rows of xa/xb are the ambient samples
// whose projections are the kernel evaluation points and centers.
Eigen::MatrixXd weighted_scatter(const Eigen::MatrixXd& xa, const Eigen::MatrixXd& xb,
                                 const Eigen::MatrixXd& s) {
    const Eigen::VectorXd row_sums = s.rowwise().sum();
    const Eigen::VectorXd col_sums = s.colwise().sum();
    const Eigen::MatrixXd cross = xa.transpose() * s * xb;
    return xa.transpose() * row_sums.asDiagonal() * xa - cross - cross.transpose() +
           xb.transpose() * col_sums.asDiagonal() * xb;
}

Eigen::VectorXd pair_weights(Metric metric, const Eigen::VectorXd& t) {
    Eigen::VectorXd w(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) w(i) = dG_dT_weighted(metric, t(i));
    return w;
}

std::vector<std::pair<Eigen::Index, Eigen::Index>> unordered_pairs(Eigen::Index n) {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    pairs.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    return pairs;
}

void validate_config(const IpcaConfig& config) {
    if (config.step <= 0.0) throw validation_error("step must be positive");
    if (config.threshold <= 0.0) throw validation_error("threshold must be positive");
    if (config.max_iterations < 1) throw validation_error("max_iterations must be at least 1");
    if (config.reorthonormalize_every < 1)
        throw validation_error("reorthonormalize_every must be at least 1");
    if (config.metric != Metric::SymmetricKL && config.metric != Metric::HellingerSq)
        throw validation_error("projection learning supports skl and hellinger only");
    if (config.kernel_constant && *config.kernel_constant <= 0.0)
        throw validation_error("kernel constant must be positive");
}

// Median off-diagonal entry of the ambient divergence matrix (even count:
// mean of the two central values), falling back to 1 when that median is not
// positive, e.g. for a collection of identical datasets.
double default_kernel_constant(const Eigen::MatrixXd& full) {
    std::vector<double> off;
    off.reserve(static_cast<std::size_t>(full.rows() * (full.rows() - 1) / 2));
    for (Eigen::Index i = 0; i < full.rows(); ++i)
        for (Eigen::Index j = i + 1; j < full.cols(); ++j) off.push_back(full(i, j));
    const auto mid = off.begin() + static_cast<std::ptrdiff_t>(off.size() / 2);
    std::nth_element(off.begin(), mid, off.end());
    double median = *mid;
    if (off.size() % 2 == 0) {
        const double below = *std::max_element(off.begin(), mid);
        median = 0.5 * (below + median);
    }
    return median > 0.0 ? median : 1.0;
}

double cost_value_raw(CostVariant variant, const Eigen::MatrixXd& full,
                      const Eigen::MatrixXd& proj, double c) {
    switch (variant) {
        case CostVariant::SquaredError: return (full - proj).squaredNorm();
        case CostVariant::KernelError:
            return ((-full / c).array().exp() - (-proj / c).array().exp()).matrix().squaredNorm();
        case CostVariant::NegativeSpread: return -proj.squaredNorm();
        case CostVariant::KernelMass: return (-proj / c).array().exp().matrix().squaredNorm();
    }
    throw validation_error("unknown cost");
}

// dJ/dDhat_ij for one ordered pair of datasets; each unordered pair
// contributes this coefficient twice (the matrices are symmetric).
double pair_coefficient(CostVariant variant, double d, double dhat, double c) {
    switch (variant) {
        case CostVariant::SquaredError: return 2.0 * (dhat - d);
        case CostVariant::KernelError:
            return (2.0 / c) * (std::exp(-d / c) - std::exp(-dhat / c)) * std::exp(-dhat / c);
        case CostVariant::NegativeSpread: return -2.0 * dhat;
        case CostVariant::KernelMass: return -(2.0 / c) * std::exp(-2.0 * dhat / c);
    }
    throw validation_error("unknown cost");
}

void check_cost_inputs(CostVariant variant, const Eigen::MatrixXd& full,
                       const Eigen::MatrixXd& proj, double c) {
    if (full.rows() != proj.rows() || full.cols() != proj.cols())
        throw validation_error("distance matrices have different shapes: " +
                               std::to_string(full.rows()) + "x" + std::to_string(full.cols()) +
                               " vs " + std::to_string(proj.rows()) + "x" +
                               std::to_string(proj.cols()));
    const bool uses_kernel =
        variant == CostVariant::KernelError || variant == CostVariant::KernelMass;
    if (uses_kernel && c <= 0.0)
        throw validation_error("kernel constant must be positive for the exponential costs");
}

// Shared core of cost_gradient and the fit loop: the caller supplies the
// projected divergence matrix already evaluated at this A.
Eigen::MatrixXd cost_gradient_impl(CostVariant variant, const Collection& collection,
                                   const Eigen::MatrixXd& projection, Metric metric, double c,
                                   const Eigen::MatrixXd& full, const Eigen::MatrixXd& hat) {
    const auto pairs = unordered_pairs(static_cast<Eigen::Index>(collection.size()));

    // Per-pair gradients land in their own slots in parallel; the weighted
    // reduction below runs serially in index order so the result does not
    // depend on the thread count.
    std::vector<Eigen::MatrixXd> slots(pairs.size());
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic) num_threads(threading::effective_threads())
#endif
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(pairs.size()); ++p) {
        const auto [i, j] = pairs[static_cast<std::size_t>(p)];
        slots[static_cast<std::size_t>(p)] =
            divergence_gradient(collection.sets[static_cast<std::size_t>(i)].samples,
                                collection.sets[static_cast<std::size_t>(j)].samples, projection,
                                metric);
    }

    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(projection.rows(), projection.cols());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto [i, j] = pairs[p];
        total += 2.0 * pair_coefficient(variant, full(i, j), hat(i, j), c) * slots[p];
    }
    return total;
}

}  // namespace

std::string cost_name(CostVariant v) {
    switch (v) {
        case CostVariant::SquaredError: return "j1";
        case CostVariant::KernelError: return "j2";
        case CostVariant::NegativeSpread: return "j3";
        case CostVariant::KernelMass: return "j4";
    }
    throw validation_error("unknown cost");
}

CostVariant cost_from_name(const std::string& name) {
    if (name == "j1") return CostVariant::SquaredError;
    if (name == "j2") return CostVariant::KernelError;
    if (name == "j3") return CostVariant::NegativeSpread;
    if (name == "j4") return CostVariant::KernelMass;
    throw validation_error("unknown cost \"" + name + "\" (expected j1, j2, j3, or j4)");
}

double dG_dT_weighted(Metric metric, double t) {
    const double u = 1.0 - t;
    switch (metric) {
        case Metric::HellingerSq: return std::sqrt(t * u) * (t - u);
        case Metric::KL: return t * u * (std::log(t) - std::log(u)) + t;
        case Metric::SymmetricKL: return 2.0 * t * u * (std::log(t) - std::log(u)) + (t - u);
        case Metric::Bhattacharya:
            throw validation_error("bhattacharya has no gradient weight; use skl or hellinger");
    }
    throw validation_error("unknown metric");
}

Eigen::MatrixXd divergence_gradient_fixed_bandwidth(
    const Eigen::MatrixXd& samples_f, const Eigen::MatrixXd& samples_g,
    const Eigen::MatrixXd& projection, const Eigen::VectorXd& bandwidth_f,
    const Eigen::VectorXd& bandwidth_g, Metric metric,
    std::vector<GradientWorkspace>* workspaces) {
    if (samples_f.cols() != projection.cols() || samples_g.cols() != projection.cols())
        throw validation_error("projection columns do not match the sample dimension");
    const Eigen::MatrixXd yf = samples_f * projection.transpose();
    const Eigen::MatrixXd yg = samples_g * projection.transpose();
    const TValues tv = t_values({yf, bandwidth_f}, {yg, bandwidth_g});

    const Eigen::VectorXd wf = pair_weights(metric, tv.on_f);
    const Eigen::VectorXd wg = pair_weights(metric, tv.on_g);

    const Eigen::VectorXd inv_hf = bandwidth_f.cwiseInverse();
    const Eigen::VectorXd inv_hg = bandwidth_g.cwiseInverse();
    const Eigen::VectorXd inv_hf2 = inv_hf.array().square();
    const Eigen::VectorXd inv_hg2 = inv_hg.array().square();

    if (workspaces) workspaces->clear();

    // Z(a, b) = (1/n_a) H_b^-1 A M(a, b): the pull of a's evaluation points
    // against b's kernel centers, with M the weighted scatter of the ambient
    // sample differences.
    const auto z_term = [&](const Eigen::MatrixXd& xa, const Eigen::MatrixXd& ya,
                            const Eigen::VectorXd& wa, const Eigen::MatrixXd& xb,
                            const Eigen::MatrixXd& yb, const Eigen::VectorXd& inv_hb,
                            const Eigen::VectorXd& inv_hb2) {
        const Eigen::MatrixXd exponents = kernels::kernel_exponents(ya, yb, inv_hb);
        const Eigen::MatrixXd softmax = kernels::row_softmax(exponents);
        const Eigen::MatrixXd s = wa.asDiagonal() * softmax;
        const Eigen::MatrixXd scatter = weighted_scatter(xa, xb, s);
        Eigen::MatrixXd z = inv_hb2.asDiagonal() * (projection * scatter) /
                            static_cast<double>(xa.rows());
        if (workspaces) {
            GradientWorkspace w;
            w.kernel = exponents.array().exp();
            w.row_normalized = softmax;
            w.weighted = s;
            w.accumulator = z;
            workspaces->push_back(std::move(w));
        }
        return z;
    };

    // Evaluated as four statements: operands of one big expression would run
    // in unspecified order and scramble the documented workspace sequence.
    const Eigen::MatrixXd z_fg = z_term(samples_f, yf, wf, samples_g, yg, inv_hg, inv_hg2);
    const Eigen::MatrixXd z_ff = z_term(samples_f, yf, wf, samples_f, yf, inv_hf, inv_hf2);
    const Eigen::MatrixXd z_gg = z_term(samples_g, yg, wg, samples_g, yg, inv_hg, inv_hg2);
    const Eigen::MatrixXd z_gf = z_term(samples_g, yg, wg, samples_f, yf, inv_hf, inv_hf2);
    return z_fg - z_ff + z_gg - z_gf;
}

Eigen::MatrixXd divergence_gradient(const Eigen::MatrixXd& samples_f,
                                    const Eigen::MatrixXd& samples_g,
                                    const Eigen::MatrixXd& projection, Metric metric) {
    if (samples_f.cols() != projection.cols() || samples_g.cols() != projection.cols())
        throw validation_error("projection columns do not match the sample dimension");
    const Eigen::MatrixXd yf = samples_f * projection.transpose();
    const Eigen::MatrixXd yg = samples_g * projection.transpose();
    return divergence_gradient_fixed_bandwidth(samples_f, samples_g, projection,
                                               max_smoothing_bandwidth(yf),
                                               max_smoothing_bandwidth(yg), metric);
}

double cost_value(CostVariant variant, const DistanceMatrix& full_distances,
                  const DistanceMatrix& projected_distances, double kernel_constant) {
    check_cost_inputs(variant, full_distances.values, projected_distances.values, kernel_constant);
    return cost_value_raw(variant, full_distances.values, projected_distances.values,
                          kernel_constant);
}

Eigen::MatrixXd cost_gradient(CostVariant variant, const Collection& collection,
                              const Eigen::MatrixXd& projection, Metric metric,
                              double kernel_constant, const DistanceMatrix& full_distances) {
    if (full_distances.values.rows() != static_cast<Eigen::Index>(collection.size()))
        throw validation_error("distance matrix size does not match the collection");
    const DistanceMatrix hat = pairwise_distances(collection, metric, projection);
    check_cost_inputs(variant, full_distances.values, hat.values, kernel_constant);
    return cost_gradient_impl(variant, collection, projection, metric, kernel_constant,
                              full_distances.values, hat.values);
}

Eigen::MatrixXd constrain_gradient(const Eigen::MatrixXd& gradient,
                                   const Eigen::MatrixXd& projection) {
    if (gradient.rows() != projection.rows() || gradient.cols() != projection.cols())
        throw validation_error("gradient and projection have different shapes");
    const Eigen::MatrixXd ga = gradient * projection.transpose();
    return gradient - 0.5 * (ga + ga.transpose()) * projection;
}

Eigen::MatrixXd polar_retract(const Eigen::MatrixXd& m) {
    const Eigen::MatrixXd gram = m * m.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) throw numerical_error("eigendecomposition failed");
    const Eigen::VectorXd& lambda = solver.eigenvalues();
    if (lambda.maxCoeff() <= 0.0 || lambda.minCoeff() <= lambda.maxCoeff() * 1e-24)
        throw numerical_error("cannot reorthonormalize a rank-deficient projection");
    const Eigen::VectorXd inv_sqrt = lambda.array().rsqrt();
    return solver.eigenvectors() * inv_sqrt.asDiagonal() * solver.eigenvectors().transpose() * m;
}

std::vector<std::pair<Eigen::Index, double>> variable_ranking(const Eigen::MatrixXd& projection) {
    std::vector<std::pair<Eigen::Index, double>> ranking;
    ranking.reserve(static_cast<std::size_t>(projection.cols()));
    for (Eigen::Index k = 0; k < projection.cols(); ++k)
        ranking.emplace_back(k, projection.col(k).norm());
    std::stable_sort(ranking.begin(), ranking.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return ranking;
}

IpcaResult ipca_fit(const Collection& data, Eigen::Index target_dim, const IpcaConfig& config,
                    const IpcaObserver& observer) {
    data.validate();
    const Eigen::Index d = data.dimension();
    if (target_dim < 1 || target_dim > d)
        throw validation_error("target dimension must be between 1 and the ambient dimension");
    validate_config(config);

    const DistanceMatrix full = pairwise_distances(data, config.metric);
    const double c =
        config.kernel_constant ? *config.kernel_constant : default_kernel_constant(full.values);

    Eigen::MatrixXd a;
    if (config.init == IpcaInit::IdentityBlock) {
        a = Eigen::MatrixXd::Identity(target_dim, d);
    } else {
        NormalSampler rng(config.seed);
        Eigen::MatrixXd raw(target_dim, d);
        for (Eigen::Index i = 0; i < target_dim; ++i)
            for (Eigen::Index j = 0; j < d; ++j) raw(i, j) = rng.next();
        // Thin QR of the transpose orthonormalizes the rows.
        const Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw.transpose());
        const Eigen::MatrixXd q =
            qr.householderQ() * Eigen::MatrixXd::Identity(d, target_dim);
        a = q.transpose();
    }

    DistanceMatrix hat = pairwise_distances(data, config.metric, a);
    double cost = cost_value_raw(config.cost, full.values, hat.values, c);

    IpcaResult result;
    result.kernel_constant = c;
    result.cost_trace.push_back(cost);

    for (int iter = 0; iter < config.max_iterations; ++iter) {
        const Eigen::MatrixXd gradient =
            cost_gradient_impl(config.cost, data, a, config.metric, c, full.values, hat.values);
        const Eigen::MatrixXd direction = constrain_gradient(gradient, a);
        if (observer) observer({iter, a, direction, cost});

        const bool retract_now = ((iter + 1) % config.reorthonormalize_every) == 0;
        Eigen::MatrixXd next_a;
        DistanceMatrix next_hat;
        double next_cost = 0.0;
        bool flat_stop = false;

        if ((direction.array() == 0.0).all()) {
            // Exact stationary point: keep A bit for bit instead of running
            // it through the retraction.
            next_a = a;
            next_hat = hat;
            next_cost = cost;
        } else {
            double mu = config.step;
            int halvings = 0;
            for (;;) {
                Eigen::MatrixXd candidate = a - mu * direction;
                if (retract_now) candidate = polar_retract(candidate);
                DistanceMatrix candidate_hat = pairwise_distances(data, config.metric, candidate);
                const double candidate_cost =
                    cost_value_raw(config.cost, full.values, candidate_hat.values, c);
                if (!config.backtracking || candidate_cost <= cost) {
                    next_a = std::move(candidate);
                    next_hat = std::move(candidate_hat);
                    next_cost = candidate_cost;
                    break;
                }
                if (++halvings >= 10) {
                    // Ten halvings without progress: the descent direction
                    // (whose bandwidths are frozen at A) no longer decreases
                    // the refit cost even for tiny steps. No further progress
                    // is possible, so keep the iterate and stop.
                    next_a = a;
                    next_hat = hat;
                    next_cost = cost;
                    flat_stop = true;
                    break;
                }
                mu *= 0.5;
            }
        }

        const double change = std::abs(cost - next_cost);
        a = std::move(next_a);
        hat = std::move(next_hat);
        cost = next_cost;
        result.cost_trace.push_back(cost);
        result.iterations = iter + 1;

        if (flat_stop || change <= config.threshold) {
            result.converged = true;
            break;
        }
    }

    // With sparse retraction cadences the last accepted step may not have
    // been retracted; restore the invariant without disturbing an iterate
    // that already satisfies it.
    const Eigen::Index m_rows = a.rows();
    if ((a * a.transpose() - Eigen::MatrixXd::Identity(m_rows, m_rows)).norm() > 1e-8)
        a = polar_retract(a);

    result.projection = std::move(a);
    return result;
}

}  // namespace infogeo
