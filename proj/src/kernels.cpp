#include "infogeo/kernels.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "infogeo/common.hpp"
#include "infogeo/threading.hpp"

namespace infogeo::kernels {

namespace {

// Per-row workers. Both the OpenMP fronts and the serial references call
// these, which is what makes the two variants bitwise interchangeable.

double row_log_kernel_sum(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& samples,
                          const Eigen::VectorXd& inv_bandwidth, Eigen::Index i,
                          Eigen::VectorXd& exponents) {
    const Eigen::Index m = samples.rows();
    for (Eigen::Index j = 0; j < m; ++j) {
        exponents(j) =
            -0.5 * ((queries.row(i) - samples.row(j)).transpose().cwiseProduct(inv_bandwidth))
                       .squaredNorm();
    }
    const double peak = exponents.maxCoeff();
    if (peak < -700.0) {
        // All terms underflow exp(); rescale so the sum keeps its leading
        // magnitude instead of degenerating to log(0).
        double s = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) s += std::exp(exponents(j) - peak);
        return peak + std::log(s);
    }
    double s = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) s += std::exp(exponents(j));
    return std::log(s);
}

void row_kernel_exponents(const Eigen::MatrixXd& rows, const Eigen::MatrixXd& cols,
                          const Eigen::VectorXd& inv_bandwidth, Eigen::Index i,
                          Eigen::MatrixXd& out) {
    for (Eigen::Index j = 0; j < cols.rows(); ++j) {
        out(i, j) = -0.5 * ((rows.row(i) - cols.row(j)).transpose().cwiseProduct(inv_bandwidth))
                              .squaredNorm();
    }
}

void row_softmax_one(const Eigen::MatrixXd& exponents, Eigen::Index i, Eigen::MatrixXd& out) {
    const double peak = exponents.row(i).maxCoeff();
    double s = 0.0;
    for (Eigen::Index j = 0; j < exponents.cols(); ++j) {
        const double e = std::exp(exponents(i, j) - peak);
        out(i, j) = e;
        s += e;
    }
    out.row(i) /= s;
}

Eigen::VectorXd dijkstra_from(const Eigen::MatrixXd& weights, Eigen::Index source) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const Eigen::Index n = weights.rows();
    Eigen::VectorXd dist = Eigen::VectorXd::Constant(n, inf);
    std::vector<char> settled(static_cast<std::size_t>(n), 0);

    using Entry = std::pair<double, Eigen::Index>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
    dist(source) = 0.0;
    frontier.emplace(0.0, source);

    while (!frontier.empty()) {
        const auto [d, u] = frontier.top();
        frontier.pop();
        if (settled[static_cast<std::size_t>(u)]) continue;  // stale queue entry
        settled[static_cast<std::size_t>(u)] = 1;
        for (Eigen::Index v = 0; v < n; ++v) {
            const double w = weights(u, v);
            if (settled[static_cast<std::size_t>(v)] || w == inf) continue;
            const double candidate = d + w;
            if (candidate < dist(v)) {
                dist(v) = candidate;
                frontier.emplace(candidate, v);
            }
        }
    }
    return dist;
}

void check_bandwidth(const Eigen::MatrixXd& points, const Eigen::VectorXd& inv_bandwidth) {
    if (inv_bandwidth.size() != points.cols())
        throw validation_error("bandwidth dimension " + std::to_string(inv_bandwidth.size()) +
                               " does not match point dimension " + std::to_string(points.cols()));
}

}  // namespace

Eigen::VectorXd log_kernel_sums(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& samples,
                                const Eigen::VectorXd& inv_bandwidth) {
    check_bandwidth(queries, inv_bandwidth);
    check_bandwidth(samples, inv_bandwidth);
    const Eigen::Index n = queries.rows();
    Eigen::VectorXd out(n);
#pragma omp parallel num_threads(threading::effective_threads())
    {
        Eigen::VectorXd scratch(samples.rows());
#pragma omp for schedule(static)
        for (Eigen::Index i = 0; i < n; ++i)
            out(i) = row_log_kernel_sum(queries, samples, inv_bandwidth, i, scratch);
    }
    return out;
}

Eigen::MatrixXd kernel_exponents(const Eigen::MatrixXd& rows, const Eigen::MatrixXd& cols,
                                 const Eigen::VectorXd& inv_bandwidth) {
    check_bandwidth(rows, inv_bandwidth);
    check_bandwidth(cols, inv_bandwidth);
    Eigen::MatrixXd out(rows.rows(), cols.rows());
#pragma omp parallel for schedule(static) num_threads(threading::effective_threads())
    for (Eigen::Index i = 0; i < rows.rows(); ++i)
        row_kernel_exponents(rows, cols, inv_bandwidth, i, out);
    return out;
}

Eigen::MatrixXd row_softmax(const Eigen::MatrixXd& exponents) {
    Eigen::MatrixXd out(exponents.rows(), exponents.cols());
#pragma omp parallel for schedule(static) num_threads(threading::effective_threads())
    for (Eigen::Index i = 0; i < exponents.rows(); ++i) row_softmax_one(exponents, i, out);
    return out;
}

void floyd_warshall(Eigen::MatrixXd& dist) {
    const Eigen::Index n = dist.rows();
    // Sweep until a full pass makes no update. One pass already yields
    // shortest paths in exact arithmetic; the rare extra pass settles
    // last-ulp differences between path sums associated in different orders,
    // making the result an exact fixed point (re-solving returns it bitwise).
    bool changed = true;
    while (changed) {
        changed = false;
        for (Eigen::Index k = 0; k < n; ++k)
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < n; ++j) {
                    const double via = dist(i, k) + dist(k, j);
                    if (via < dist(i, j)) {
                        dist(i, j) = via;
                        changed = true;
                    }
                }
    }
}

Eigen::MatrixXd dijkstra_all_pairs(const Eigen::MatrixXd& weights) {
    const Eigen::Index n = weights.rows();
    Eigen::MatrixXd out(n, n);
#pragma omp parallel for schedule(static) num_threads(threading::effective_threads())
    for (Eigen::Index s = 0; s < n; ++s) out.row(s) = dijkstra_from(weights, s).transpose();
    return out;
}

namespace serial {

Eigen::VectorXd log_kernel_sums(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& samples,
                                const Eigen::VectorXd& inv_bandwidth) {
    check_bandwidth(queries, inv_bandwidth);
    check_bandwidth(samples, inv_bandwidth);
    Eigen::VectorXd out(queries.rows());
    Eigen::VectorXd scratch(samples.rows());
    for (Eigen::Index i = 0; i < queries.rows(); ++i)
        out(i) = row_log_kernel_sum(queries, samples, inv_bandwidth, i, scratch);
    return out;
}

Eigen::MatrixXd kernel_exponents(const Eigen::MatrixXd& rows, const Eigen::MatrixXd& cols,
                                 const Eigen::VectorXd& inv_bandwidth) {
    check_bandwidth(rows, inv_bandwidth);
    check_bandwidth(cols, inv_bandwidth);
    Eigen::MatrixXd out(rows.rows(), cols.rows());
    for (Eigen::Index i = 0; i < rows.rows(); ++i)
        row_kernel_exponents(rows, cols, inv_bandwidth, i, out);
    return out;
}

Eigen::MatrixXd row_softmax(const Eigen::MatrixXd& exponents) {
    Eigen::MatrixXd out(exponents.rows(), exponents.cols());
    for (Eigen::Index i = 0; i < exponents.rows(); ++i) row_softmax_one(exponents, i, out);
    return out;
}

Eigen::MatrixXd dijkstra_all_pairs(const Eigen::MatrixXd& weights) {
    const Eigen::Index n = weights.rows();
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index s = 0; s < n; ++s) out.row(s) = dijkstra_from(weights, s).transpose();
    return out;
}

}  // namespace serial

}  // namespace infogeo::kernels
