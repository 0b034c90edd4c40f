#include "infogeo/distances.hpp"

#include "infogeo/common.hpp"

namespace infogeo {

DistanceMatrix pairwise_distances(const Collection& c, Metric metric,
                                  const std::optional<Eigen::MatrixXd>& projection,
                                  bool fisher_scale) {
    c.validate();
    if (!metric_is_symmetric(metric))
        throw validation_error("pairwise distances need a symmetric divergence; kl is not");
    if (fisher_scale && metric == Metric::Bhattacharya)
        throw validation_error("Fisher scaling is defined only for skl and hellinger, not " +
                               metric_name(metric));
    if (projection && projection->cols() != c.dimension())
        throw validation_error("projection has " + std::to_string(projection->cols()) +
                               " columns, expected " + std::to_string(c.dimension()));

    const auto n = static_cast<Eigen::Index>(c.size());
    DistanceMatrix out;
    out.kind = DistanceMatrix::Kind::Direct;
    out.values = Eigen::MatrixXd::Zero(n, n);

    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double div = estimate_divergence(metric, c.sets[static_cast<std::size_t>(i)].samples,
                                                   c.sets[static_cast<std::size_t>(j)].samples,
                                                   projection);
            const double value = fisher_scale ? fisher_approximation(metric, div) : div;
            out.values(i, j) = out.values(j, i) = value;
        }
    return out;
}

}  // namespace infogeo
