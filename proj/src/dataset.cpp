#include "infogeo/dataset.hpp"

#include <Eigen/Cholesky>

#include "infogeo/common.hpp"
#include "infogeo/io.hpp"
#include "infogeo/rng.hpp"

namespace infogeo {

void Collection::validate() const {
    if (sets.size() < 2) throw validation_error("a collection needs at least two datasets");
    const Eigen::Index d = sets.front().dimension();
    for (std::size_t i = 0; i < sets.size(); ++i) {
        if (sets[i].size() < 2)
            throw validation_error("dataset " + std::to_string(i) + " has fewer than 2 rows");
        if (sets[i].dimension() != d)
            throw validation_error("inconsistent ambient dimension: set 0 has " + std::to_string(d) +
                                   " columns, set " + std::to_string(i) + " has " +
                                   std::to_string(sets[i].dimension()));
        if (!sets[i].samples.allFinite())
            throw validation_error("dataset " + std::to_string(i) + " has non-finite entries");
    }
}

Collection load_collection(const std::filesystem::path& manifest_path) {
    const auto entries = io::read_manifest(manifest_path);
    const auto base = manifest_path.parent_path();

    Collection c;
    for (const auto& e : entries) {
        std::filesystem::path p(e.path);
        if (p.is_relative()) p = base / p;
        DataSet ds;
        ds.samples = io::read_csv_matrix(p);
        ds.label = e.label;
        c.sets.push_back(std::move(ds));
    }
    c.validate();
    return c;
}

void save_collection(const Collection& c, const std::filesystem::path& manifest_path) {
    c.validate();
    const auto base = manifest_path.parent_path();
    const std::string stem = manifest_path.stem().string();

    std::vector<io::ManifestEntry> entries;
    for (std::size_t i = 0; i < c.sets.size(); ++i) {
        std::string name = stem + "_set" + std::to_string(i) + ".csv";
        io::write_csv_matrix(base / name, c.sets[i].samples);
        entries.push_back({name, c.sets[i].label});
    }
    io::write_manifest(manifest_path, entries);
}

Collection synth_gaussian_collection(const std::vector<Eigen::VectorXd>& means,
                                     const std::vector<Eigen::MatrixXd>& covariances,
                                     Eigen::Index n_per_set, std::uint64_t seed) {
    if (means.size() != covariances.size())
        throw validation_error("means and covariances differ in length");
    if (means.size() < 2) throw validation_error("a collection needs at least two datasets");
    if (n_per_set < 2) throw validation_error("n_per_set must be at least 2");

    const Eigen::Index d = means.front().size();
    for (std::size_t k = 0; k < means.size(); ++k) {
        if (means[k].size() != d)
            throw validation_error("mean " + std::to_string(k) + " has the wrong dimension");
        if (covariances[k].rows() != d || covariances[k].cols() != d)
            throw validation_error("covariance " + std::to_string(k) + " must be " +
                                   std::to_string(d) + "x" + std::to_string(d));
    }

    // One stream for the whole collection keeps the draw a pure function of
    // (means, covariances, n_per_set, seed), independent of caller batching.
    NormalSampler rng(seed);

    Collection c;
    for (std::size_t k = 0; k < means.size(); ++k) {
        Eigen::LLT<Eigen::MatrixXd> llt(covariances[k]);
        if (llt.info() != Eigen::Success) throw validation_error("covariance not positive definite");
        const Eigen::MatrixXd chol = llt.matrixL();

        DataSet ds;
        ds.samples.resize(n_per_set, d);
        Eigen::VectorXd z(d);
        for (Eigen::Index i = 0; i < n_per_set; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) z(j) = rng.next();
            ds.samples.row(i) = (means[k] + chol * z).transpose();
        }
        c.sets.push_back(std::move(ds));
    }
    return c;
}

}  // namespace infogeo
