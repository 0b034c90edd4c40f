#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <fstream>

#include "infogeo/common.hpp"
#include "infogeo/dataset.hpp"
#include "support.hpp"

using namespace infogeo;
using testsupport::TempDir;

namespace {

Collection two_sets() {
    Collection c;
    c.sets.push_back({Eigen::MatrixXd::Random(5, 2), "a"});
    c.sets.push_back({Eigen::MatrixXd::Random(6, 2), "b"});
    return c;
}

}  // namespace

TEST_CASE("collection validation rejects degenerate shapes") {
    Collection c = two_sets();
    CHECK_NOTHROW(c.validate());

    Collection one;
    one.sets.push_back(c.sets[0]);
    CHECK_THROWS_AS(one.validate(), validation_error);

    Collection tiny = two_sets();
    tiny.sets[1].samples = Eigen::MatrixXd::Random(1, 2);
    CHECK_THROWS_AS(tiny.validate(), validation_error);

    Collection mixed = two_sets();
    mixed.sets[1].samples = Eigen::MatrixXd::Random(5, 3);
    CHECK_THROWS_AS(mixed.validate(), validation_error);

    Collection dirty = two_sets();
    dirty.sets[0].samples(2, 1) = std::nan("");
    CHECK_THROWS_AS(dirty.validate(), validation_error);
}

TEST_CASE("save and load round-trip a collection bitwise") {
    TempDir dir("dataset");
    const Collection c = two_sets();
    const auto manifest = dir.path() / "fix.json";
    save_collection(c, manifest);
    const Collection back = load_collection(manifest);
    REQUIRE(back.size() == c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        CHECK(back.sets[i].label == c.sets[i].label);
        REQUIRE(back.sets[i].samples.rows() == c.sets[i].samples.rows());
        CHECK((back.sets[i].samples.array() == c.sets[i].samples.array()).all());
    }
}

TEST_CASE("load_collection resolves sample paths relative to the manifest") {
    TempDir dir("dataset");
    std::filesystem::create_directories(dir.path() / "nested");
    const Collection c = two_sets();
    save_collection(c, dir.path() / "nested" / "fix.json");
    // Loading through a different working directory exercises the relative
    // resolution (the test process cwd is unrelated to dir).
    const Collection back = load_collection(dir.path() / "nested" / "fix.json");
    CHECK(back.size() == 2);
}

TEST_CASE("synthetic Gaussian collections are seeded and reproducible") {
    const std::vector<Eigen::VectorXd> means = {Eigen::Vector2d(0, 0), Eigen::Vector2d(3, -1)};
    const std::vector<Eigen::MatrixXd> covs = {Eigen::Matrix2d::Identity(),
                                               (Eigen::Matrix2d() << 2, 0.5, 0.5, 1).finished()};

    const Collection a = synth_gaussian_collection(means, covs, 500, 42);
    const Collection b = synth_gaussian_collection(means, covs, 500, 42);
    const Collection other = synth_gaussian_collection(means, covs, 500, 43);

    REQUIRE(a.size() == 2);
    CHECK((a.sets[0].samples.array() == b.sets[0].samples.array()).all());
    CHECK((a.sets[1].samples.array() == b.sets[1].samples.array()).all());
    CHECK_FALSE((a.sets[0].samples.array() == other.sets[0].samples.array()).all());
}

TEST_CASE("synthetic Gaussian moments match the requested parameters") {
    const std::vector<Eigen::VectorXd> means = {Eigen::Vector2d(1, -2), Eigen::Vector2d(0, 0)};
    const std::vector<Eigen::MatrixXd> covs = {(Eigen::Matrix2d() << 4, 1, 1, 2).finished(),
                                               Eigen::Matrix2d::Identity()};
    const Eigen::Index n = 20000;
    const Collection c = synth_gaussian_collection(means, covs, n, 7);

    const Eigen::VectorXd mean_hat = c.sets[0].samples.colwise().mean();
    CHECK(std::abs(mean_hat(0) - 1.0) < 0.1);
    CHECK(std::abs(mean_hat(1) + 2.0) < 0.1);

    const Eigen::MatrixXd centered = c.sets[0].samples.rowwise() - mean_hat.transpose();
    const Eigen::MatrixXd cov_hat = centered.transpose() * centered / static_cast<double>(n - 1);
    CHECK(std::abs(cov_hat(0, 0) - 4.0) < 0.3);
    CHECK(std::abs(cov_hat(0, 1) - 1.0) < 0.2);
    CHECK(std::abs(cov_hat(1, 1) - 2.0) < 0.2);
}

TEST_CASE("synthetic Gaussian validation") {
    const std::vector<Eigen::VectorXd> means = {Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)};
    std::vector<Eigen::MatrixXd> covs = {Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Identity()};

    CHECK_THROWS_AS((void)synth_gaussian_collection({means[0]}, {covs[0]}, 10, 0),
                    validation_error);
    CHECK_THROWS_AS((void)synth_gaussian_collection(means, {covs[0]}, 10, 0), validation_error);
    CHECK_THROWS_AS((void)synth_gaussian_collection(means, covs, 1, 0), validation_error);

    covs[1] = -Eigen::Matrix2d::Identity();
    CHECK_THROWS_AS((void)synth_gaussian_collection(means, covs, 10, 0), validation_error);
}
