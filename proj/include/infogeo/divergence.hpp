#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "infogeo/kde.hpp"

namespace infogeo {

/// Divergences measurable through the likelihood ratio T = f/(f+g).
enum class Metric {
    SymmetricKL,  // KL(f||g) + KL(g||f)
    KL,           // KL(f||g), the only asymmetric choice
    HellingerSq,  // integral of (sqrt f - sqrt g)^2, range [0, 2]
    Bhattacharya  // -log integral of sqrt(f g)
};

bool metric_is_symmetric(Metric m);
std::string metric_name(Metric m);
Metric metric_from_name(const std::string& name);  // "skl" | "kl" | "hellinger" | "bhattacharya"

/// T = fhat/(fhat+ghat) evaluated at both sample sets, stored together with
/// its complement 1-T. The pair is produced jointly from log fhat - log ghat,
/// so swapping f and g maps (t, complement) to (complement, t) exactly —
/// which is what makes the symmetric estimates below symmetric to the last
/// bit. Entries are clamped to [1e-12, 1 - 1e-12].
struct TValues {
    Eigen::VectorXd on_f;             // T at f's samples
    Eigen::VectorXd on_g;             // T at g's samples
    Eigen::VectorXd on_f_complement;  // 1-T at f's samples
    Eigen::VectorXd on_g_complement;
};

/// Clamped (t, 1-t) from a log-density ratio a = log fhat - log ghat. The
/// branch on the sign of `a` keeps the two outputs exchangeable under
/// a -> -a.
void canonical_sigmoid_pair(double a, double& t, double& u);

/// T at every center of both estimates. With a projection, both densities
/// are rebuilt on the projected centers (bandwidths recomputed there) and
/// evaluated in the projected space.
TValues t_values(const DensityEstimate& f_est, const DensityEstimate& g_est,
                 const std::optional<Eigen::MatrixXd>& projection = std::nullopt);

/// Divergence estimate from precomputed T values:
///   mean over f-samples of G(T) + mean over g-samples of G(T)
/// with G the integrand of the chosen metric, except Bhattacharya, which is
/// -log of the analogous sum of sqrt(T(1-T)) means.
double divergence_from_t(const TValues& t, Metric metric);

/// Nonparametric divergence between two sample sets (maximal-smoothing
/// bandwidths, optionally after projecting both sets).
double estimate_divergence(Metric metric, const Eigen::MatrixXd& f, const Eigen::MatrixXd& g,
                           const std::optional<Eigen::MatrixXd>& projection = std::nullopt);

/// Same, with caller-supplied per-coordinate bandwidths held fixed. Used
/// where repeated evaluations must not refit bandwidths.
double estimate_divergence_fixed_bandwidth(Metric metric, const Eigen::MatrixXd& f,
                                           const Eigen::MatrixXd& g,
                                           const Eigen::VectorXd& bandwidth_f,
                                           const Eigen::VectorXd& bandwidth_g);

/// Map a divergence value to an approximate Fisher information distance:
/// sqrt(value) for SymmetricKL, 2*sqrt(value) for HellingerSq (the estimator
/// returns squared Hellinger). The other metrics have no such scaling.
double fisher_approximation(Metric metric, double divergence_value);

/// Closed-form divergence between two Gaussians, used as a ground truth.
double gaussian_divergence_oracle(Metric metric, const Eigen::VectorXd& mean_1,
                                  const Eigen::MatrixXd& cov_1, const Eigen::VectorXd& mean_2,
                                  const Eigen::MatrixXd& cov_2);

}  // namespace infogeo
