#include "infogeo/divergence.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "infogeo/common.hpp"

namespace infogeo {

namespace {

constexpr double kTClamp = 1e-12;

// Integrand G(T) of each metric, written in terms of the pair (t, u) with
// u = 1-t. Each expression is invariant, bit for bit, under swapping t and u
// together with the sign flip of log t - log u; that carries the exact
// symmetry of the estimates.
double hellinger_term(double t, double u) {
    const double r = std::sqrt(t) - std::sqrt(u);
    return r * r;
}

double kl_term(double t, double u) { return t * (std::log(t) - std::log(u)); }

double symmetric_kl_term(double t, double u) { return (t - u) * (std::log(t) - std::log(u)); }

double mean_term(const Eigen::VectorXd& t, const Eigen::VectorXd& u,
                 double (*term)(double, double)) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < t.size(); ++i) s += term(t(i), u(i));
    return s / static_cast<double>(t.size());
}

void check_pair(const Eigen::MatrixXd& f, const Eigen::MatrixXd& g) {
    if (f.cols() != g.cols())
        throw validation_error("sample sets live in different dimensions: " +
                               std::to_string(f.cols()) + " vs " + std::to_string(g.cols()));
    if (f.rows() < 2 || g.rows() < 2)
        throw validation_error("divergence estimation needs at least two samples per set");
    if (!f.allFinite() || !g.allFinite())
        throw validation_error("sample sets contain non-finite values");
}

}  // namespace

bool metric_is_symmetric(Metric m) { return m != Metric::KL; }

std::string metric_name(Metric m) {
    switch (m) {
        case Metric::SymmetricKL: return "skl";
        case Metric::KL: return "kl";
        case Metric::HellingerSq: return "hellinger";
        case Metric::Bhattacharya: return "bhattacharya";
    }
    throw validation_error("unknown metric");
}

Metric metric_from_name(const std::string& name) {
    if (name == "skl") return Metric::SymmetricKL;
    if (name == "kl") return Metric::KL;
    if (name == "hellinger") return Metric::HellingerSq;
    if (name == "bhattacharya") return Metric::Bhattacharya;
    throw validation_error("unknown metric \"" + name +
                           "\" (expected skl, kl, hellinger, or bhattacharya)");
}

void canonical_sigmoid_pair(double a, double& t, double& u) {
    // sigma(a) and sigma(-a) computed from one exp so the pair is exact under
    // a -> -a; the naive 1/(1+exp(-a)) and 1 minus it are not.
    if (a >= 0.0) {
        const double e = std::exp(-a);
        const double den = 1.0 + e;
        t = 1.0 / den;
        u = e / den;
    } else {
        const double e = std::exp(a);
        const double den = 1.0 + e;
        t = e / den;
        u = 1.0 / den;
    }
    if (t < kTClamp) {
        t = kTClamp;
        u = 1.0 - kTClamp;
    } else if (u < kTClamp) {
        u = kTClamp;
        t = 1.0 - kTClamp;
    }
}

TValues t_values(const DensityEstimate& f_est, const DensityEstimate& g_est,
                 const std::optional<Eigen::MatrixXd>& projection) {
    check_pair(f_est.centers, g_est.centers);
    if (projection) {
        // Rebuild both estimates in the projected space; bandwidths belong to
        // that space, whatever the ambient estimates carried.
        const Eigen::MatrixXd yf = f_est.centers * projection->transpose();
        const Eigen::MatrixXd yg = g_est.centers * projection->transpose();
        return t_values(fit_density(yf), fit_density(yg));
    }

    const Eigen::VectorXd ratio_on_f =
        log_density(f_est, f_est.centers) - log_density(g_est, f_est.centers);
    const Eigen::VectorXd ratio_on_g =
        log_density(f_est, g_est.centers) - log_density(g_est, g_est.centers);

    TValues out;
    out.on_f.resize(ratio_on_f.size());
    out.on_f_complement.resize(ratio_on_f.size());
    out.on_g.resize(ratio_on_g.size());
    out.on_g_complement.resize(ratio_on_g.size());
    for (Eigen::Index i = 0; i < ratio_on_f.size(); ++i)
        canonical_sigmoid_pair(ratio_on_f(i), out.on_f(i), out.on_f_complement(i));
    for (Eigen::Index i = 0; i < ratio_on_g.size(); ++i)
        canonical_sigmoid_pair(ratio_on_g(i), out.on_g(i), out.on_g_complement(i));
    return out;
}

double divergence_from_t(const TValues& t, Metric metric) {
    switch (metric) {
        case Metric::HellingerSq:
            return mean_term(t.on_f, t.on_f_complement, hellinger_term) +
                   mean_term(t.on_g, t.on_g_complement, hellinger_term);
        case Metric::KL:
            return mean_term(t.on_f, t.on_f_complement, kl_term) +
                   mean_term(t.on_g, t.on_g_complement, kl_term);
        case Metric::SymmetricKL:
            return mean_term(t.on_f, t.on_f_complement, symmetric_kl_term) +
                   mean_term(t.on_g, t.on_g_complement, symmetric_kl_term);
        case Metric::Bhattacharya: {
            // -log of the affinity; equals -log(1 - hellinger/2) by construction.
            const auto affinity = [](double a, double b) { return std::sqrt(a * b); };
            const double s = mean_term(t.on_f, t.on_f_complement, affinity) +
                             mean_term(t.on_g, t.on_g_complement, affinity);
            return -std::log(s);
        }
    }
    throw validation_error("unknown metric");
}

double estimate_divergence(Metric metric, const Eigen::MatrixXd& f, const Eigen::MatrixXd& g,
                           const std::optional<Eigen::MatrixXd>& projection) {
    check_pair(f, g);
    if (projection) {
        const Eigen::MatrixXd yf = f * projection->transpose();
        const Eigen::MatrixXd yg = g * projection->transpose();
        return divergence_from_t(t_values(fit_density(yf), fit_density(yg)), metric);
    }
    return divergence_from_t(t_values(fit_density(f), fit_density(g)), metric);
}

double estimate_divergence_fixed_bandwidth(Metric metric, const Eigen::MatrixXd& f,
                                           const Eigen::MatrixXd& g,
                                           const Eigen::VectorXd& bandwidth_f,
                                           const Eigen::VectorXd& bandwidth_g) {
    check_pair(f, g);
    return divergence_from_t(t_values({f, bandwidth_f}, {g, bandwidth_g}), metric);
}

double fisher_approximation(Metric metric, double divergence_value) {
    const double floored = std::max(divergence_value, 0.0);
    switch (metric) {
        case Metric::SymmetricKL: return std::sqrt(floored);
        case Metric::HellingerSq: return 2.0 * std::sqrt(floored);
        default:
            throw validation_error("Fisher scaling is defined only for skl and hellinger, not " +
                                   metric_name(metric));
    }
}

double gaussian_divergence_oracle(Metric metric, const Eigen::VectorXd& mean_1,
                                  const Eigen::MatrixXd& cov_1, const Eigen::VectorXd& mean_2,
                                  const Eigen::MatrixXd& cov_2) {
    const Eigen::Index d = mean_1.size();
    if (mean_2.size() != d || cov_1.rows() != d || cov_1.cols() != d || cov_2.rows() != d ||
        cov_2.cols() != d)
        throw validation_error("Gaussian parameters have inconsistent dimensions");

    const auto log_det_and_check = [](const Eigen::LLT<Eigen::MatrixXd>& llt) {
        if (llt.info() != Eigen::Success)
            throw validation_error("covariance not positive definite");
        return 2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
    };

    const Eigen::LLT<Eigen::MatrixXd> llt_1(cov_1), llt_2(cov_2);
    const double log_det_1 = log_det_and_check(llt_1);
    const double log_det_2 = log_det_and_check(llt_2);
    const Eigen::VectorXd delta = mean_2 - mean_1;

    // KL(N_from || N_to) in closed form.
    const auto kl = [&](const Eigen::LLT<Eigen::MatrixXd>& llt_to, double log_det_to,
                        const Eigen::MatrixXd& cov_from, double log_det_from) {
        const double trace = llt_to.solve(cov_from).trace();
        const double maha = delta.dot(llt_to.solve(delta));
        return 0.5 * (trace + maha - static_cast<double>(d) + log_det_to - log_det_from);
    };

    switch (metric) {
        case Metric::KL: return kl(llt_2, log_det_2, cov_1, log_det_1);
        case Metric::SymmetricKL:
            return kl(llt_2, log_det_2, cov_1, log_det_1) + kl(llt_1, log_det_1, cov_2, log_det_2);
        case Metric::Bhattacharya:
        case Metric::HellingerSq: {
            const Eigen::MatrixXd mid = 0.5 * (cov_1 + cov_2);
            const Eigen::LLT<Eigen::MatrixXd> llt_mid(mid);
            const double log_det_mid = log_det_and_check(llt_mid);
            const double bhatta = 0.125 * delta.dot(llt_mid.solve(delta)) +
                                  0.5 * (log_det_mid - 0.5 * (log_det_1 + log_det_2));
            if (metric == Metric::Bhattacharya) return bhatta;
            return 2.0 - 2.0 * std::exp(-bhatta);
        }
    }
    throw validation_error("unknown metric");
}

}  // namespace infogeo
