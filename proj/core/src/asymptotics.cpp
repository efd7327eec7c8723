#include "esrisk/asymptotics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace esrisk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_psi(const PsiForm& psi) {
    using Shape = PsiForm::Shape;
    switch (psi.shape) {
        case Shape::right_power:
            if (!(psi.kappa_plus > 0.0 && psi.beta > 0.0))
                throw std::invalid_argument("PsiForm: right power needs kappa_plus, beta > 0");
            break;
        case Shape::left_power:
            if (!(psi.kappa_minus > 0.0 && psi.beta > 0.0))
                throw std::invalid_argument("PsiForm: left power needs kappa_minus, beta > 0");
            break;
        case Shape::two_sided_power:
            if (!(psi.kappa_plus > 0.0 && psi.kappa_minus > 0.0 && psi.beta > 0.0))
                throw std::invalid_argument("PsiForm: two-sided power needs kappa_+, kappa_-, beta > 0");
            break;
        case Shape::plateau:
            if (!(psi.c1 >= 0.0 && psi.c2 >= 0.0))
                throw std::invalid_argument("PsiForm: plateau extents must be >= 0");
            break;
        case Shape::sign_infinity:
            break;
    }
}

}  // namespace

double psi_eval(const PsiForm& psi, double t) {
    using Shape = PsiForm::Shape;
    switch (psi.shape) {
        case Shape::right_power:
            return t < 0.0 ? -kInf : psi.kappa_plus * std::pow(t, psi.beta);
        case Shape::left_power:
            return t > 0.0 ? kInf : -psi.kappa_minus * std::pow(-t, psi.beta);
        case Shape::two_sided_power:
            return t > 0.0 ? psi.kappa_plus * std::pow(t, psi.beta)
                           : -psi.kappa_minus * std::pow(-t, psi.beta);
        case Shape::plateau:
            if (t < -psi.c1) return -kInf;
            if (t > psi.c2) return kInf;
            return 0.0;
        case Shape::sign_infinity:
            return t < 0.0 ? -kInf : (t > 0.0 ? kInf : 0.0);
    }
    return 0.0;
}

double psi_inverse(const PsiForm& psi, double x) {
    using Shape = PsiForm::Shape;
    if (x == 0.0) return 0.0;
    switch (psi.shape) {
        case Shape::right_power:
            return x < 0.0 ? 0.0 : std::pow(x / psi.kappa_plus, 1.0 / psi.beta);
        case Shape::left_power:
            return x > 0.0 ? 0.0 : -std::pow(-x / psi.kappa_minus, 1.0 / psi.beta);
        case Shape::two_sided_power:
            return x > 0.0 ? std::pow(x / psi.kappa_plus, 1.0 / psi.beta)
                           : -std::pow(-x / psi.kappa_minus, 1.0 / psi.beta);
        case Shape::plateau:
            return x < 0.0 ? -psi.c1 : psi.c2;
        case Shape::sign_infinity:
            return 0.0;
    }
    return 0.0;
}

double psi_derivative(const PsiForm& psi, double t) {
    if (psi.shape != PsiForm::Shape::two_sided_power) {
        throw std::invalid_argument("psi_derivative: shape is not invertible");
    }
    if (t > 0.0) return psi.kappa_plus * psi.beta * std::pow(t, psi.beta - 1.0);
    if (t < 0.0) return psi.kappa_minus * psi.beta * std::pow(-t, psi.beta - 1.0);
    if (psi.beta > 1.0) return 0.0;
    if (psi.beta == 1.0) return psi.kappa_plus;
    return kInf;
}

std::pair<double, PsiForm> psi_from_expansion(const LocalExpansion& exp) {
    if (!(exp.right_order > -1.0 && exp.left_order > -1.0)) {
        throw std::invalid_argument("psi_from_expansion: orders must exceed -1");
    }
    if (!(exp.kappa_plus > 0.0) || !(exp.kappa_minus < 0.0)) {
        throw std::invalid_argument(
            "psi_from_expansion: need kappa_plus > 0 and kappa_minus < 0");
    }
    const double r = exp.right_order;
    const double l = exp.left_order;
    PsiForm psi;
    if (std::abs(r - l) <= 1e-12) {
        psi.shape = PsiForm::Shape::two_sided_power;
        psi.kappa_plus = exp.kappa_plus;
        psi.kappa_minus = -exp.kappa_minus;
        psi.beta = r + 1.0;
        return {1.0 / (2.0 * (r + 1.0)), psi};
    }
    if (r > l) {
        psi.shape = PsiForm::Shape::right_power;
        psi.kappa_plus = exp.kappa_plus;
        psi.beta = r + 1.0;
        return {1.0 / (2.0 * (r + 1.0)), psi};
    }
    psi.shape = PsiForm::Shape::left_power;
    psi.kappa_minus = -exp.kappa_minus;
    psi.beta = l + 1.0;
    return {1.0 / (2.0 * (l + 1.0)), psi};
}

Matrix2 sigma_joint(const DistributionModel& model, double alpha) {
    const TrueRiskValues tv = model.true_values(alpha);
    const double q = tv.q_alpha;
    const double es = tv.es_alpha;
    const double m2 = model.truncated_moment(q, 2);
    Matrix2 s;
    s[0][0] = alpha * (1.0 - alpha);
    s[0][1] = s[1][0] = (1.0 - alpha) * (q - es);
    s[1][1] = (q * q * alpha - 2.0 * q * alpha * es + m2) / (alpha * alpha) -
              (q - es) * (q - es);
    return s;
}

JointLaw make_joint_law(const DistributionModel& model, double alpha) {
    JointLaw law;
    law.alpha = alpha;
    auto [rate, psi] = psi_from_expansion(model.local_expansion(alpha));
    validate_psi(psi);
    law.rate_exponent = rate;
    law.psi = psi;
    law.sigma = sigma_joint(model, alpha);
    return law;
}

MultiLevelLaw sigma_multi(const DistributionModel& model, std::vector<double> levels) {
    const std::size_t k = levels.size();
    if (k == 0) throw std::invalid_argument("sigma_multi: need at least one level");
    for (std::size_t i = 0; i < k; ++i) {
        if (!(levels[i] > 0.0 && levels[i] < 1.0))
            throw std::invalid_argument("sigma_multi: levels must lie in (0,1)");
        if (i > 0 && !(levels[i] > levels[i - 1]))
            throw std::invalid_argument("sigma_multi: levels must be distinct and sorted");
    }

    MultiLevelLaw law;
    law.levels = levels;
    law.marginals.reserve(k);
    std::vector<double> q(k), es(k);
    for (std::size_t m = 0; m < k; ++m) {
        law.marginals.push_back(make_joint_law(model, levels[m]));
        const TrueRiskValues tv = model.true_values(levels[m]);
        q[m] = tv.q_alpha;
        es[m] = tv.es_alpha;
    }

    law.covariance.assign(2 * k, std::vector<double>(2 * k, 0.0));
    for (std::size_t s = 0; s < k; ++s) {
        for (std::size_t t = 0; t < k; ++t) {
            const std::size_t lo = std::min(s, t);  // level of alpha_s ^ alpha_t
            const double as = levels[s];
            const double at = levels[t];
            const double amin = levels[lo];

            const double c11 = amin - as * at;

            // Expansion of E[(es_s-q_s+...)(es_t-q_t+...)]; the centering
            // makes the product term enter with a minus sign (s = t must
            // reduce to the marginal ES variance).
            const double m2 = model.truncated_moment(q[lo], 2);
            const double c22 = amin / (as * at) * (q[s] * q[t] - (q[s] + q[t]) * es[lo]) +
                               m2 / (as * at) - (es[s] - q[s]) * (es[t] - q[t]);

            const double c12 = amin / at * (q[t] - es[lo]) - as * (q[t] - es[t]);

            law.covariance[2 * s][2 * t] = c11;
            law.covariance[2 * s][2 * t + 1] = c12;
            law.covariance[2 * t + 1][2 * s] = c12;
            law.covariance[2 * s + 1][2 * t + 1] = c22;
        }
    }

    for (std::size_t m = 0; m < k; ++m) {
        const Matrix2& d = law.marginals[m].sigma;
        const double e00 = std::abs(law.covariance[2 * m][2 * m] - d[0][0]);
        const double e01 = std::abs(law.covariance[2 * m][2 * m + 1] - d[0][1]);
        const double e11 = std::abs(law.covariance[2 * m + 1][2 * m + 1] - d[1][1]);
        if (e00 > 1e-9 || e01 > 1e-9 || e11 > 1e-9) {
            throw std::runtime_error("sigma_multi: diagonal block disagrees with sigma_joint");
        }
        law.covariance[2 * m][2 * m] = d[0][0];
        law.covariance[2 * m][2 * m + 1] = law.covariance[2 * m + 1][2 * m] = d[0][1];
        law.covariance[2 * m + 1][2 * m + 1] = d[1][1];
    }
    return law;
}

double limit_quantile_cdf(const JointLaw& law, double z) {
    using Shape = PsiForm::Shape;
    const double s1 = std::sqrt(law.sigma[0][0]);
    switch (law.psi.shape) {
        case Shape::two_sided_power:
            return norm_cdf(psi_eval(law.psi, z) / s1);
        case Shape::right_power:
            // atom of mass 1/2 at 0 from the collapsed left side
            return z < 0.0 ? 0.0 : norm_cdf(psi_eval(law.psi, z) / s1);
        case Shape::left_power:
            return z >= 0.0 ? 1.0 : norm_cdf(psi_eval(law.psi, z) / s1);
        case Shape::plateau:
            if (z < -law.psi.c1) return 0.0;
            if (z >= law.psi.c2) return 1.0;
            return 0.5;
        case Shape::sign_infinity:
            return z < 0.0 ? 0.0 : 1.0;
    }
    return 0.0;
}

double limit_joint_density(const JointLaw& law, double t, double v) {
    if (law.psi.shape != PsiForm::Shape::two_sided_power) {
        throw std::invalid_argument("limit_joint_density: psi is not invertible");
    }
    const double s11 = law.sigma[0][0];
    const double s22 = law.sigma[1][1];
    const double s12 = law.sigma[0][1];
    const double det = s11 * s22 - s12 * s12;
    if (!(det > 0.0)) {
        throw std::invalid_argument("limit_joint_density: singular covariance");
    }
    const double w1 = psi_eval(law.psi, t);
    const double quad = (s22 * w1 * w1 - 2.0 * s12 * w1 * v + s11 * v * v) / det;
    const double phi = std::exp(-0.5 * quad) / (2.0 * std::numbers::pi * std::sqrt(det));
    return psi_derivative(law.psi, t) * phi;
}

double limit_joint_cdf(const JointLaw& law, double t, double v) {
    if (law.psi.shape != PsiForm::Shape::two_sided_power) {
        throw std::invalid_argument("limit_joint_cdf: psi is not invertible");
    }
    const double s1 = std::sqrt(law.sigma[0][0]);
    const double s2 = std::sqrt(law.sigma[1][1]);
    const double rho = law.sigma[0][1] / (s1 * s2);
    return binorm_cdf(psi_eval(law.psi, t) / s1, v / s2, rho);
}

double spectral_limit_variance(const DistributionModel& model, const SpectralMeasure& mu) {
    const MultiLevelLaw law = sigma_multi(model, mu.levels());
    const std::size_t k = mu.size();
    NeumaierSum acc;
    for (std::size_t s = 0; s < k; ++s) {
        for (std::size_t t = 0; t < k; ++t) {
            acc.add(mu.weights()[s] * mu.weights()[t] *
                    law.covariance[2 * s + 1][2 * t + 1]);
        }
    }
    return acc.value();
}

double oracle_variance_gap(const DistributionModel& model, double alpha) {
    const TrueRiskValues tv = model.true_values(alpha);
    return (1.0 - alpha) / alpha * tv.q_alpha * (tv.q_alpha - 2.0 * tv.es_alpha);
}

}  // namespace esrisk
