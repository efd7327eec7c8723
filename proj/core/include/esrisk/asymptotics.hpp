#pragma once

#include <array>
#include <utility>
#include <vector>

#include "esrisk/distributions.hpp"
#include "esrisk/estimators.hpp"
#include "esrisk/math.hpp"

namespace esrisk {

// Canonical limit shapes for the local CDF expansion
// sqrt(n)(F(q + t/a_n) - alpha) -> psi(t). Coefficients follow the positive
// convention: the left branch evaluates as -kappa_minus * (-t)^beta.
struct PsiForm {
    enum class Shape { right_power, left_power, two_sided_power, plateau, sign_infinity };
    Shape shape = Shape::two_sided_power;
    double kappa_plus = 0.0;   // > 0 where present
    double kappa_minus = 0.0;  // > 0 where present
    double beta = 0.0;         // > 0
    double c1 = 0.0;           // plateau extents, >= 0
    double c2 = 0.0;
};

// psi(t) as an extended real (+-infinity encoded as the floating infinities).
double psi_eval(const PsiForm& psi, double t);

// The generalized inverse
//   x<0: inf{t<=0 : psi(t) >= x},  x=0: 0,  x>0: sup{t>=0 : psi(t) <= x},
// resolved per shape (one-sided forms collapse the degenerate side to 0).
double psi_inverse(const PsiForm& psi, double x);

// d psi/dt off the origin; defined for the invertible two-sided shape.
double psi_derivative(const PsiForm& psi, double t);

using Matrix2 = std::array<std::array<double, 2>, 2>;

// Joint limit law of (a_n(q_hat-q), sqrt(n)(es_hat-es)):
// (psi_inverse(W1), W2) with (W1,W2) ~ N(0, sigma) and a_n = n^rate_exponent.
struct JointLaw {
    double alpha = 0.0;
    double rate_exponent = 0.5;
    PsiForm psi;
    Matrix2 sigma{};
};

// Rate and psi shape implied by a local expansion: equal orders give the
// two-sided power with beta = r+1, unequal orders degenerate the slower side.
std::pair<double, PsiForm> psi_from_expansion(const LocalExpansion& exp);

// Covariance of (W1, W2):
//   [ alpha(1-alpha)            (1-alpha)(q-es)                 ]
//   [ (1-alpha)(q-es)           Var(1_{Y<=q}(q-Y))/alpha^2      ]
Matrix2 sigma_joint(const DistributionModel& model, double alpha);

JointLaw make_joint_law(const DistributionModel& model, double alpha);

struct MultiLevelLaw {
    std::vector<double> levels;
    std::vector<JointLaw> marginals;
    Matrix covariance;  // 2k x 2k, ordered (W_{1,1}, W_{1,2}, ..., W_{k,1}, W_{k,2})
};

// Full multi-level covariance; diagonal 2x2 blocks are checked against
// sigma_joint and a mismatch beyond 1e-9 reports an internal error.
MultiLevelLaw sigma_multi(const DistributionModel& model, std::vector<double> levels);

// P(psi_inverse(W1) <= z), including the atoms of the one-sided and plateau
// shapes.
double limit_quantile_cdf(const JointLaw& law, double z);

// Joint density of (psi_inverse(W1), W2) by change of variables,
// |psi'(t)| phi_sigma(psi(t), v); requires the invertible two-sided shape.
double limit_joint_density(const JointLaw& law, double t, double v);

// P(psi_inverse(W1) <= t, W2 <= v); two-sided shape only.
double limit_joint_cdf(const JointLaw& law, double t, double v);

// p' C p for the W2 covariance block C of sigma_multi at the measure's
// levels: the limit variance of sqrt(n)(spectral estimate - true value).
double spectral_limit_variance(const DistributionModel& model, const SpectralMeasure& mu);

// Var(1_{Y<=q}(q-Y)/alpha) - Var(1_{Y<=q}Y/alpha)
//   = (1-alpha)/alpha * q_alpha * (q_alpha - 2 es_alpha),
// the price (or gain) of plugging in the estimated quantile versus the
// oracle tail average.
double oracle_variance_gap(const DistributionModel& model, double alpha);

}  // namespace esrisk
