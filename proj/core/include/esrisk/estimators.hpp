#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "esrisk/scoring.hpp"

namespace esrisk {

struct EstimateResult {
    double alpha;
    std::size_t n;
    double q_hat;
    double es_hat;        // minimum-contrast ES
    double empirical_es;  // plain tail average at q_hat
};

// Finitely supported spectral measure sum p_m * delta_{alpha_m}. The
// constructor sorts the atoms by level and validates: distinct levels in
// (0,1), positive weights summing to one within 1e-12.
class SpectralMeasure {
public:
    SpectralMeasure(std::vector<double> levels, std::vector<double> weights);
    const std::vector<double>& levels() const { return levels_; }
    const std::vector<double>& weights() const { return weights_; }
    std::size_t size() const { return levels_.size(); }

private:
    std::vector<double> levels_;
    std::vector<double> weights_;
};

// 1-based order-statistic index ceil(n*alpha), with a fuzz factor so that
// products like 1e6 * 0.2 do not round up past the intended integer.
std::size_t quantile_order_index(std::size_t n, double alpha);

// The ceil(n*alpha)-th order statistic, found by partial selection in O(n)
// expected time. The in-place overload permutes the buffer instead of
// copying it.
double empirical_quantile(std::span<const double> sample, double alpha);
double empirical_quantile_inplace(std::span<double> sample, double alpha);

// (alpha n)^{-1} sum 1_{X_i<=q_hat} X_i.
double empirical_es(std::span<const double> sample, double alpha);

// Closed-form minimum-contrast ES:
//   (1/alpha) E_n[Y 1_{Y<=q}] + q (1 - #{X_i<=q}/(alpha n)),  q = empirical quantile.
double contrast_es(std::span<const double> sample, double alpha);
double contrast_es_at(std::span<const double> sample, double alpha, double q_hat);

// Joint minimizer of sum_i S(x1,x2;X_i). The pinball part is minimized by
// the empirical quantile, the ES coordinate solved from the first-order
// condition; a Nelder-Mead search from (median, mean) must agree with the
// closed form to 1e-6 on es_hat, otherwise the scoring spec is reported as
// inconsistent (G' > 0 violated).
EstimateResult minimize_contrast(const ScoringSpec& spec, std::span<const double> sample);

// Root q of n^{-1} sum K((q-X_i)/h) = alpha for the Gaussian kernel CDF K,
// located to 1e-10 within [min-5h, max+5h].
double smoothed_quantile(std::span<const double> sample, double alpha, double h);

// (n alpha)^{-1} sum X_i K((q_tilde-X_i)/h), the kernel-smoothed tail
// average at the smoothed quantile.
double smoothed_es(std::span<const double> sample, double alpha, double h);

// sum p_m * contrast_es(sample, alpha_m).
double spectral_estimate(std::span<const double> sample, const SpectralMeasure& mu);

// sqrt(n) ((1/alpha) E_n[1_{Y<=q} (Y-q)] - es + q) around the true values;
// the closed-form minimizer of the local ES contrast process.
double un_minimizer(std::span<const double> sample, double alpha, double q_true,
                    double es_true);

}  // namespace esrisk
