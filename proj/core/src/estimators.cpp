#include "esrisk/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "esrisk/math.hpp"

namespace esrisk {

namespace {

void require_sample(std::span<const double> sample) {
    if (sample.empty()) throw std::domain_error("estimator: sample must be nonempty");
}

void require_level(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::domain_error("estimator: alpha must lie in (0,1)");
    }
}

}  // namespace

SpectralMeasure::SpectralMeasure(std::vector<double> levels, std::vector<double> weights) {
    if (levels.size() != weights.size() || levels.empty()) {
        throw std::invalid_argument("SpectralMeasure: levels and weights must match and be nonempty");
    }
    std::vector<std::size_t> order(levels.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return levels[a] < levels[b]; });
    levels_.reserve(levels.size());
    weights_.reserve(levels.size());
    NeumaierSum total;
    for (std::size_t i : order) {
        const double a = levels[i];
        const double p = weights[i];
        if (!(a > 0.0 && a < 1.0)) {
            throw std::invalid_argument("SpectralMeasure: levels must lie in (0,1)");
        }
        if (!levels_.empty() && !(a > levels_.back())) {
            throw std::invalid_argument("SpectralMeasure: levels must be distinct");
        }
        if (!(p > 0.0)) throw std::invalid_argument("SpectralMeasure: weights must be positive");
        levels_.push_back(a);
        weights_.push_back(p);
        total.add(p);
    }
    if (std::abs(total.value() - 1.0) > 1e-12) {
        throw std::invalid_argument("SpectralMeasure: weights must sum to one");
    }
}

std::size_t quantile_order_index(std::size_t n, double alpha) {
    const double na = static_cast<double>(n) * alpha;
    const double fuzz = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, na);
    auto k = static_cast<long long>(std::ceil(na - fuzz));
    k = std::max(1ll, std::min(k, static_cast<long long>(n)));
    return static_cast<std::size_t>(k);
}

double empirical_quantile_inplace(std::span<double> sample, double alpha) {
    require_sample(sample);
    require_level(alpha);
    const std::size_t k = quantile_order_index(sample.size(), alpha);
    std::nth_element(sample.begin(), sample.begin() + (k - 1), sample.end());
    return sample[k - 1];
}

double empirical_quantile(std::span<const double> sample, double alpha) {
    std::vector<double> scratch(sample.begin(), sample.end());
    return empirical_quantile_inplace(scratch, alpha);
}

namespace {

struct TailSums {
    double sum;        // sum of X_i <= q
    std::size_t count; // #{X_i <= q}
};

TailSums tail_sums(std::span<const double> sample, double q) {
    NeumaierSum s;
    std::size_t count = 0;
    for (double x : sample) {
        if (x <= q) {
            s.add(x);
            ++count;
        }
    }
    return {s.value(), count};
}

}  // namespace

double empirical_es(std::span<const double> sample, double alpha) {
    require_sample(sample);
    require_level(alpha);
    const double q = empirical_quantile(sample, alpha);
    const TailSums t = tail_sums(sample, q);
    return t.sum / (alpha * static_cast<double>(sample.size()));
}

double contrast_es_at(std::span<const double> sample, double alpha, double q_hat) {
    const double n = static_cast<double>(sample.size());
    const TailSums t = tail_sums(sample, q_hat);
    const double tail_mean = t.sum / n;
    return tail_mean / alpha + q_hat * (1.0 - static_cast<double>(t.count) / (alpha * n));
}

double contrast_es(std::span<const double> sample, double alpha) {
    require_sample(sample);
    require_level(alpha);
    return contrast_es_at(sample, alpha, empirical_quantile(sample, alpha));
}

EstimateResult minimize_contrast(const ScoringSpec& spec, std::span<const double> sample) {
    require_sample(sample);
    require_level(spec.alpha);
    const double q_hat = empirical_quantile(sample, spec.alpha);
    const double es_closed = contrast_es_at(sample, spec.alpha, q_hat);

    const TailSums t = tail_sums(sample, q_hat);
    const double emp = t.sum / (spec.alpha * static_cast<double>(sample.size()));

    const double median = empirical_quantile(sample, 0.5);
    NeumaierSum mean_acc;
    for (double x : sample) mean_acc.add(x);
    const double mean = mean_acc.value() / static_cast<double>(sample.size());

    const auto objective = [&](const std::vector<double>& p) {
        NeumaierSum acc;
        for (double x : sample) acc.add(score(spec, p[0], p[1], x));
        return acc.value();
    };
    double spread = 0.0;
    for (double x : sample) spread = std::max(spread, std::abs(x - mean));
    const double step = std::max(0.5, 0.25 * spread);
    const NelderMeadResult nm =
        nelder_mead(objective, {median, mean}, step, 1e-10, 5000);

    if (std::abs(nm.x[1] - es_closed) > 1e-6) {
        throw std::runtime_error(
            "minimize_contrast: direct search disagrees with the closed form; "
            "the scoring spec violates its contract (G' > 0)");
    }
    return EstimateResult{spec.alpha, sample.size(), q_hat, es_closed, emp};
}

double smoothed_quantile(std::span<const double> sample, double alpha, double h) {
    require_sample(sample);
    require_level(alpha);
    if (!(h > 0.0)) throw std::domain_error("smoothed_quantile: bandwidth must be positive");
    const auto [mn_it, mx_it] = std::minmax_element(sample.begin(), sample.end());
    const double lo = *mn_it - 5.0 * h;
    const double hi = *mx_it + 5.0 * h;
    const double n = static_cast<double>(sample.size());
    const auto f = [&](double q) {
        NeumaierSum acc;
        for (double x : sample) acc.add(norm_cdf((q - x) / h));
        return acc.value() / n - alpha;
    };
    const auto df = [&](double q) {
        NeumaierSum acc;
        for (double x : sample) acc.add(norm_pdf((q - x) / h));
        return acc.value() / (n * h);
    };
    return solve_increasing(f, df, lo, hi, 1e-10);
}

double smoothed_es(std::span<const double> sample, double alpha, double h) {
    const double q = smoothed_quantile(sample, alpha, h);
    NeumaierSum acc;
    for (double x : sample) acc.add(x * norm_cdf((q - x) / h));
    return acc.value() / (alpha * static_cast<double>(sample.size()));
}

double spectral_estimate(std::span<const double> sample, const SpectralMeasure& mu) {
    require_sample(sample);
    NeumaierSum acc;
    for (std::size_t m = 0; m < mu.size(); ++m) {
        acc.add(mu.weights()[m] * contrast_es(sample, mu.levels()[m]));
    }
    return acc.value();
}

double un_minimizer(std::span<const double> sample, double alpha, double q_true,
                    double es_true) {
    require_sample(sample);
    require_level(alpha);
    NeumaierSum acc;
    for (double x : sample) {
        if (x <= q_true) acc.add(x - q_true);
    }
    const double n = static_cast<double>(sample.size());
    const double centered = acc.value() / (n * alpha) - es_true + q_true;
    return std::sqrt(n) * centered;
}

}  // namespace esrisk
