#include "esrisk/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "esrisk/estimators.hpp"
#include "esrisk/rng.hpp"
#include "esrisk/simulation.hpp"

namespace esrisk {

namespace {

// Bounded uniform index by rejection; unbiased and platform-stable.
std::size_t uniform_index(Xoshiro256pp& rng, std::size_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x = rng.next();
    while (x >= limit) x = rng.next();
    return static_cast<std::size_t>(x % bound);
}

}  // namespace

BootstrapReport bootstrap_es(std::span<const double> sample, double alpha,
                             std::size_t replicates, std::uint64_t seed,
                             const std::function<double(double)>& reference_cdf,
                             std::string reference_description) {
    if (sample.empty()) throw std::domain_error("bootstrap_es: empty sample");
    if (replicates < 1) throw std::invalid_argument("bootstrap_es: need at least one replicate");
    const std::size_t n = sample.size();
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    const double es_hat = contrast_es(sample, alpha);

    BootstrapReport report;
    report.method = ResampleMethod::n_out_of_n;
    report.block_size = n;
    report.replicates = replicates;
    report.reference = std::move(reference_description);
    report.degenerate = replicates < 2;
    report.rescaled_sorted.resize(replicates);

    std::vector<double> resample(n);
    for (std::size_t b = 0; b < replicates; ++b) {
        Xoshiro256pp rng(replication_seed(seed, 0, b));
        for (std::size_t j = 0; j < n; ++j) resample[j] = sample[uniform_index(rng, n)];
        const double es_star = contrast_es_at(
            resample, alpha, empirical_quantile_inplace(resample, alpha));
        report.rescaled_sorted[b] = sqrt_n * (es_star - es_hat);
    }
    std::sort(report.rescaled_sorted.begin(), report.rescaled_sorted.end());
    report.ks = ks_distance(report.rescaled_sorted, reference_cdf);
    return report;
}

BootstrapReport subsample_quantile(std::span<const double> sample, double alpha,
                                   std::size_t subsample_size, std::size_t replicates,
                                   std::uint64_t seed, double rate_exponent,
                                   const std::function<double(double)>& reference_cdf,
                                   std::string reference_description,
                                   std::optional<double> center) {
    if (sample.empty()) throw std::domain_error("subsample_quantile: empty sample");
    const std::size_t n = sample.size();
    if (subsample_size < 1 || subsample_size > n) {
        throw std::domain_error("subsample_quantile: need 1 <= b <= n");
    }
    if (replicates < 1) {
        throw std::invalid_argument("subsample_quantile: need at least one replicate");
    }
    const double q_hat = center.value_or(empirical_quantile(sample, alpha));
    const double a_b = std::pow(static_cast<double>(subsample_size), rate_exponent);

    BootstrapReport report;
    report.method = ResampleMethod::subsample;
    report.block_size = subsample_size;
    report.replicates = replicates;
    report.reference = std::move(reference_description);
    report.degenerate = replicates < 2;
    report.rescaled_sorted.resize(replicates);

    std::vector<std::size_t> indices(n);
    std::vector<double> sub(subsample_size);
    for (std::size_t b = 0; b < replicates; ++b) {
        Xoshiro256pp rng(replication_seed(seed, 1, b));
        std::iota(indices.begin(), indices.end(), std::size_t{0});
        // partial Fisher-Yates: the first b entries are a uniform
        // without-replacement draw
        for (std::size_t j = 0; j < subsample_size; ++j) {
            std::swap(indices[j], indices[j + uniform_index(rng, n - j)]);
            sub[j] = sample[indices[j]];
        }
        const double q_star = empirical_quantile_inplace(sub, alpha);
        report.rescaled_sorted[b] = a_b * (q_star - q_hat);
    }
    std::sort(report.rescaled_sorted.begin(), report.rescaled_sorted.end());
    report.ks = ks_distance(report.rescaled_sorted, reference_cdf);
    return report;
}

std::string bootstrap_csv(std::span<const BootstrapReport> reports) {
    std::string out = "method,block_size,replicates,ks,degenerate,reference\n";
    for (const BootstrapReport& r : reports) {
        out += r.method == ResampleMethod::n_out_of_n ? "n_out_of_n" : "subsample";
        out += ',';
        out += std::to_string(r.block_size);
        out += ',';
        out += std::to_string(r.replicates);
        out += ',';
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", r.ks);
        out += buf;
        out += ',';
        out += r.degenerate ? "yes" : "no";
        out += ',';
        out += r.reference;
        out += '\n';
    }
    return out;
}

}  // namespace esrisk
