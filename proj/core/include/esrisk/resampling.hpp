#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace esrisk {

enum class ResampleMethod { n_out_of_n, subsample };

struct BootstrapReport {
    ResampleMethod method = ResampleMethod::n_out_of_n;
    std::size_t block_size = 0;  // resample size (n, or b for subsampling)
    std::size_t replicates = 0;
    double ks = 0.0;             // distance of the resampling law to the reference
    std::string reference;
    bool degenerate = false;     // fewer than 2 replicates
    std::vector<double> rescaled_sorted;
};

// n-out-of-n bootstrap of the contrast ES: B resamples with replacement,
// the law of sqrt(n)(es* - es_hat) compared to reference_cdf by KS distance.
BootstrapReport bootstrap_es(std::span<const double> sample, double alpha,
                             std::size_t replicates, std::uint64_t seed,
                             const std::function<double(double)>& reference_cdf,
                             std::string reference_description);

// Without-replacement subsampling of the empirical quantile at size b:
// the law of b^rate (q*_b - center) compared to reference_cdf. The center
// defaults to the full-sample empirical quantile; pass the true quantile to
// probe the limit law directly (the default centering converges only as
// (b/n)^rate, which is slow for small rate exponents).
BootstrapReport subsample_quantile(std::span<const double> sample, double alpha,
                                   std::size_t subsample_size, std::size_t replicates,
                                   std::uint64_t seed, double rate_exponent,
                                   const std::function<double(double)>& reference_cdf,
                                   std::string reference_description,
                                   std::optional<double> center = std::nullopt);

// bootstrap.csv body for one or more reports.
std::string bootstrap_csv(std::span<const BootstrapReport> reports);

}  // namespace esrisk
