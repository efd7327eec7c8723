#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "esrisk/asymptotics.hpp"
#include "esrisk/distributions.hpp"

namespace esrisk {

// Replication study configuration. Estimators are recomputed on fresh
// inverse-transform samples for every replication; each replication's RNG
// stream is derived from (master_seed, size index, replication index) only,
// so summaries are bit-identical for any worker count.
struct SimulationConfig {
    DistributionModel model = DistributionModel::kinked();
    std::vector<double> levels{0.2};       // strictly increasing
    std::vector<double> weights;           // optional spectral weights, same length
    std::vector<std::size_t> sample_sizes; // nonempty
    std::size_t replications = 1;
    std::uint64_t master_seed = 1;
    std::vector<double> bandwidths;        // optional, paired with sample_sizes
    bool track_empirical = true;
    int workers = 1;

    void validate() const;
};

struct EstimatorStats {
    std::string estimator;
    double mean = 0.0;
    double sd = 0.0;
    double corr = 0.0;        // of the matching (quantile, ES) pair
    bool sd_defined = false;
    bool corr_defined = false;
};

struct SizeSummary {
    std::size_t n = 0;
    double rate_exponent = 0.5;  // first level
    std::vector<EstimatorStats> stats;
    // Rescaled, centered values for the first level; the sorted arrays are
    // the empirical-CDF grids, the pairs keep replication order.
    std::vector<double> quantile_rescaled_sorted;
    std::vector<double> es_rescaled_sorted;
    std::vector<std::array<double, 2>> pairs;
};

struct SimulationSummary {
    std::string model_name;
    std::vector<double> levels;
    std::size_t replications = 0;
    std::uint64_t master_seed = 0;
    std::vector<SizeSummary> sizes;
};

SimulationSummary run_simulation(const SimulationConfig& cfg);

// summary.csv body (header n,estimator,mean,sd,corr; undefined entries "NA").
std::string summary_csv(const SimulationSummary& summary);
// cdf_<n>.csv body: sorted rescaled quantile and ES columns.
std::string cdf_csv(const SizeSummary& size);

// Two-sided Kolmogorov-Smirnov distance between the empirical CDF of sorted
// values and a reference CDF.
double ks_distance(std::span<const double> sorted_values,
                   const std::function<double(double)>& cdf);

// Largest gap between the empirical joint CDF of rescaled (quantile, ES)
// pairs and the limit joint law, over a grid_points^2 grid spanning
// +-3.5 marginal standard deviations.
double joint_cdf_discrepancy(std::span<const std::array<double, 2>> pairs,
                             const JointLaw& law, int grid_points = 17);

// Runs fn(0..count-1) on `workers` threads; outputs must be index-addressed.
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace esrisk
