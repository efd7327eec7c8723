#include "esrisk/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "esrisk/csv.hpp"
#include "esrisk/estimators.hpp"
#include "esrisk/math.hpp"
#include "esrisk/rng.hpp"

namespace esrisk {

void SimulationConfig::validate() const {
    if (replications < 1) throw std::invalid_argument("config: replications must be >= 1");
    if (sample_sizes.empty()) throw std::invalid_argument("config: sample size list is empty");
    for (std::size_t n : sample_sizes) {
        if (n < 1) throw std::invalid_argument("config: sample sizes must be >= 1");
    }
    if (levels.empty()) throw std::invalid_argument("config: need at least one level");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(levels[i] > 0.0 && levels[i] < 1.0)) {
            throw std::invalid_argument("config: levels must lie in (0,1)");
        }
        if (i > 0 && !(levels[i] > levels[i - 1])) {
            throw std::invalid_argument("config: levels must be strictly increasing");
        }
    }
    if (!weights.empty()) {
        if (weights.size() != levels.size()) {
            throw std::invalid_argument("config: weights must pair with levels");
        }
        NeumaierSum sum;
        for (double w : weights) {
            if (!(w > 0.0)) throw std::invalid_argument("config: weights must be positive");
            sum.add(w);
        }
        if (std::abs(sum.value() - 1.0) > 1e-12) {
            throw std::invalid_argument("config: weights must sum to one");
        }
    }
    if (!bandwidths.empty() && bandwidths.size() != sample_sizes.size()) {
        throw std::invalid_argument("config: bandwidth list must pair with sample sizes");
    }
    for (double h : bandwidths) {
        if (!(h > 0.0)) throw std::invalid_argument("config: bandwidths must be positive");
    }
    if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
}

void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& fn) {
    const std::size_t nw = std::min<std::size_t>(std::max(workers, 1), count);
    if (nw <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nw);
    std::atomic<bool> failed{false};
    for (std::size_t w = 0; w < nw; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count || failed.load()) break;
                try {
                    fn(i);
                } catch (...) {
                    failed.store(true);
                    break;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failed.load()) throw std::runtime_error("parallel_for: worker task failed");
}

namespace {

std::string level_suffix(double level) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "_a%g", level);
    return buf;
}

EstimatorStats make_stats(std::string name, const RunningMoments& m,
                          const RunningCovariance* pair) {
    EstimatorStats s;
    s.estimator = std::move(name);
    s.mean = m.mean();
    s.sd_defined = m.sd_defined();
    if (s.sd_defined) s.sd = m.sd();
    if (pair != nullptr && pair->defined()) {
        const double c = pair->correlation();
        if (std::isfinite(c)) {
            s.corr = c;
            s.corr_defined = true;
        }
    }
    return s;
}

}  // namespace

SimulationSummary run_simulation(const SimulationConfig& cfg) {
    cfg.validate();
    const std::size_t k = cfg.levels.size();
    const std::size_t m = cfg.replications;
    const bool smoothing = !cfg.bandwidths.empty();
    const bool spectral = !cfg.weights.empty();
    const bool empirical = cfg.track_empirical;

    // per-replication value layout
    const std::size_t per_level = 2 + (empirical ? 1 : 0);
    const std::size_t cols = k * per_level + (smoothing ? 2 : 0) + (spectral ? 1 : 0);

    std::vector<double> q_true(k), es_true(k), rate(k);
    for (std::size_t lv = 0; lv < k; ++lv) {
        const TrueRiskValues tv = cfg.model.true_values(cfg.levels[lv]);
        q_true[lv] = tv.q_alpha;
        es_true[lv] = tv.es_alpha;
        rate[lv] = psi_from_expansion(cfg.model.local_expansion(cfg.levels[lv])).first;
    }
    double nu_true = 0.0;
    if (spectral) {
        for (std::size_t lv = 0; lv < k; ++lv) nu_true += cfg.weights[lv] * es_true[lv];
    }

    SimulationSummary summary;
    summary.model_name = cfg.model.name();
    summary.levels = cfg.levels;
    summary.replications = m;
    summary.master_seed = cfg.master_seed;

    for (std::size_t si = 0; si < cfg.sample_sizes.size(); ++si) {
        const std::size_t n = cfg.sample_sizes[si];
        const double sqrt_n = std::sqrt(static_cast<double>(n));
        std::vector<double> a_n(k);
        for (std::size_t lv = 0; lv < k; ++lv) {
            a_n[lv] = std::pow(static_cast<double>(n), rate[lv]);
        }
        const double h = smoothing ? cfg.bandwidths[si] : 0.0;

        std::vector<double> results(m * cols);
        parallel_for(m, cfg.workers, [&](std::size_t rep) {
            thread_local std::vector<double> buf;
            buf.resize(n);
            Xoshiro256pp rng(replication_seed(cfg.master_seed, si, rep));
            for (std::size_t j = 0; j < n; ++j) {
                buf[j] = cfg.model.sample(rng.uniform01());
            }
            double* row = results.data() + rep * cols;
            std::size_t c = 0;
            double nu_hat = 0.0;
            for (std::size_t lv = 0; lv < k; ++lv) {
                const double alpha = cfg.levels[lv];
                const double q_hat = empirical_quantile_inplace(buf, alpha);
                NeumaierSum tail;
                std::size_t count = 0;
                for (double x : buf) {
                    if (x <= q_hat) {
                        tail.add(x);
                        ++count;
                    }
                }
                const double nd = static_cast<double>(n);
                const double empirical_value = tail.value() / (alpha * nd);
                const double es_hat =
                    empirical_value + q_hat * (1.0 - static_cast<double>(count) / (alpha * nd));
                if (spectral) nu_hat += cfg.weights[lv] * es_hat;
                row[c++] = a_n[lv] * (q_hat - q_true[lv]);
                row[c++] = sqrt_n * (es_hat - es_true[lv]);
                if (empirical) row[c++] = sqrt_n * (empirical_value - es_true[lv]);
            }
            if (smoothing) {
                const double qs = smoothed_quantile(buf, cfg.levels[0], h);
                const double ess = smoothed_es(buf, cfg.levels[0], h);
                row[c++] = a_n[0] * (qs - q_true[0]);
                row[c++] = sqrt_n * (ess - es_true[0]);
            }
            if (spectral) row[c++] = sqrt_n * (nu_hat - nu_true);
        });

        // Sequential aggregation in replication order keeps summaries
        // bit-identical across worker counts.
        std::vector<RunningMoments> mom(cols);
        std::vector<RunningCovariance> pair_cov(k);   // (quantile, es) per level
        std::vector<RunningCovariance> emp_cov(k);    // (quantile, empirical es)
        RunningCovariance smooth_cov;
        for (std::size_t rep = 0; rep < m; ++rep) {
            const double* row = results.data() + rep * cols;
            for (std::size_t c = 0; c < cols; ++c) mom[c].add(row[c]);
            for (std::size_t lv = 0; lv < k; ++lv) {
                const std::size_t base = lv * per_level;
                pair_cov[lv].add(row[base], row[base + 1]);
                if (empirical) emp_cov[lv].add(row[base], row[base + 2]);
            }
            if (smoothing) {
                const std::size_t base = k * per_level;
                smooth_cov.add(row[base], row[base + 1]);
            }
        }

        SizeSummary size;
        size.n = n;
        size.rate_exponent = rate[0];
        for (std::size_t lv = 0; lv < k; ++lv) {
            const std::string suffix = k > 1 ? level_suffix(cfg.levels[lv]) : "";
            const std::size_t base = lv * per_level;
            size.stats.push_back(make_stats("quantile" + suffix, mom[base], &pair_cov[lv]));
            size.stats.push_back(make_stats("es" + suffix, mom[base + 1], &pair_cov[lv]));
            if (empirical) {
                size.stats.push_back(
                    make_stats("es_empirical" + suffix, mom[base + 2], &emp_cov[lv]));
            }
        }
        if (smoothing) {
            const std::size_t base = k * per_level;
            size.stats.push_back(make_stats("quantile_smoothed", mom[base], &smooth_cov));
            size.stats.push_back(make_stats("es_smoothed", mom[base + 1], &smooth_cov));
        }
        if (spectral) {
            size.stats.push_back(make_stats("spectral", mom[cols - 1], nullptr));
        }

        size.quantile_rescaled_sorted.resize(m);
        size.es_rescaled_sorted.resize(m);
        size.pairs.resize(m);
        for (std::size_t rep = 0; rep < m; ++rep) {
            const double* row = results.data() + rep * cols;
            size.quantile_rescaled_sorted[rep] = row[0];
            size.es_rescaled_sorted[rep] = row[1];
            size.pairs[rep] = {row[0], row[1]};
        }
        std::sort(size.quantile_rescaled_sorted.begin(), size.quantile_rescaled_sorted.end());
        std::sort(size.es_rescaled_sorted.begin(), size.es_rescaled_sorted.end());

        summary.sizes.push_back(std::move(size));
    }
    return summary;
}

std::string summary_csv(const SimulationSummary& summary) {
    std::string out = "n,estimator,mean,sd,corr\n";
    for (const SizeSummary& size : summary.sizes) {
        for (const EstimatorStats& s : size.stats) {
            out += std::to_string(size.n);
            out += ',';
            out += s.estimator;
            out += ',';
            out += format_double(s.mean);
            out += ',';
            out += s.sd_defined ? format_double(s.sd) : "NA";
            out += ',';
            out += s.corr_defined ? format_double(s.corr) : "NA";
            out += '\n';
        }
    }
    return out;
}

std::string cdf_csv(const SizeSummary& size) {
    std::string out = "quantile,es\n";
    for (std::size_t i = 0; i < size.quantile_rescaled_sorted.size(); ++i) {
        out += format_double(size.quantile_rescaled_sorted[i]);
        out += ',';
        out += format_double(size.es_rescaled_sorted[i]);
        out += '\n';
    }
    return out;
}

double ks_distance(std::span<const double> sorted_values,
                   const std::function<double(double)>& cdf) {
    if (sorted_values.empty()) throw std::domain_error("ks_distance: empty sample");
    const double n = static_cast<double>(sorted_values.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < sorted_values.size(); ++i) {
        const double f = cdf(sorted_values[i]);
        const double upper = (static_cast<double>(i) + 1.0) / n - f;
        const double lower = f - static_cast<double>(i) / n;
        ks = std::max(ks, std::max(upper, lower));
    }
    return ks;
}

double joint_cdf_discrepancy(std::span<const std::array<double, 2>> pairs,
                             const JointLaw& law, int grid_points) {
    if (pairs.empty()) throw std::domain_error("joint_cdf_discrepancy: empty sample");
    if (grid_points < 2) throw std::invalid_argument("joint_cdf_discrepancy: grid too small");
    const double s1 = std::sqrt(law.sigma[0][0]);
    const double s2 = std::sqrt(law.sigma[1][1]);
    const double t_lo = psi_inverse(law.psi, -3.5 * s1);
    const double t_hi = psi_inverse(law.psi, 3.5 * s1);
    const double v_lo = -3.5 * s2;
    const double v_hi = 3.5 * s2;
    const double mtot = static_cast<double>(pairs.size());
    double worst = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        const double t = t_lo + (t_hi - t_lo) * i / (grid_points - 1);
        for (int j = 0; j < grid_points; ++j) {
            const double v = v_lo + (v_hi - v_lo) * j / (grid_points - 1);
            std::size_t count = 0;
            for (const auto& p : pairs) {
                if (p[0] <= t && p[1] <= v) ++count;
            }
            const double emp = static_cast<double>(count) / mtot;
            worst = std::max(worst, std::abs(emp - limit_joint_cdf(law, t, v)));
        }
    }
    return worst;
}

}  // namespace esrisk
