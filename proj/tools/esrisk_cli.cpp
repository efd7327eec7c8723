// Command line front end: reproducible simulation studies, point
// estimation, limit-law grids and resampling probes for quantile/ES
// estimators.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "config_file.hpp"
#include "esrisk/asymptotics.hpp"
#include "esrisk/csv.hpp"
#include "esrisk/distributions.hpp"
#include "esrisk/estimators.hpp"
#include "esrisk/math.hpp"
#include "esrisk/resampling.hpp"
#include "esrisk/rng.hpp"
#include "esrisk/simulation.hpp"

namespace fs = std::filesystem;
using namespace esrisk;
using esrisk_cli::ConfigError;
using esrisk_cli::ConfigFile;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;
constexpr int kCheckFailure = 4;

fs::path resolve_out_dir(const std::string& flag_value, const std::string& config_value) {
    if (!flag_value.empty()) return flag_value;
    if (!config_value.empty()) return config_value;
    if (const char* env = std::getenv("ESRISK_OUT_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return ".";
}

DistributionModel model_from_config(const ConfigFile& cfg) {
    const std::string kind = cfg.get_string("model.kind", "kinked");
    DistributionModel model = kind == "piecewise"
        ? DistributionModel::piecewise_from_csv(cfg.get_string("model.table"))
        : DistributionModel::from_name(kind);
    if (cfg.has("model.shift")) model = model.shifted(cfg.get_double("model.shift"));
    return model;
}

const std::set<std::string> kSimulateKeys = {
    "model.kind", "model.table", "model.shift",
    "run.alpha",  "run.weights", "run.n",       "run.m",       "run.seed",
    "run.bandwidths", "run.smoothed", "run.empirical", "run.workers",
    "output.dir"};

ScoringSpec spec_by_name(const std::string& name, double alpha) {
    if (name == "logistic") return ScoringSpec::logistic(alpha);
    if (name == "exponential") return ScoringSpec::exponential(alpha);
    if (name == "corrupted") return ScoringSpec::corrupted(alpha);
    throw std::invalid_argument("unknown scoring spec '" + name +
                                "'; choose logistic, exponential or corrupted");
}

std::string stat_label(const std::string& estimator) {
    if (estimator.rfind("quantile_smoothed", 0) == 0) return "a_n (q_smooth - q)";
    if (estimator.rfind("quantile", 0) == 0) return "a_n (q_hat - q)" + estimator.substr(8);
    if (estimator.rfind("es_empirical", 0) == 0)
        return "rt(n)(es_emp - es)" + estimator.substr(12);
    if (estimator.rfind("es_smoothed", 0) == 0) return "rt(n)(es_smth - es)";
    if (estimator.rfind("es", 0) == 0) return "rt(n)(es_hat - es)" + estimator.substr(2);
    if (estimator == "spectral") return "rt(n)(nu_hat - nu)";
    return estimator;
}

void print_summary_table(const SimulationSummary& summary) {
    std::printf("model=%s  m=%zu  seed=%llu  levels=", summary.model_name.c_str(),
                summary.replications,
                static_cast<unsigned long long>(summary.master_seed));
    for (std::size_t i = 0; i < summary.levels.size(); ++i) {
        std::printf("%s%g", i == 0 ? "" : ",", summary.levels[i]);
    }
    std::printf("\n");
    if (summary.sizes.empty()) return;

    const auto& estimators = summary.sizes[0].stats;
    std::printf("%-6s%-24s", "", "");
    for (const auto& size : summary.sizes) std::printf("%12zu", size.n);
    std::printf("\n");

    const auto print_block = [&](const char* what, auto getter, auto defined) {
        bool first = true;
        for (std::size_t e = 0; e < estimators.size(); ++e) {
            std::printf("%-6s%-24s", first ? what : "", stat_label(estimators[e].estimator).c_str());
            first = false;
            for (const auto& size : summary.sizes) {
                if (defined(size.stats[e])) {
                    std::printf("%12.2f", getter(size.stats[e]));
                } else {
                    std::printf("%12s", "NA");
                }
            }
            std::printf("\n");
        }
    };
    print_block("mean", [](const EstimatorStats& s) { return s.mean; },
                [](const EstimatorStats&) { return true; });
    print_block("sd", [](const EstimatorStats& s) { return s.sd; },
                [](const EstimatorStats& s) { return s.sd_defined; });

    for (std::size_t e = 0; e < estimators.size(); ++e) {
        if (estimators[e].estimator.rfind("es", 0) != 0 ||
            estimators[e].estimator.rfind("es_empirical", 0) == 0) {
            continue;
        }
        std::printf("corr  %-24s", ("(quantile, " + estimators[e].estimator + ")").c_str());
        for (const auto& size : summary.sizes) {
            if (size.stats[e].corr_defined) {
                std::printf("%12.2f", size.stats[e].corr);
            } else {
                std::printf("%12s", "NA");
            }
        }
        std::printf("\n");
    }
}

int cmd_simulate(const std::string& config_path, std::optional<std::uint64_t> seed_override,
                 std::optional<int> workers_override, const std::string& out_flag) {
    const ConfigFile file = ConfigFile::parse(config_path, kSimulateKeys);
    SimulationConfig cfg;
    cfg.model = model_from_config(file);
    cfg.levels = file.get_double_list("run.alpha");
    if (file.has("run.weights")) cfg.weights = file.get_double_list("run.weights");
    cfg.sample_sizes = file.get_uint_list("run.n");
    cfg.replications = file.get_uint("run.m");
    cfg.master_seed = file.has("run.seed") ? file.get_uint("run.seed") : 1;
    if (file.has("run.bandwidths") && file.get_bool("run.smoothed", true)) {
        cfg.bandwidths = file.get_double_list("run.bandwidths");
    }
    cfg.track_empirical = file.get_bool("run.empirical", true);
    cfg.workers = file.has("run.workers") ? static_cast<int>(file.get_uint("run.workers")) : 4;
    if (seed_override) cfg.master_seed = *seed_override;
    if (workers_override) cfg.workers = *workers_override;

    const fs::path out = resolve_out_dir(out_flag, file.get_string("output.dir"));
    const SimulationSummary summary = run_simulation(cfg);

    write_text_atomic(out / "summary.csv", summary_csv(summary));
    for (const auto& size : summary.sizes) {
        write_text_atomic(out / ("cdf_" + std::to_string(size.n) + ".csv"), cdf_csv(size));
    }
    print_summary_table(summary);
    std::printf("wrote %s\n", (out / "summary.csv").string().c_str());
    return kOk;
}

int cmd_estimate(const std::string& data_path, std::vector<double> alphas,
                 std::vector<double> weights, const std::string& model_name) {
    const std::vector<double> sample = load_sample(data_path);
    if (sample.empty()) throw std::invalid_argument("data file holds no observations");
    for (double a : alphas) {
        if (!(a > 0.0 && a < 1.0)) {
            throw std::invalid_argument("alpha must lie in (0,1)");
        }
    }
    std::optional<DistributionModel> model;
    if (!model_name.empty()) model = DistributionModel::from_name(model_name);

    nlohmann::json out;
    out["file"] = data_path;
    out["n"] = sample.size();
    nlohmann::json levels = nlohmann::json::array();
    for (double a : alphas) {
        nlohmann::json row;
        row["alpha"] = a;
        row["q_hat"] = empirical_quantile(sample, a);
        row["es_hat"] = contrast_es(sample, a);
        row["empirical_es"] = empirical_es(sample, a);
        if (model) {
            const double var = sigma_joint(*model, a)[1][1];
            row["se_es"] = std::sqrt(var / static_cast<double>(sample.size()));
        }
        levels.push_back(row);
    }
    out["levels"] = levels;
    if (!weights.empty()) {
        const SpectralMeasure mu(alphas, weights);
        nlohmann::json sp;
        sp["levels"] = mu.levels();
        sp["weights"] = mu.weights();
        sp["estimate"] = spectral_estimate(sample, mu);
        if (model) {
            const double var = spectral_limit_variance(*model, mu);
            sp["se"] = std::sqrt(var / static_cast<double>(sample.size()));
        }
        out["spectral"] = sp;
    }
    if (model) out["model"] = model->name();
    std::printf("%s\n", out.dump(2).c_str());
    return kOk;
}

int cmd_limits(const std::string& model_name, double alpha, double zmin, double zmax,
               double zstep, double grid_extent, double grid_step, bool selfcheck,
               const std::string& out_flag) {
    const DistributionModel model = DistributionModel::from_name(model_name);
    const JointLaw law = make_joint_law(model, alpha);
    const fs::path out = resolve_out_dir(out_flag, "");

    std::string cdf = "z,cdf\n";
    for (double z = zmin; z <= zmax + 1e-12; z += zstep) {
        cdf += format_double(z);
        cdf += ',';
        cdf += format_double(limit_quantile_cdf(law, z));
        cdf += '\n';
    }
    write_text_atomic(out / "limit_cdf.csv", cdf);
    std::printf("wrote %s\n", (out / "limit_cdf.csv").string().c_str());

    const bool invertible = law.psi.shape == PsiForm::Shape::two_sided_power;
    if (invertible) {
        std::string dens = "t,v,density\n";
        for (double t = -grid_extent; t <= grid_extent + 1e-12; t += grid_step) {
            for (double v = -grid_extent; v <= grid_extent + 1e-12; v += grid_step) {
                dens += format_double(t);
                dens += ',';
                dens += format_double(v);
                dens += ',';
                dens += format_double(limit_joint_density(law, t, v));
                dens += '\n';
            }
        }
        write_text_atomic(out / "joint_density.csv", dens);
        std::printf("wrote %s\n", (out / "joint_density.csv").string().c_str());
    } else {
        std::printf("psi is not invertible at this level; joint density grid skipped\n");
    }

    if (selfcheck) {
        if (!invertible) {
            std::fprintf(stderr, "selfcheck requires an invertible psi\n");
            return kCheckFailure;
        }
        const auto slice = [&](double t) {
            return integrate([&](double v) { return limit_joint_density(law, t, v); },
                             -4.0, 4.0, 64);
        };
        const double mass = integrate(slice, -4.0, 0.0, 64) + integrate(slice, 0.0, 4.0, 64);
        std::printf("selfcheck: density mass over [-4,4]^2 = %.6f\n", mass);
        if (std::abs(mass - 1.0) > 5e-3) {
            std::fprintf(stderr, "selfcheck failed: |mass - 1| > 5e-3\n");
            return kCheckFailure;
        }
    }
    return kOk;
}

int cmd_bootstrap(const std::string& data_path, const std::string& model_name,
                  std::size_t draw_n, double alpha, const std::string& method,
                  std::size_t replicates, std::size_t block, std::uint64_t seed,
                  bool center_true, const std::string& out_flag) {
    const DistributionModel model = DistributionModel::from_name(model_name);
    std::vector<double> sample;
    if (!data_path.empty()) {
        sample = load_sample(data_path);
    } else {
        if (draw_n == 0) {
            throw std::invalid_argument("either --data or --n must be given");
        }
        sample.resize(draw_n);
        Xoshiro256pp rng(replication_seed(seed, 99, 0));
        for (double& x : sample) x = model.sample(rng.uniform01());
    }

    BootstrapReport report;
    if (method == "bootstrap") {
        const double var = sigma_joint(model, alpha)[1][1];
        const double sd = std::sqrt(var);
        report = bootstrap_es(
            sample, alpha, replicates, seed,
            [sd](double x) { return norm_cdf(x / sd); },
            "N(0," + format_double(var) + ")");
    } else if (method == "subsample") {
        const JointLaw law = make_joint_law(model, alpha);
        std::size_t b = block;
        if (b == 0) {
            b = static_cast<std::size_t>(
                std::pow(static_cast<double>(sample.size()), 0.7));
        }
        std::optional<double> center;
        if (center_true) center = model.true_values(alpha).q_alpha;
        report = subsample_quantile(
            sample, alpha, b, replicates, seed, law.rate_exponent,
            [&law](double z) { return limit_quantile_cdf(law, z); },
            "limit law of a_n(q_hat - q), " + model_name, center);
    } else {
        throw std::invalid_argument("method must be 'bootstrap' or 'subsample'");
    }

    const fs::path out = resolve_out_dir(out_flag, "");
    write_text_atomic(out / "bootstrap.csv",
                      bootstrap_csv(std::vector<BootstrapReport>{report}));
    std::printf("method=%s n=%zu block=%zu B=%zu ks=%.4f reference=%s%s\n",
                method.c_str(), sample.size(), report.block_size, report.replicates,
                report.ks, report.reference.c_str(),
                report.degenerate ? " (degenerate)" : "");
    std::printf("wrote %s\n", (out / "bootstrap.csv").string().c_str());
    return kOk;
}

int cmd_identities(std::size_t trials, std::uint64_t seed, const std::string& spec_name) {
    const ScoringSpec spec = spec_by_name(spec_name, 0.2);
    Xoshiro256pp rng(seed);
    double worst = 0.0;
    for (std::size_t i = 0; i < trials; ++i) {
        const double x1 = 4.0 * rng.uniform01() - 2.0;
        const double y1 = 4.0 * rng.uniform01() - 2.0;
        const double x2 = 4.0 * rng.uniform01() - 2.0;
        const double y2 = 4.0 * rng.uniform01() - 2.0;
        const double z = 4.0 * rng.uniform01() - 2.0;
        worst = std::max(worst, score_increment_residual(spec, x1, y1, x2, y2, z));
    }
    std::printf("max residual over %zu trials: %.3e\n", trials, worst);
    if (worst > 1e-8) {
        std::fprintf(stderr, "identity check failed (residual > 1e-8)\n");
        return kCheckFailure;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantile / expected-shortfall estimation and asymptotics toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir, data_path, model_name, method = "bootstrap";
    std::string spec_name = "logistic";
    std::vector<double> alphas, weights;
    double alpha = 0.2;
    double zmin = -3.0, zmax = 3.0, zstep = 0.01;
    double grid_extent = 3.0, grid_step = 0.05;
    bool selfcheck = false, center_true = false;
    std::size_t trials = 1000, replicates = 2000, block = 0, draw_n = 0;
    std::uint64_t seed = 1;
    std::optional<std::uint64_t> seed_override;
    std::optional<int> workers_override;

    auto* simulate = app.add_subcommand("simulate", "run a replication study from a config file");
    simulate->add_option("--config", config_path, "config file")->required();
    simulate->add_option("--seed", [&](const CLI::results_t& r) {
        seed_override = std::stoull(r[0]);
        return true;
    }, "override the master seed");
    simulate->add_option("--workers", [&](const CLI::results_t& r) {
        workers_override = std::stoi(r[0]);
        return true;
    }, "override the worker count")->check(CLI::PositiveNumber);
    simulate->add_option("--out", out_dir, "output directory");

    auto* estimate = app.add_subcommand("estimate", "point estimates from a data file");
    estimate->add_option("--data", data_path, "sample file (CSV or whitespace separated)")
        ->required();
    estimate->add_option("--alpha", alphas, "levels in (0,1)")->required()->delimiter(',');
    estimate->add_option("--weights", weights, "spectral weights paired with --alpha")
        ->delimiter(',');
    estimate->add_option("--model", model_name, "built-in model for plug-in standard errors");

    auto* limits = app.add_subcommand("limits", "emit limit CDF and joint density grids");
    limits->add_option("--model", model_name, "built-in model name")->required();
    limits->add_option("--alpha", alpha, "level in (0,1)")->required();
    limits->add_option("--zmin", zmin, "CDF grid start");
    limits->add_option("--zmax", zmax, "CDF grid end");
    limits->add_option("--zstep", zstep, "CDF grid step")->check(CLI::PositiveNumber);
    limits->add_option("--grid-extent", grid_extent, "density grid half width");
    limits->add_option("--grid-step", grid_step, "density grid step")
        ->check(CLI::PositiveNumber);
    limits->add_flag("--selfcheck", selfcheck, "verify the density grid integrates to one");
    limits->add_option("--out", out_dir, "output directory");

    auto* bootstrap = app.add_subcommand("bootstrap", "bootstrap / subsampling probes");
    bootstrap->add_option("--data", data_path, "sample file; omit to draw from the model");
    bootstrap->add_option("--model", model_name, "built-in model (reference law)")->required();
    bootstrap->add_option("--n", draw_n, "sample size when drawing from the model");
    bootstrap->add_option("--alpha", alpha, "level in (0,1)");
    bootstrap->add_option("--method", method, "bootstrap | subsample");
    bootstrap->add_option("--B", replicates, "number of resamples")->check(CLI::PositiveNumber);
    bootstrap->add_option("--b", block, "subsample size (default floor(n^0.7))");
    bootstrap->add_flag("--center-true", center_true,
                        "center subsample statistics at the true quantile");
    bootstrap->add_option("--seed", seed, "resampling seed");
    bootstrap->add_option("--out", out_dir, "output directory");

    auto* identities = app.add_subcommand("identities", "scoring-function identity check");
    identities->add_option("--trials", trials, "number of random tuples")
        ->check(CLI::PositiveNumber);
    identities->add_option("--seed", seed, "tuple seed");
    identities->add_option("--spec", spec_name, "logistic | exponential | corrupted");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kConfigError;
    }

    try {
        if (simulate->parsed()) {
            return cmd_simulate(config_path, seed_override, workers_override, out_dir);
        }
        if (estimate->parsed()) {
            return cmd_estimate(data_path, alphas, weights, model_name);
        }
        if (limits->parsed()) {
            return cmd_limits(model_name, alpha, zmin, zmax, zstep, grid_extent, grid_step,
                              selfcheck, out_dir);
        }
        if (bootstrap->parsed()) {
            return cmd_bootstrap(data_path, model_name, draw_n, alpha, method, replicates,
                                 block, seed, center_true, out_dir);
        }
        if (identities->parsed()) {
            return cmd_identities(trials, seed, spec_name);
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kRuntimeError;
    }
    return kConfigError;
}
