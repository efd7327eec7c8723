#include "esrisk/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "esrisk/math.hpp"

namespace esrisk {

namespace {

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double clamped_exp(double x) { return std::exp(std::min(x, 700.0)); }

}  // namespace

ScoringSpec ScoringSpec::logistic(double alpha) {
    ScoringSpec s;
    s.alpha = alpha;
    s.G = [](double x) { return sigmoid(x); };
    s.G_prime = [](double x) {
        const double g = sigmoid(x);
        return g * (1.0 - g);
    };
    s.G_double_prime = [](double x) {
        const double g = sigmoid(x);
        return g * (1.0 - g) * (1.0 - 2.0 * g);
    };
    s.calG = [](double x) { return softplus(x); };
    s.name = "logistic";
    return s;
}

ScoringSpec ScoringSpec::exponential(double alpha) {
    ScoringSpec s;
    s.alpha = alpha;
    s.G = clamped_exp;
    s.G_prime = clamped_exp;
    s.G_double_prime = clamped_exp;
    s.calG = clamped_exp;
    s.name = "exponential";
    return s;
}

ScoringSpec ScoringSpec::corrupted(double alpha) {
    ScoringSpec s = logistic(alpha);
    // Flip the sign of the reported derivative so the integral identities
    // cannot hold; mimics a user spec violating G' > 0.
    auto gp = s.G_prime;
    s.G_prime = [gp](double x) { return -gp(x); };
    s.name = "corrupted";
    return s;
}

double pinball(double alpha, double x, double y) {
    const double ind = y <= x ? 1.0 : 0.0;
    return (ind - alpha) * (x - y);
}

double score(const ScoringSpec& spec, double x1, double x2, double y) {
    const double pin = pinball(spec.alpha, x1, y);
    return pin + spec.G(x2) * (x2 + pin / spec.alpha) - spec.calG(x2) - spec.G(x2) * y;
}

double score_rearranged(const ScoringSpec& spec, double x1, double x2, double y) {
    const double pin = pinball(spec.alpha, x1, y);
    return (1.0 + spec.G(x2) / spec.alpha) * pin + spec.G(x2) * (x2 - y) - spec.calG(x2);
}

namespace {

// Oriented integral of 1_{s >= a} over [0, y].
double step_integral(double y, double a) {
    return std::max(y - a, 0.0) - std::max(-a, 0.0);
}

}  // namespace

double score_increment_residual(const ScoringSpec& spec, double x1, double y1,
                                double x2, double y2, double z) {
    const double alpha = spec.alpha;
    const double ind = z <= x1 ? 1.0 : 0.0;
    const double base = x2 - x1 + ind * (x1 - z) / alpha;
    const double g_diff = spec.G(x2 + y2) - spec.G(x2);

    // ES-coordinate increment, both printed forms.
    const double d_es = score(spec, x1, x2 + y2, z) - score(spec, x1, x2, z);
    // integrate() is oriented, so these are the signed integrals from 0 to y2.
    double int_gp = 0.0, int_gpp = 0.0;
    if (y2 != 0.0) {
        int_gp = integrate([&](double s) { return spec.G_prime(x2 + s) * s; }, 0.0, y2, 64);
        int_gpp = integrate([&](double s) { return spec.G_double_prime(x2 + s) * s * s; },
                            0.0, y2, 64);
    }
    const double rhs_a1 = g_diff * base + int_gp;
    const double rhs_a2 =
        g_diff * base + 0.5 * spec.G_prime(x2 + y2) * y2 * y2 - 0.5 * int_gpp;

    // Pinball increment with its exact step integral.
    const double d_rho = pinball(alpha, x1 + y1, z) - pinball(alpha, x1, z);
    const double a = z - x1;
    const double rho_rhs = y1 * (ind - alpha) + (step_integral(y1, a) - y1 * ind);

    // Full two-coordinate difference.
    const double d_full = score(spec, x1 + y1, x2 + y2, z) - score(spec, x1, x2, z);
    const double rhs_c = (1.0 + spec.G(x2 + y2) / alpha) * rho_rhs + g_diff * base +
                         0.5 * spec.G_prime(x2 + y2) * y2 * y2 - 0.5 * int_gpp;

    double res = std::abs(d_es - rhs_a1);
    res = std::max(res, std::abs(d_es - rhs_a2));
    res = std::max(res, std::abs(d_rho - rho_rhs));
    res = std::max(res, std::abs(d_full - rhs_c));
    return res;
}

}  // namespace esrisk
