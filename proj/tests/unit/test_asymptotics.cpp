#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "esrisk/asymptotics.hpp"
#include "esrisk/distributions.hpp"
#include "esrisk/math.hpp"
#include "oracles.hpp"

using namespace esrisk;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("psi from local expansions") {
    // kink: equal orders, slopes 8/5 and 1/5
    const auto [rate_k, psi_k] =
        psi_from_expansion(DistributionModel::kinked().local_expansion(0.2));
    CHECK(rate_k == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(psi_k.shape == PsiForm::Shape::two_sided_power);
    CHECK(psi_eval(psi_k, -1.0) == doctest::Approx(-0.2).epsilon(1e-15));
    CHECK(psi_eval(psi_k, 1.0) == doctest::Approx(1.6).epsilon(1e-15));

    // density root of order two: rate 1/6 and psi(t) = t^3/2
    const auto [rate_c, psi_c] =
        psi_from_expansion(DistributionModel::cubic().local_expansion(0.5));
    CHECK(rate_c == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(psi_eval(psi_c, 2.0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(psi_eval(psi_c, -2.0) == doctest::Approx(-4.0).epsilon(1e-15));

    // unequal orders degenerate the slower side
    const auto [rate_r, psi_r] = psi_from_expansion({1.0, 0.0, 2.0, -1.0});
    CHECK(rate_r == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(psi_r.shape == PsiForm::Shape::right_power);
    CHECK(psi_eval(psi_r, -0.1) == -kInf);
    CHECK(psi_eval(psi_r, 0.5) == doctest::Approx(0.5).epsilon(1e-15));

    const auto [rate_l, psi_l] = psi_from_expansion({0.0, 1.0, 2.0, -1.0});
    CHECK(rate_l == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(psi_l.shape == PsiForm::Shape::left_power);
    CHECK(psi_eval(psi_l, 0.1) == kInf);

    CHECK_THROWS_AS(psi_from_expansion({0.0, 0.0, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(psi_from_expansion({-1.5, 0.0, 1.0, -1.0}), std::invalid_argument);
}

TEST_CASE("psi inverse per shape") {
    const PsiForm cubic{PsiForm::Shape::two_sided_power, 0.5, 0.5, 3.0, 0, 0};
    CHECK(psi_inverse(cubic, 4.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(psi_inverse(cubic, 0.0) == 0.0);

    const PsiForm kink{PsiForm::Shape::two_sided_power, 1.6, 0.2, 1.0, 0, 0};
    CHECK(psi_inverse(kink, -0.2) == doctest::Approx(-1.0).epsilon(1e-15));

    const PsiForm right{PsiForm::Shape::right_power, 2.0, 0, 2.0, 0, 0};
    CHECK(psi_inverse(right, -3.0) == 0.0);
    CHECK(psi_inverse(right, 8.0) == doctest::Approx(2.0).epsilon(1e-15));

    const PsiForm left{PsiForm::Shape::left_power, 0, 2.0, 2.0, 0, 0};
    CHECK(psi_inverse(left, 3.0) == 0.0);
    CHECK(psi_inverse(left, -8.0) == doctest::Approx(-2.0).epsilon(1e-15));

    const PsiForm plateau{PsiForm::Shape::plateau, 0, 0, 0, 1.5, 0.75};
    CHECK(psi_inverse(plateau, -2.0) == -1.5);
    CHECK(psi_inverse(plateau, 0.0) == 0.0);
    CHECK(psi_inverse(plateau, 0.1) == 0.75);

    const PsiForm sign{PsiForm::Shape::sign_infinity, 0, 0, 0, 0, 0};
    for (double x : {-5.0, -0.1, 0.0, 0.1, 5.0}) CHECK(psi_inverse(sign, x) == 0.0);
}

TEST_CASE("psi inverse composes to the identity for invertible shapes") {
    const PsiForm shapes[] = {
        PsiForm{PsiForm::Shape::two_sided_power, 1.6, 0.2, 1.0, 0, 0},
        PsiForm{PsiForm::Shape::two_sided_power, 0.5, 0.5, 3.0, 0, 0},
        PsiForm{PsiForm::Shape::two_sided_power, 2.3, 0.7, 1.7, 0, 0}};
    for (const auto& psi : shapes) {
        for (int i = -40; i <= 40; ++i) {
            const double t = i / 10.0;
            CHECK(psi_inverse(psi, psi_eval(psi, t)) == doctest::Approx(t).epsilon(1e-10));
        }
    }
}

TEST_CASE("psi inverse is nondecreasing and vanishes at zero") {
    const PsiForm shapes[] = {
        PsiForm{PsiForm::Shape::two_sided_power, 1.6, 0.2, 1.0, 0, 0},
        PsiForm{PsiForm::Shape::right_power, 2.0, 0, 2.0, 0, 0},
        PsiForm{PsiForm::Shape::left_power, 0, 2.0, 2.0, 0, 0},
        PsiForm{PsiForm::Shape::plateau, 0, 0, 0, 1.0, 2.0},
        PsiForm{PsiForm::Shape::sign_infinity, 0, 0, 0, 0, 0}};
    for (const auto& psi : shapes) {
        CHECK(psi_inverse(psi, 0.0) == 0.0);
        double prev = -kInf;
        for (int i = -60; i <= 60; ++i) {
            const double v = psi_inverse(psi, i / 10.0);
            CHECK(v >= prev);
            prev = v;
        }
        CHECK(psi_eval(psi, 1e6) > 1e5);
        CHECK(psi_eval(psi, -1e6) < -1e5);
    }
}

TEST_CASE("joint covariance for the built-in models") {
    const auto sk = sigma_joint(DistributionModel::kinked(), 0.2);
    CHECK(sk[0][0] == doctest::Approx(4.0 / 25.0).epsilon(1e-15));
    CHECK(sk[0][1] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(sk[1][0] == sk[0][1]);
    CHECK(sk[1][1] == doctest::Approx(17.0 / 12.0).epsilon(1e-14));

    const auto sc = sigma_joint(DistributionModel::cubic(), 0.5);
    CHECK(sc[0][0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(sc[0][1] == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(sc[1][1] == doctest::Approx(51.0 / 80.0).epsilon(1e-14));

    // standard normal at the median, second moment from the quadrature oracle
    const auto normal = DistributionModel::standard_normal();
    const auto sn = sigma_joint(normal, 0.5);
    CHECK(sn[0][0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(sn[0][1] == doctest::Approx(0.5 * 0.7978845608028654).epsilon(1e-12));
    const double q = 0.0;
    const double es = normal.true_values(0.5).es_alpha;
    const double m2 = oracles::truncated_moment(normal, q, 2);
    const double var = (q * q * 0.5 - 2.0 * q * 0.5 * es + m2) / 0.25 - (q - es) * (q - es);
    CHECK(sn[1][1] == doctest::Approx(var).epsilon(1e-9));
}

TEST_CASE("sigma is symmetric positive semidefinite across levels") {
    for (const auto& m : {DistributionModel::kinked(), DistributionModel::cubic(),
                          DistributionModel::standard_normal()}) {
        for (double alpha : {0.05, 0.2, 0.4, 0.5, 0.7, 0.9}) {
            const auto s = sigma_joint(m, alpha);
            CHECK(s[0][0] == alpha * (1.0 - alpha));
            CHECK(s[0][1] == s[1][0]);
            const auto ev = symmetric_eigenvalues(
                Matrix{{s[0][0], s[0][1]}, {s[1][0], s[1][1]}});
            CHECK(ev.front() >= -1e-10);
        }
    }
}

TEST_CASE("multi-level covariance") {
    const auto model = DistributionModel::kinked();

    // single level reproduces the joint law bit for bit
    const auto single = sigma_multi(model, {0.2});
    const auto joint = sigma_joint(model, 0.2);
    CHECK(single.covariance[0][0] == joint[0][0]);
    CHECK(single.covariance[0][1] == joint[0][1]);
    CHECK(single.covariance[1][1] == joint[1][1]);

    const auto law = sigma_multi(model, {0.2, 0.5});
    // Cov(W1^s, W1^t) = min(alpha) - product
    CHECK(law.covariance[0][2] == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(law.covariance[2][0] == doctest::Approx(0.1).epsilon(1e-14));
    // diagonal blocks match the marginal laws
    for (std::size_t m = 0; m < 2; ++m) {
        const auto diag = law.marginals[m].sigma;
        CHECK(law.covariance[2 * m][2 * m] == diag[0][0]);
        CHECK(law.covariance[2 * m + 1][2 * m + 1] == diag[1][1]);
    }
    // symmetric and positive semidefinite
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(law.covariance[i][j] == law.covariance[j][i]);
        }
    }
    CHECK(symmetric_eigenvalues(law.covariance).front() >= -1e-9);

    CHECK_THROWS_AS(sigma_multi(model, {0.5, 0.2}), std::invalid_argument);
    CHECK_THROWS_AS(sigma_multi(model, {0.2, 0.2}), std::invalid_argument);
    CHECK_THROWS_AS(sigma_multi(model, {}), std::invalid_argument);
}

TEST_CASE("limit quantile CDF") {
    const auto kink_law = make_joint_law(DistributionModel::kinked(), 0.2);
    const double sigma1 = 0.4;
    for (double z : {-2.0, -0.7, -0.1}) {
        CHECK(limit_quantile_cdf(kink_law, z) ==
              doctest::Approx(norm_cdf(z * 0.2 / sigma1)).epsilon(1e-13));
    }
    for (double z : {0.1, 0.9}) {
        CHECK(limit_quantile_cdf(kink_law, z) ==
              doctest::Approx(norm_cdf(z * 1.6 / sigma1)).epsilon(1e-13));
    }
    CHECK(limit_quantile_cdf(kink_law, 1e12) == doctest::Approx(1.0));
    CHECK(limit_quantile_cdf(kink_law, -1e12) == doctest::Approx(0.0));

    const auto cubic_law = make_joint_law(DistributionModel::cubic(), 0.5);
    CHECK(limit_quantile_cdf(cubic_law, 1.0) ==
          doctest::Approx(norm_cdf(1.0)).epsilon(1e-13));

    // monotone in z
    for (const auto& law : {kink_law, cubic_law}) {
        double prev = 0.0;
        for (int i = -300; i <= 300; ++i) {
            const double v = limit_quantile_cdf(law, i / 100.0);
            CHECK(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("limit quantile CDF with one-sided and degenerate shapes") {
    JointLaw law;
    law.alpha = 0.2;
    law.sigma = Matrix2{{{0.16, 0.0}, {0.0, 1.0}}};
    law.psi = PsiForm{PsiForm::Shape::right_power, 2.0, 0, 2.0, 0, 0};
    CHECK(limit_quantile_cdf(law, -0.5) == 0.0);
    CHECK(limit_quantile_cdf(law, 0.0) == doctest::Approx(0.5));  // atom at zero
    CHECK(limit_quantile_cdf(law, 0.4) ==
          doctest::Approx(norm_cdf(2.0 * 0.16 / 0.4)).epsilon(1e-13));

    law.psi = PsiForm{PsiForm::Shape::left_power, 0, 2.0, 2.0, 0, 0};
    CHECK(limit_quantile_cdf(law, 0.0) == 1.0);
    CHECK(limit_quantile_cdf(law, -0.4) ==
          doctest::Approx(norm_cdf(-2.0 * 0.16 / 0.4)).epsilon(1e-13));

    law.psi = PsiForm{PsiForm::Shape::plateau, 0, 0, 0, 1.0, 2.0};
    CHECK(limit_quantile_cdf(law, -1.5) == 0.0);
    CHECK(limit_quantile_cdf(law, 0.0) == 0.5);
    CHECK(limit_quantile_cdf(law, 2.0) == 1.0);

    law.psi = PsiForm{PsiForm::Shape::sign_infinity, 0, 0, 0, 0, 0};
    CHECK(limit_quantile_cdf(law, -0.01) == 0.0);
    CHECK(limit_quantile_cdf(law, 0.0) == 1.0);
}

TEST_CASE("limit joint density") {
    const auto law = make_joint_law(DistributionModel::cubic(), 0.5);
    CHECK(limit_joint_density(law, 0.0, 0.3) == 0.0);  // Jacobian factor 3t^2/2

    // integrates to one over [-4,4]^2
    const double mass = integrate(
        [&](double t) {
            return integrate([&](double v) { return limit_joint_density(law, t, v); },
                             -4.0, 4.0, 64);
        },
        -4.0, 4.0, 64);
    CHECK(mass == doctest::Approx(1.0).epsilon(5e-3));

    // t-marginal matches the derivative of the limit CDF
    for (double t : {-1.2, -0.4, 0.6, 1.1}) {
        const double marginal = integrate(
            [&](double v) { return limit_joint_density(law, t, v); }, -6.0, 6.0, 128);
        const double fd = oracles::central_difference(
            [&](double z) { return limit_quantile_cdf(law, z); }, t, 1e-5);
        CHECK(marginal == doctest::Approx(fd).epsilon(1e-4));
    }

    const auto one_sided = psi_from_expansion({1.0, 0.0, 2.0, -1.0}).second;
    JointLaw bad = law;
    bad.psi = one_sided;
    CHECK_THROWS_AS((void)limit_joint_density(bad, 0.5, 0.5), std::invalid_argument);
}

TEST_CASE("limit joint CDF agrees with the integrated density") {
    const auto law = make_joint_law(DistributionModel::cubic(), 0.5);
    for (const auto& [t, v] : {std::pair{0.5, 0.3}, std::pair{-0.8, 1.0}}) {
        const double via_density = integrate(
            [&](double tt) {
                return integrate(
                    [&](double vv) { return limit_joint_density(law, tt, vv); }, -8.0, v,
                    128);
            },
            -4.0, t, 128);
        CHECK(limit_joint_cdf(law, t, v) == doctest::Approx(via_density).epsilon(1e-6));
    }
}

TEST_CASE("spectral limit variance") {
    const auto model = DistributionModel::kinked();
    const SpectralMeasure single({0.2}, {1.0});
    CHECK(spectral_limit_variance(model, single) ==
          doctest::Approx(17.0 / 12.0).epsilon(1e-14));

    // nearly degenerate weights reduce to the single-atom value
    const SpectralMeasure near({0.2, 0.4}, {1.0 - 1e-9, 1e-9});
    CHECK(spectral_limit_variance(model, near) ==
          doctest::Approx(17.0 / 12.0).epsilon(1e-6));

    // quadratic form p' C p spelled out
    const SpectralMeasure mu({0.2, 0.4}, {0.5, 0.5});
    const auto law = sigma_multi(model, {0.2, 0.4});
    const double direct = 0.25 * law.covariance[1][1] + 0.5 * law.covariance[1][3] +
                          0.25 * law.covariance[3][3];
    CHECK(spectral_limit_variance(model, mu) == doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("oracle variance gap") {
    CHECK(oracle_variance_gap(DistributionModel::kinked(), 0.2) == 0.0);
    CHECK(oracle_variance_gap(DistributionModel::cubic(), 0.5) ==
          doctest::Approx(0.5).epsilon(1e-15));
    CHECK(oracle_variance_gap(DistributionModel::kinked().shifted(-1.0), 0.2) ==
          doctest::Approx(-8.0).epsilon(1e-13));

    // equals the difference of the two tail variances built from moments
    for (const auto& m : {DistributionModel::kinked(), DistributionModel::cubic(),
                          DistributionModel::standard_normal(),
                          DistributionModel::kinked().shifted(-1.0)}) {
        for (double alpha : {0.1, 0.2, 0.35, 0.5, 0.75}) {
            const auto tv = m.true_values(alpha);
            const double var_feasible = sigma_joint(m, alpha)[1][1];
            const double m2 = m.truncated_moment(tv.q_alpha, 2);
            const double var_oracle =
                m2 / (alpha * alpha) - tv.es_alpha * tv.es_alpha;
            CHECK(std::abs(oracle_variance_gap(m, alpha) - (var_feasible - var_oracle)) <=
                  1e-10);
        }
    }
}
