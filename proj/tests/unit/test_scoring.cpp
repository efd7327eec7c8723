#include <doctest.h>

#include <cmath>

#include "esrisk/math.hpp"
#include "esrisk/rng.hpp"
#include "esrisk/scoring.hpp"

using namespace esrisk;

TEST_CASE("score at the origin for the logistic spec") {
    const auto spec = ScoringSpec::logistic(0.5);
    CHECK(score(spec, 0.0, 0.0, 0.0) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("both printed score forms agree") {
    Xoshiro256pp rng(42);
    const auto spec = ScoringSpec::logistic(0.25);
    for (int i = 0; i < 1000; ++i) {
        const double x1 = 8.0 * rng.uniform01() - 4.0;
        const double x2 = 8.0 * rng.uniform01() - 4.0;
        const double y = 8.0 * rng.uniform01() - 4.0;
        CHECK(std::abs(score(spec, x1, x2, y) - score_rearranged(spec, x1, x2, y)) <= 1e-12);
    }
}

TEST_CASE("specification function contract") {
    for (const auto& spec : {ScoringSpec::logistic(0.2), ScoringSpec::exponential(0.2)}) {
        CHECK(spec.G(-50.0) <= 1e-12);  // G vanishes at -infinity
        for (double x = -6.0; x <= 6.0; x += 0.25) {
            CHECK(spec.G_prime(x) > 0.0);
        }
        // calG is an antiderivative of G
        for (double a : {-2.0, -0.5, 1.0}) {
            const double b = a + 1.7;
            const double direct = spec.calG(b) - spec.calG(a);
            const double quad = integrate(spec.G, a, b, 64);
            CHECK(direct == doctest::Approx(quad).epsilon(1e-8));
        }
    }
}

TEST_CASE("increment identities on random tuples") {
    for (const auto& spec : {ScoringSpec::logistic(0.2), ScoringSpec::exponential(0.35)}) {
        Xoshiro256pp rng(7);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double x1 = 4.0 * rng.uniform01() - 2.0;
            const double y1 = 4.0 * rng.uniform01() - 2.0;
            const double x2 = 4.0 * rng.uniform01() - 2.0;
            const double y2 = 4.0 * rng.uniform01() - 2.0;
            const double z = 4.0 * rng.uniform01() - 2.0;
            worst = std::max(worst, score_increment_residual(spec, x1, y1, x2, y2, z));
        }
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("increment identities, zero and one-sided increments") {
    const auto spec = ScoringSpec::logistic(0.4);
    CHECK(score_increment_residual(spec, 0.3, 0.0, -0.2, 0.0, 0.1) == 0.0);
    // y2 = 0 leaves only the pinball increment identity
    CHECK(score_increment_residual(spec, 0.3, 0.7, -0.2, 0.0, 0.1) <= 1e-12);
    CHECK(score_increment_residual(spec, 0.3, -1.3, -0.2, 0.0, 0.6) <= 1e-12);
    // y1 = 0 leaves the ES-coordinate identities
    CHECK(score_increment_residual(spec, 0.3, 0.0, -0.2, 1.1, 0.1) <= 1e-10);
}

TEST_CASE("corrupted spec is caught by the identity check") {
    const auto bad = ScoringSpec::corrupted(0.2);
    double worst = 0.0;
    Xoshiro256pp rng(11);
    for (int i = 0; i < 100; ++i) {
        const double x1 = 4.0 * rng.uniform01() - 2.0;
        const double y1 = 4.0 * rng.uniform01() - 2.0;
        const double x2 = 4.0 * rng.uniform01() - 2.0;
        const double y2 = 4.0 * rng.uniform01() - 2.0;
        const double z = 4.0 * rng.uniform01() - 2.0;
        worst = std::max(worst, score_increment_residual(bad, x1, y1, x2, y2, z));
    }
    CHECK(worst > 1e-6);
}
