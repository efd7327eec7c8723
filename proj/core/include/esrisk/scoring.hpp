#pragma once

#include <functional>
#include <string>

namespace esrisk {

// Specification-function pair (G, calG) for the bivariate quantile/ES score
//   S(x1,x2;y) = (1_{y<=x1}-a)(x1-y)
//              + G(x2)(x2 + (1/a)(1_{y<=x1}-a)(x1-y)) - calG(x2) - G(x2) y,
// with calG' = G and G' > 0. G must vanish at -infinity for the score to be
// well defined on unbounded supports.
struct ScoringSpec {
    double alpha;
    std::function<double(double)> G;
    std::function<double(double)> G_prime;
    std::function<double(double)> G_double_prime;
    std::function<double(double)> calG;
    std::string name;

    // G(x) = 1/(1+e^-x), calG(x) = log(1+e^x); bounded and valid everywhere.
    static ScoringSpec logistic(double alpha);
    // G(x) = calG(x) = e^x with the exponent clamped against overflow.
    static ScoringSpec exponential(double alpha);
    // Negative control for the identity checker: reports a derivative that is
    // inconsistent with G (and has G' < 0 regions).
    static ScoringSpec corrupted(double alpha);
};

// Pinball loss (1_{y<=x}-alpha)(x-y).
double pinball(double alpha, double x, double y);

// The score, evaluated exactly as displayed above.
double score(const ScoringSpec& spec, double x1, double x2, double y);
// Algebraically identical form (1+G(x2)/a)(1_{y<=x1}-a)(x1-y)+G(x2)(x2-y)-calG(x2).
double score_rearranged(const ScoringSpec& spec, double x1, double x2, double y);

// Evaluates both sides of the scoring-function increment identities
// (the ES increment with its integral remainder, the pinball increment, and
// the full two-coordinate difference) and returns the largest absolute
// residual. Integral terms involving G', G'' use Gauss-Legendre quadrature.
double score_increment_residual(const ScoringSpec& spec, double x1, double y1,
                                double x2, double y2, double z);

}  // namespace esrisk
