#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace esrisk {

// Standard normal density, distribution function and quantile function.
double norm_pdf(double x);
double norm_cdf(double x);
// Wichura's AS 241 (PPND16), accurate to full double precision on (0,1).
double norm_quantile(double p);

// P(X <= a, Y <= b) for standard bivariate normal with correlation rho.
double binorm_cdf(double a, double b, double rho);

// Gauss-Legendre nodes and weights on [-1,1]; rules are cached per order.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const QuadratureRule& gauss_legendre_rule(int order);

// Compensated (Neumaier) summation.
class NeumaierSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

template <class F>
double integrate(F&& f, double a, double b, int order = 64) {
    const QuadratureRule& rule = gauss_legendre_rule(order);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    NeumaierSum acc;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        acc.add(rule.weights[i] * f(mid + half * rule.nodes[i]));
    }
    return half * acc.value();
}

// Composite rule over consecutive breakpoints.
template <class F>
double integrate_segments(F&& f, const std::vector<double>& breaks, int order = 64) {
    NeumaierSum acc;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (breaks[i + 1] > breaks[i]) {
            acc.add(integrate(f, breaks[i], breaks[i + 1], order));
        }
    }
    return acc.value();
}

// One-pass moments (Welford).
class RunningMoments {
public:
    void add(double x);
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    bool sd_defined() const { return n_ >= 2; }
    double variance() const;  // sample variance, n-1 denominator
    double sd() const;

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// One-pass covariance/correlation of a pair sequence.
class RunningCovariance {
public:
    void add(double x, double y);
    std::size_t count() const { return n_; }
    bool defined() const { return n_ >= 2; }
    double covariance() const;
    double correlation() const;

private:
    std::size_t n_ = 0;
    double mean_x_ = 0.0, mean_y_ = 0.0;
    double cxx_ = 0.0, cyy_ = 0.0, cxy_ = 0.0;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

// Derivative-free simplex search (reflection/expansion/contraction/shrink).
// Stops when the simplex diameter falls below diameter_tol.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start,
                             double initial_step,
                             double diameter_tol = 1e-10,
                             std::size_t max_iterations = 5000);

using Matrix = std::vector<std::vector<double>>;

// Eigenvalues of a symmetric matrix via cyclic Jacobi rotations, ascending.
std::vector<double> symmetric_eigenvalues(Matrix a);

// Root of an increasing function on [lo, hi] with f(lo) <= 0 <= f(hi).
// Newton steps guarded by bisection; terminates once the bracket width is
// below xtol, so the result matches plain bisection at the same tolerance.
double solve_increasing(const std::function<double(double)>& f,
                        const std::function<double(double)>& df,
                        double lo, double hi, double xtol);

}  // namespace esrisk
