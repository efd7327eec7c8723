#include "esrisk/math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace esrisk {

double norm_pdf(double x) {
    static const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double norm_cdf(double x) {
    if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

// AS 241 algorithm PPND16 (Wichura, 1988).
double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        throw std::domain_error("norm_quantile: p must lie in (0,1)");
    }
    const double q = p - 0.5;
    double r;
    if (std::abs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                      2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                    3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                  4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
                (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                      1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                    6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                  2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                      1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                    2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                  5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
                (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                      1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                    1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                  5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -value : value;
}

double binorm_cdf(double a, double b, double rho) {
    if (std::isnan(a) || std::isnan(b)) return std::numeric_limits<double>::quiet_NaN();
    if (a == -std::numeric_limits<double>::infinity() ||
        b == -std::numeric_limits<double>::infinity())
        return 0.0;
    if (rho >= 1.0) return norm_cdf(std::min(a, b));
    if (rho <= -1.0) {
        const double v = norm_cdf(a) + norm_cdf(b) - 1.0;
        return v > 0.0 ? v : 0.0;
    }
    // Condition on the first coordinate and integrate the conditional CDF.
    const double hi = std::min(a, 9.0);
    if (hi <= -9.0) return 0.0;
    const double denom = std::sqrt(1.0 - rho * rho);
    const double p = integrate(
        [&](double x) { return norm_pdf(x) * norm_cdf((b - rho * x) / denom); },
        -9.0, hi, 128);
    return std::clamp(p, 0.0, 1.0);
}

namespace {

QuadratureRule compute_gauss_legendre(int order) {
    if (order < 1) throw std::invalid_argument("gauss_legendre_rule: order must be >= 1");
    QuadratureRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < order; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = order * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    return rule;
}

}  // namespace

const QuadratureRule& gauss_legendre_rule(int order) {
    static std::mutex mtx;
    static std::map<int, QuadratureRule> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it == cache.end()) {
        it = cache.emplace(order, compute_gauss_legendre(order)).first;
    }
    return it->second;
}

void RunningMoments::add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
}

double RunningMoments::variance() const {
    if (n_ < 2) throw std::logic_error("RunningMoments::variance: need at least two values");
    return m2_ / static_cast<double>(n_ - 1);
}

double RunningMoments::sd() const { return std::sqrt(variance()); }

void RunningCovariance::add(double x, double y) {
    ++n_;
    const double dx = x - mean_x_;
    const double dy = y - mean_y_;
    mean_x_ += dx / static_cast<double>(n_);
    mean_y_ += dy / static_cast<double>(n_);
    cxx_ += dx * (x - mean_x_);
    cyy_ += dy * (y - mean_y_);
    cxy_ += dx * (y - mean_y_);
}

double RunningCovariance::covariance() const {
    if (n_ < 2) throw std::logic_error("RunningCovariance::covariance: need at least two pairs");
    return cxy_ / static_cast<double>(n_ - 1);
}

double RunningCovariance::correlation() const {
    if (n_ < 2) throw std::logic_error("RunningCovariance::correlation: need at least two pairs");
    const double denom = std::sqrt(cxx_ * cyy_);
    if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return cxy_ / denom;
}

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start,
                             double initial_step,
                             double diameter_tol,
                             std::size_t max_iterations) {
    const std::size_t d = start.size();
    if (d == 0) throw std::invalid_argument("nelder_mead: empty start point");

    std::vector<std::vector<double>> verts(d + 1, start);
    for (std::size_t i = 0; i < d; ++i) verts[i + 1][i] += initial_step;
    std::vector<double> vals(d + 1);
    for (std::size_t i = 0; i <= d; ++i) vals[i] = f(verts[i]);

    auto diameter = [&]() {
        double dm = 0.0;
        for (std::size_t i = 1; i <= d; ++i) {
            double dist2 = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                const double dd = verts[i][k] - verts[0][k];
                dist2 += dd * dd;
            }
            dm = std::max(dm, std::sqrt(dist2));
        }
        return dm;
    };

    NelderMeadResult out;
    for (out.iterations = 0; out.iterations < max_iterations; ++out.iterations) {
        std::vector<std::size_t> idx(d + 1);
        for (std::size_t i = 0; i <= d; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        std::vector<std::vector<double>> sv(d + 1);
        std::vector<double> sf(d + 1);
        for (std::size_t i = 0; i <= d; ++i) {
            sv[i] = verts[idx[i]];
            sf[i] = vals[idx[i]];
        }
        verts.swap(sv);
        vals.swap(sf);

        if (diameter() <= diameter_tol) {
            out.converged = true;
            break;
        }

        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t k = 0; k < d; ++k) centroid[k] += verts[i][k];
        }
        for (std::size_t k = 0; k < d; ++k) centroid[k] /= static_cast<double>(d);

        auto point = [&](double coef) {
            std::vector<double> p(d);
            for (std::size_t k = 0; k < d; ++k) {
                p[k] = centroid[k] + coef * (verts[d][k] - centroid[k]);
            }
            return p;
        };

        const std::vector<double> xr = point(-1.0);
        const double fr = f(xr);
        if (fr < vals[0]) {
            const std::vector<double> xe = point(-2.0);
            const double fe = f(xe);
            if (fe < fr) {
                verts[d] = xe;
                vals[d] = fe;
            } else {
                verts[d] = xr;
                vals[d] = fr;
            }
        } else if (fr < vals[d - 1]) {
            verts[d] = xr;
            vals[d] = fr;
        } else {
            const bool outside = fr < vals[d];
            const std::vector<double> xc = point(outside ? -0.5 : 0.5);
            const double fc = f(xc);
            if (fc < std::min(fr, vals[d])) {
                verts[d] = xc;
                vals[d] = fc;
            } else {
                for (std::size_t i = 1; i <= d; ++i) {
                    for (std::size_t k = 0; k < d; ++k) {
                        verts[i][k] = verts[0][k] + 0.5 * (verts[i][k] - verts[0][k]);
                    }
                    vals[i] = f(verts[i]);
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= d; ++i) {
        if (vals[i] < vals[best]) best = i;
    }
    out.x = verts[best];
    out.value = vals[best];
    return out;
}

std::vector<double> symmetric_eigenvalues(Matrix a) {
    const std::size_t n = a.size();
    for (const auto& row : a) {
        if (row.size() != n) throw std::invalid_argument("symmetric_eigenvalues: matrix not square");
    }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        }
        if (off < 1e-28) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p];
                    const double akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k];
                    const double aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
    std::sort(ev.begin(), ev.end());
    return ev;
}

double solve_increasing(const std::function<double(double)>& f,
                        const std::function<double(double)>& df,
                        double lo, double hi, double xtol) {
    if (!(lo < hi)) throw std::invalid_argument("solve_increasing: empty bracket");
    double flo = f(lo);
    double fhi = f(hi);
    if (flo > 0.0 || fhi < 0.0) {
        throw std::invalid_argument("solve_increasing: root not bracketed");
    }
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 400 && hi - lo > xtol; ++iter) {
        double fx = f(x);
        if (fx == 0.0) return x;
        if (fx < 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        const double d = df(x);
        double next = d > 0.0 ? x - fx / d : lo - 1.0;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
    }
    return 0.5 * (lo + hi);
}

}  // namespace esrisk
