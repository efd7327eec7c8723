#include "esrisk/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "esrisk/csv.hpp"
#include "esrisk/math.hpp"

namespace esrisk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double power_antiderivative(double y, int power) {
    // antiderivative of y^power
    return power == 1 ? 0.5 * y * y : y * y * y / 3.0;
}

}  // namespace

DistributionModel DistributionModel::kinked() {
    DistributionModel m;
    m.kind_ = ModelKind::kinked_cdf;
    return m;
}

DistributionModel DistributionModel::cubic() {
    DistributionModel m;
    m.kind_ = ModelKind::cubic_cdf;
    return m;
}

DistributionModel DistributionModel::standard_normal() {
    DistributionModel m;
    m.kind_ = ModelKind::standard_normal;
    return m;
}

DistributionModel DistributionModel::piecewise(std::vector<double> u, std::vector<double> x) {
    if (u.size() != x.size() || u.size() < 2) {
        throw std::invalid_argument("piecewise model: need two columns of equal length >= 2");
    }
    for (std::size_t i = 1; i < u.size(); ++i) {
        if (!(u[i] > u[i - 1]) || !(x[i] > x[i - 1])) {
            throw std::invalid_argument("piecewise model: columns must be strictly increasing");
        }
    }
    if (u.front() != 0.0 || u.back() != 1.0) {
        throw std::invalid_argument("piecewise model: probability column must run from 0 to 1");
    }
    DistributionModel m;
    m.kind_ = ModelKind::piecewise_inverse_cdf;
    m.table_u_ = std::move(u);
    m.table_x_ = std::move(x);
    return m;
}

DistributionModel DistributionModel::piecewise_from_csv(const std::filesystem::path& path) {
    auto [u, x] = load_two_column_csv(path);
    return piecewise(std::move(u), std::move(x));
}

DistributionModel DistributionModel::from_name(std::string_view name) {
    if (name == "kinked") return kinked();
    if (name == "cubic") return cubic();
    if (name == "normal") return standard_normal();
    throw std::invalid_argument("unknown model '" + std::string(name) +
                                "'; built-in models: kinked, cubic, normal");
}

std::string DistributionModel::name() const {
    std::string base;
    switch (kind_) {
        case ModelKind::kinked_cdf: base = "kinked"; break;
        case ModelKind::cubic_cdf: base = "cubic"; break;
        case ModelKind::standard_normal: base = "normal"; break;
        case ModelKind::piecewise_inverse_cdf: base = "piecewise"; break;
    }
    if (shift_ != 0.0) base += "+" + std::to_string(shift_);
    return base;
}

double DistributionModel::support_lower() const {
    switch (kind_) {
        case ModelKind::kinked_cdf: return -1.0 + shift_;
        case ModelKind::cubic_cdf: return 0.0 + shift_;
        case ModelKind::standard_normal: return -kInf;
        case ModelKind::piecewise_inverse_cdf: return table_x_.front() + shift_;
    }
    return -kInf;
}

double DistributionModel::support_upper() const {
    switch (kind_) {
        case ModelKind::kinked_cdf: return 0.5 + shift_;
        case ModelKind::cubic_cdf: return 2.0 + shift_;
        case ModelKind::standard_normal: return kInf;
        case ModelKind::piecewise_inverse_cdf: return table_x_.back() + shift_;
    }
    return kInf;
}

double DistributionModel::base_cdf(double x) const {
    switch (kind_) {
        case ModelKind::kinked_cdf:
            if (x <= -1.0) return 0.0;
            if (x <= 0.0) return (x + 1.0) / 5.0;
            if (x <= 0.5) return (1.0 + 8.0 * x) / 5.0;
            return 1.0;
        case ModelKind::cubic_cdf: {
            if (x <= 0.0) return 0.0;
            if (x >= 2.0) return 1.0;
            const double d = x - 1.0;
            return 0.5 * (d * d * d + 1.0);
        }
        case ModelKind::standard_normal:
            return norm_cdf(x);
        case ModelKind::piecewise_inverse_cdf: {
            if (x <= table_x_.front()) return x < table_x_.front() ? 0.0 : table_u_.front();
            if (x >= table_x_.back()) return 1.0;
            const auto it = std::upper_bound(table_x_.begin(), table_x_.end(), x);
            const std::size_t i = static_cast<std::size_t>(it - table_x_.begin());
            const double t = (x - table_x_[i - 1]) / (table_x_[i] - table_x_[i - 1]);
            return table_u_[i - 1] + t * (table_u_[i] - table_u_[i - 1]);
        }
    }
    return 0.0;
}

double DistributionModel::base_inverse(double u) const {
    switch (kind_) {
        case ModelKind::kinked_cdf:
            return u <= 0.2 ? 5.0 * u - 1.0 : (5.0 * u - 1.0) / 8.0;
        case ModelKind::cubic_cdf:
            return 1.0 + std::cbrt(2.0 * u - 1.0);
        case ModelKind::standard_normal:
            return u == 1.0 ? kInf : norm_quantile(u);
        case ModelKind::piecewise_inverse_cdf: {
            if (u >= 1.0) return table_x_.back();
            const auto it = std::lower_bound(table_u_.begin(), table_u_.end(), u);
            std::size_t i = static_cast<std::size_t>(it - table_u_.begin());
            if (i == 0) return table_x_.front();
            const double t = (u - table_u_[i - 1]) / (table_u_[i] - table_u_[i - 1]);
            return table_x_[i - 1] + t * (table_x_[i] - table_x_[i - 1]);
        }
    }
    return 0.0;
}

double DistributionModel::cdf(double x) const { return base_cdf(x - shift_); }

double DistributionModel::inverse_cdf(double u) const {
    if (!(u > 0.0) || !(u <= 1.0)) {
        throw std::domain_error("inverse_cdf: u must lie in (0,1]");
    }
    return base_inverse(u) + shift_;
}

double DistributionModel::base_moment(double c, int power) const {
    switch (kind_) {
        case ModelKind::kinked_cdf: {
            if (c <= -1.0) return 0.0;
            const double a = std::min(c, 0.0);
            double m = (power_antiderivative(a, power) - power_antiderivative(-1.0, power)) / 5.0;
            if (c > 0.0) {
                const double b = std::min(c, 0.5);
                m += 8.0 / 5.0 * power_antiderivative(b, power);
            }
            return m;
        }
        case ModelKind::cubic_cdf: {
            if (c <= 0.0) return 0.0;
            const double b = std::min(c, 2.0);
            // (3/2) * integral of y^p (y-1)^2 dy from 0 to b
            if (power == 1) {
                return 1.5 * (b * b * b * b / 4.0 - 2.0 * b * b * b / 3.0 + b * b / 2.0);
            }
            return 1.5 * (std::pow(b, 5) / 5.0 - std::pow(b, 4) / 2.0 + b * b * b / 3.0);
        }
        case ModelKind::standard_normal: {
            if (c == kInf) return power == 1 ? 0.0 : 1.0;
            return power == 1 ? -norm_pdf(c) : norm_cdf(c) - c * norm_pdf(c);
        }
        case ModelKind::piecewise_inverse_cdf: {
            const double uc = base_cdf(c);
            if (uc <= 0.0) return 0.0;
            std::vector<double> breaks{0.0};
            for (double u : table_u_) {
                if (u > 0.0 && u < uc) breaks.push_back(u);
            }
            breaks.push_back(uc);
            return integrate_segments(
                [&](double u) {
                    const double y = base_inverse(u);
                    return power == 1 ? y : y * y;
                },
                breaks, 64);
        }
    }
    return 0.0;
}

double DistributionModel::truncated_moment(double c, int power) const {
    if (power != 1 && power != 2) {
        throw std::invalid_argument("truncated_moment: power must be 1 or 2");
    }
    if (shift_ == 0.0) return base_moment(c, power);
    const double cb = c - shift_;
    const double m1 = base_moment(cb, 1);
    const double f = base_cdf(cb);
    if (power == 1) return m1 + shift_ * f;
    return base_moment(cb, 2) + 2.0 * shift_ * m1 + shift_ * shift_ * f;
}

double DistributionModel::mean() const {
    return truncated_moment(support_upper(), 1);
}

TrueRiskValues DistributionModel::true_values(double alpha) const {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::domain_error("true_values: alpha must lie in (0,1)");
    }
    const double q = inverse_cdf(alpha);
    return TrueRiskValues{alpha, q, truncated_moment(q, 1) / alpha};
}

LocalExpansion DistributionModel::local_expansion(double alpha) const {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::domain_error("local_expansion: alpha must lie in (0,1)");
    }
    constexpr double tol = 1e-12;
    switch (kind_) {
        case ModelKind::kinked_cdf: {
            if (std::abs(alpha - 0.2) <= tol) return {0.0, 0.0, 8.0 / 5.0, -1.0 / 5.0};
            const double slope = alpha < 0.2 ? 1.0 / 5.0 : 8.0 / 5.0;
            return {0.0, 0.0, slope, -slope};
        }
        case ModelKind::cubic_cdf: {
            if (std::abs(alpha - 0.5) <= tol) return {2.0, 2.0, 0.5, -0.5};
            const double q = base_inverse(alpha);
            const double f = 1.5 * (q - 1.0) * (q - 1.0);
            return {0.0, 0.0, f, -f};
        }
        case ModelKind::standard_normal: {
            const double f = norm_pdf(norm_quantile(alpha));
            return {0.0, 0.0, f, -f};
        }
        case ModelKind::piecewise_inverse_cdf:
            throw std::domain_error("local_expansion: no expansion available for table models");
    }
    throw std::domain_error("local_expansion: no expansion available");
}

DistributionModel DistributionModel::shifted(double delta) const {
    DistributionModel m = *this;
    m.shift_ += delta;
    return m;
}

}  // namespace esrisk
