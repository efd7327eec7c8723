#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace esrisk {

enum class ModelKind { kinked_cdf, cubic_cdf, standard_normal, piecewise_inverse_cdf };

// One-sided power behaviour of F - alpha at the quantile:
//   F(x) - alpha = (x-q)^(right_order+1) * kappa_plus   just right of q,
//   F(x) - alpha = (q-x)^(left_order+1)  * kappa_minus  just left of q.
// Strict monotonicity forces kappa_plus > 0 and kappa_minus < 0; the signed
// kappa_minus convention is kept here and negated where a positive
// coefficient is required.
struct LocalExpansion {
    double right_order;  // r > -1
    double left_order;   // l > -1
    double kappa_plus;   // > 0
    double kappa_minus;  // < 0
};

struct TrueRiskValues {
    double alpha;
    double q_alpha;
    double es_alpha;  // lower-tail expected shortfall, es_alpha <= q_alpha
};

// Synthetic law with closed-form CDF, inverse CDF and truncated moments.
// All member functions are const and models are freely shareable across
// threads.
class DistributionModel {
public:
    // F(x) = (x+1)/5 on (-1,0], (1+8x)/5 on (0,1/2]; slope jumps at the
    // 1/5-quantile.
    static DistributionModel kinked();
    // F(x) = ((x-1)^3+1)/2 on [0,2]; density has a root of order two at the
    // median.
    static DistributionModel cubic();
    static DistributionModel standard_normal();
    // Arbitrary law given by a strictly increasing probability/value table,
    // interpolated linearly. The table must start at u=0 and end at u=1.
    static DistributionModel piecewise(std::vector<double> u, std::vector<double> x);
    // Two-column CSV (u,x); see piecewise().
    static DistributionModel piecewise_from_csv(const std::filesystem::path& path);
    // Lookup by name ("kinked", "cubic", "normal"); throws with the list of
    // known names otherwise.
    static DistributionModel from_name(std::string_view name);

    ModelKind kind() const { return kind_; }
    std::string name() const;
    double support_lower() const;
    double support_upper() const;

    // Clamps to 0/1 outside the support.
    double cdf(double x) const;
    // Generalized inverse inf{x : F(x) >= u} for u in (0,1]; u=1 gives the
    // upper support endpoint. Throws std::domain_error otherwise.
    double inverse_cdf(double u) const;
    // Inverse-transform sampling contract: sample(u) == inverse_cdf(u).
    double sample(double u) const { return inverse_cdf(u); }

    // E[1_{Y<=c} Y^power] for power in {1,2}; closed form for built-ins,
    // Gauss-Legendre over (0, cdf(c)) for table models.
    double truncated_moment(double c, int power) const;
    double mean() const;

    // q_alpha = F^{-1}(alpha), es_alpha = E[1_{Y<=q} Y] / alpha.
    TrueRiskValues true_values(double alpha) const;

    // Local expansion at the alpha-quantile; throws std::domain_error when no
    // expansion is available (table models).
    LocalExpansion local_expansion(double alpha) const;

    // The law of Y + delta.
    DistributionModel shifted(double delta) const;

private:
    DistributionModel() = default;

    double base_cdf(double x) const;
    double base_inverse(double u) const;
    double base_moment(double c, int power) const;

    ModelKind kind_ = ModelKind::kinked_cdf;
    double shift_ = 0.0;
    std::vector<double> table_u_;
    std::vector<double> table_x_;
};

}  // namespace esrisk
