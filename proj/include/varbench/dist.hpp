#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace varbench {

/// Quantile level alpha in (0, 1).
class QuantileLevel {
public:
    explicit QuantileLevel(double alpha);
    double value() const noexcept { return alpha_; }
    friend bool operator==(const QuantileLevel&, const QuantileLevel&) = default;

private:
    double alpha_;
};

// All parametric variants are standardized: mean 0, variance 1.
struct Normal {};
struct StudentT {
    double nu;
};
/// Hansen (1994) skewed Student t; lambda < 0 skews left.
struct HansenSkewT {
    double nu;
    double lambda;
};
struct Empirical {
    std::vector<double> samples;
};

using DistSpec = std::variant<Normal, StudentT, HansenSkewT, Empirical>;

/// Throws InvalidParameter when nu <= 2, |lambda| >= 1, or an empirical sample
/// set is shorter than 10 or holds non-finite values.
void validate(const DistSpec& dist);
std::string describe(const DistSpec& dist);
bool is_parametric(const DistSpec& dist) noexcept;

double quantile(const DistSpec& dist, QuantileLevel level);
double cdf(const DistSpec& dist, double x);
double log_density(const DistSpec& dist, double x);

/// Log density of a parametric variant with its constants precomputed; used in
/// likelihood loops.
class LogDensity {
public:
    explicit LogDensity(const DistSpec& dist);
    double operator()(double x) const noexcept;

private:
    enum class Kind { normal, skew_t } kind_;
    double log_norm_ = 0.0;  // log(b * c) for the t family
    double a_ = 0.0;
    double b_ = 1.0;
    double lambda_ = 0.0;
    double inv_nu_minus_2_ = 0.0;
    double half_nu_plus_1_ = 0.0;
};

/// Linear interpolation between order statistics: h = (n-1)alpha,
/// s[floor h] + (h - floor h)(s[floor h + 1] - s[floor h]).
double empirical_quantile(std::span<const double> samples, QuantileLevel level);

/// P(chi2_k > x).
double chi2_survival(double x, int dof);

/// Standard normal helpers.
double normal_cdf(double x);
double normal_quantile(double p);
/// CDF of the (unstandardized) Student t with real-valued degrees of freedom.
double student_t_cdf(double x, double df);

/// n iid draws, deterministic in `seed`.
std::vector<double> sample(const DistSpec& dist, std::size_t n, std::uint64_t seed);

}  // namespace varbench
