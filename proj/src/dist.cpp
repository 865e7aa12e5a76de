#include "varbench/dist.hpp"

#include "varbench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <fmt/format.h>

namespace varbench {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Constants of the Hansen density; lambda = 0 gives the standardized t.
struct SkewTConstants {
    double nu;
    double lambda;
    double c;
    double a;
    double b;
    double scale;  // sqrt((nu - 2) / nu): standardized t = scale * t_nu
};

SkewTConstants skew_t_constants(double nu, double lambda) {
    SkewTConstants k{};
    k.nu = nu;
    k.lambda = lambda;
    k.c = std::exp(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu)) /
          std::sqrt(std::numbers::pi * (nu - 2.0));
    k.a = 4.0 * lambda * k.c * (nu - 2.0) / (nu - 1.0);
    k.b = std::sqrt(1.0 + 3.0 * lambda * lambda - k.a * k.a);
    k.scale = std::sqrt((nu - 2.0) / nu);
    return k;
}

double t_cdf(double nu, double x) { return boost::math::cdf(boost::math::students_t(nu), x); }

double t_quantile(double nu, double p) {
    return boost::math::quantile(boost::math::students_t(nu), p);
}

double skew_t_cdf(const SkewTConstants& k, double z) {
    const double y = k.b * z + k.a;
    if (z < -k.a / k.b) return (1.0 - k.lambda) * t_cdf(k.nu, y / (1.0 - k.lambda) / k.scale);
    return 0.5 * (1.0 - k.lambda) + (1.0 + k.lambda) * (t_cdf(k.nu, y / (1.0 + k.lambda) / k.scale) - 0.5);
}

double skew_t_quantile(const SkewTConstants& k, double p) {
    const double split = 0.5 * (1.0 - k.lambda);
    if (p < split) {
        const double y = (1.0 - k.lambda) * k.scale * t_quantile(k.nu, p / (1.0 - k.lambda));
        return (y - k.a) / k.b;
    }
    const double y = (1.0 + k.lambda) * k.scale * t_quantile(k.nu, 0.5 + (p - split) / (1.0 + k.lambda));
    return (y - k.a) / k.b;
}

void check_nu(double nu) {
    if (!(nu > 2.0) || !std::isfinite(nu)) {
        throw InvalidParameter(fmt::format("degrees of freedom must exceed 2, got {}", nu));
    }
}

}  // namespace

QuantileLevel::QuantileLevel(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidParameter(fmt::format("quantile level must lie in (0, 1), got {}", alpha));
    }
}

void validate(const DistSpec& dist) {
    std::visit(overloaded{
                   [](const Normal&) {},
                   [](const StudentT& d) { check_nu(d.nu); },
                   [](const HansenSkewT& d) {
                       check_nu(d.nu);
                       if (!(d.lambda > -1.0 && d.lambda < 1.0)) {
                           throw InvalidParameter(
                               fmt::format("skewness lambda must lie in (-1, 1), got {}", d.lambda));
                       }
                   },
                   [](const Empirical& d) {
                       if (d.samples.size() < 10) {
                           throw InvalidParameter("empirical distribution needs at least 10 samples");
                       }
                       for (double s : d.samples) {
                           if (!std::isfinite(s)) throw InvalidParameter("empirical samples must be finite");
                       }
                   },
               },
               dist);
}

std::string describe(const DistSpec& dist) {
    return std::visit(overloaded{
                          [](const Normal&) { return std::string("normal"); },
                          [](const StudentT& d) { return fmt::format("student-t(nu={:.4g})", d.nu); },
                          [](const HansenSkewT& d) {
                              return fmt::format("skew-t(nu={:.4g}, lambda={:.4g})", d.nu, d.lambda);
                          },
                          [](const Empirical& d) { return fmt::format("empirical(n={})", d.samples.size()); },
                      },
                      dist);
}

bool is_parametric(const DistSpec& dist) noexcept { return !std::holds_alternative<Empirical>(dist); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) { return boost::math::quantile(boost::math::normal(), p); }

double student_t_cdf(double x, double df) {
    if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
    return t_cdf(df, x);
}

double quantile(const DistSpec& dist, QuantileLevel level) {
    validate(dist);
    const double p = level.value();
    return std::visit(overloaded{
                          [p](const Normal&) { return normal_quantile(p); },
                          [p](const StudentT& d) { return std::sqrt((d.nu - 2.0) / d.nu) * t_quantile(d.nu, p); },
                          [p](const HansenSkewT& d) { return skew_t_quantile(skew_t_constants(d.nu, d.lambda), p); },
                          [level](const Empirical& d) { return empirical_quantile(d.samples, level); },
                      },
                      dist);
}

double cdf(const DistSpec& dist, double x) {
    validate(dist);
    return std::visit(overloaded{
                          [x](const Normal&) { return normal_cdf(x); },
                          [x](const StudentT& d) { return t_cdf(d.nu, x / std::sqrt((d.nu - 2.0) / d.nu)); },
                          [x](const HansenSkewT& d) { return skew_t_cdf(skew_t_constants(d.nu, d.lambda), x); },
                          [x](const Empirical& d) {
                              const auto n = std::count_if(d.samples.begin(), d.samples.end(),
                                                           [x](double s) { return s <= x; });
                              return static_cast<double>(n) / static_cast<double>(d.samples.size());
                          },
                      },
                      dist);
}

LogDensity::LogDensity(const DistSpec& dist) {
    validate(dist);
    if (std::holds_alternative<Empirical>(dist)) {
        throw UnsupportedOperation("log density is undefined for the empirical distribution");
    }
    if (std::holds_alternative<Normal>(dist)) {
        kind_ = Kind::normal;
        log_norm_ = -0.5 * std::log(2.0 * std::numbers::pi);
        return;
    }
    const double nu = std::holds_alternative<StudentT>(dist) ? std::get<StudentT>(dist).nu
                                                             : std::get<HansenSkewT>(dist).nu;
    const double lambda = std::holds_alternative<HansenSkewT>(dist) ? std::get<HansenSkewT>(dist).lambda : 0.0;
    const auto k = skew_t_constants(nu, lambda);
    kind_ = Kind::skew_t;
    log_norm_ = std::log(k.b * k.c);
    a_ = k.a;
    b_ = k.b;
    lambda_ = lambda;
    inv_nu_minus_2_ = 1.0 / (nu - 2.0);
    half_nu_plus_1_ = 0.5 * (nu + 1.0);
}

double LogDensity::operator()(double x) const noexcept {
    if (kind_ == Kind::normal) return log_norm_ - 0.5 * x * x;
    const double y = b_ * x + a_;
    const double s = y < 0.0 ? y / (1.0 - lambda_) : y / (1.0 + lambda_);
    return log_norm_ - half_nu_plus_1_ * std::log1p(s * s * inv_nu_minus_2_);
}

double log_density(const DistSpec& dist, double x) { return LogDensity(dist)(x); }

double empirical_quantile(std::span<const double> samples, QuantileLevel level) {
    if (samples.empty()) throw InvalidInput("empirical quantile of an empty sample");
    const std::size_t n = samples.size();
    const double h = static_cast<double>(n - 1) * level.value();
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);

    std::vector<double> work(samples.begin(), samples.end());
    std::nth_element(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(lo), work.end());
    const double lower = work[lo];
    if (lo + 1 >= n) return lower;
    const double upper = *std::min_element(work.begin() + static_cast<std::ptrdiff_t>(lo) + 1, work.end());
    return lower + frac * (upper - lower);
}

double chi2_survival(double x, int dof) {
    if (dof < 1) throw InvalidInput(fmt::format("chi-square degrees of freedom must be >= 1, got {}", dof));
    if (std::isnan(x) || x < 0.0) throw InvalidInput(fmt::format("chi-square statistic must be >= 0, got {}", x));
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

std::vector<double> sample(const DistSpec& dist, std::size_t n, std::uint64_t seed) {
    validate(dist);
    if (!is_parametric(dist)) throw UnsupportedOperation("cannot sample from the empirical distribution");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> out(n);

    if (std::holds_alternative<Normal>(dist)) {
        for (auto& x : out) x = gauss(rng);
        return out;
    }

    const double nu = std::holds_alternative<StudentT>(dist) ? std::get<StudentT>(dist).nu
                                                             : std::get<HansenSkewT>(dist).nu;
    const double lambda = std::holds_alternative<HansenSkewT>(dist) ? std::get<HansenSkewT>(dist).lambda : 0.0;
    const auto k = skew_t_constants(nu, lambda);
    std::chi_squared_distribution<double> chi2(nu);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    for (auto& x : out) {
        // |standardized t| then placed on the left branch with probability (1 - lambda) / 2.
        const double u = std::abs(k.scale * gauss(rng) / std::sqrt(chi2(rng) / nu));
        const double y = unif(rng) < 0.5 * (1.0 - lambda) ? -(1.0 - lambda) * u : (1.0 + lambda) * u;
        x = (y - k.a) / k.b;
    }
    return out;
}

}  // namespace varbench
