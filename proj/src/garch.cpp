#include "varbench/garch.hpp"

#include "varbench/errors.hpp"
#include "varbench/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

namespace varbench {

namespace {

constexpr std::size_t kMinTrain = 250;
constexpr double kMaxPersistence = 1.0 - 1e-8;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Unconstrained coordinates, in order:
//   mu     = mean + sd * u
//   ar1    = tanh(u)                       (ar1 mode only)
//   omega  = var * exp(u)
//   p      = kMaxPersistence * logistic(u) (alpha1 + beta1)
//   share  = logistic(u)                   (alpha1 = p * share)
//   nu     = 2 + exp(u)                    (t families)
//   lambda = tanh(u)                       (skew t)
class GarchCoordinates {
public:
    GarchCoordinates(Innovation innovation, MeanMode mean_mode, double mean, double var)
        : innovation_(innovation), ar1_(mean_mode == MeanMode::ar1), mean_(mean), var_(var) {}

    std::size_t dimension() const {
        std::size_t n = 4 + (ar1_ ? 1 : 0);
        if (innovation_ == Innovation::student_t) n += 1;
        if (innovation_ == Innovation::skew_t) n += 2;
        return n;
    }

    std::vector<double> start() const {
        std::vector<double> u;
        u.push_back(0.0);
        if (ar1_) u.push_back(0.0);
        const double p0 = 0.95;
        const double alpha0 = 0.05;
        u.push_back(std::log(1.0 - p0));
        u.push_back(optimize::logit(p0 / kMaxPersistence));
        u.push_back(optimize::logit(alpha0 / p0));
        if (innovation_ == Innovation::student_t || innovation_ == Innovation::skew_t) u.push_back(std::log(6.0));
        if (innovation_ == Innovation::skew_t) u.push_back(0.0);
        return u;
    }

    GarchParams params(std::span<const double> u) const {
        GarchParams p;
        std::size_t i = 0;
        p.mu = mean_ + std::sqrt(var_) * u[i++];
        if (ar1_) p.ar1 = std::tanh(u[i++]);
        p.omega = var_ * std::exp(u[i++]);
        const double persistence = kMaxPersistence * optimize::logistic(u[i++]);
        const double share = optimize::logistic(u[i++]);
        p.alpha1 = persistence * share;
        p.beta1 = persistence * (1.0 - share);
        switch (innovation_) {
            case Innovation::normal:
                p.dist = Normal{};
                break;
            case Innovation::edf:
                p.dist = Normal{};
                p.empirical_quantiles = true;
                break;
            case Innovation::student_t:
                p.dist = StudentT{2.0 + std::exp(u[i++])};
                break;
            case Innovation::skew_t: {
                const double nu = 2.0 + std::exp(u[i++]);
                p.dist = HansenSkewT{nu, std::tanh(u[i++])};
                break;
            }
        }
        return p;
    }

    std::vector<double> as_vector(const GarchParams& p) const {
        std::vector<double> v{p.mu};
        if (p.ar1) v.push_back(*p.ar1);
        v.insert(v.end(), {p.omega, p.alpha1, p.beta1});
        if (const auto* t = std::get_if<StudentT>(&p.dist)) v.push_back(t->nu);
        if (const auto* s = std::get_if<HansenSkewT>(&p.dist)) v.insert(v.end(), {s->nu, s->lambda});
        return v;
    }

private:
    Innovation innovation_;
    bool ar1_;
    double mean_;
    double var_;
};

// Log-likelihood without validation; NaN/-inf when the path breaks down.
double log_likelihood_unchecked(const GarchParams& p, const LogDensity& logg, std::span<const double> r) {
    const double phi = p.ar1.value_or(0.0);
    double mean = p.mu;
    double var = p.unconditional_variance();
    double total = 0.0;
    for (double x : r) {
        if (!(var > 0.0) || !std::isfinite(var)) return -kInf;
        const double sigma = std::sqrt(var);
        const double eps = x - mean;
        total += logg(eps / sigma) - std::log(sigma);
        var = p.omega + p.alpha1 * eps * eps + p.beta1 * var;
        mean = p.mu + phi * (x - p.mu);
    }
    return total;
}

}  // namespace

void GarchParams::validate() const {
    if (!(omega > 0.0) || !std::isfinite(omega)) throw InvalidParameter(fmt::format("omega must be > 0, got {}", omega));
    if (!(alpha1 >= 0.0)) throw InvalidParameter(fmt::format("alpha1 must be >= 0, got {}", alpha1));
    if (!(beta1 >= 0.0)) throw InvalidParameter(fmt::format("beta1 must be >= 0, got {}", beta1));
    if (!(alpha1 + beta1 < 1.0)) {
        throw InvalidParameter(fmt::format("alpha1 + beta1 must be < 1, got {}", alpha1 + beta1));
    }
    if (ar1 && !(std::abs(*ar1) < 1.0)) throw InvalidParameter(fmt::format("|ar1| must be < 1, got {}", *ar1));
    if (!std::isfinite(mu)) throw InvalidParameter("mu must be finite");
    if (!is_parametric(dist)) throw InvalidParameter("GARCH innovations need a parametric density");
    varbench::validate(dist);
}

double garch_log_likelihood(const GarchParams& params, std::span<const double> returns) {
    params.validate();
    return log_likelihood_unchecked(params, LogDensity(params.dist), returns);
}

GarchPath garch_filter(const GarchParams& params, std::span<const double> returns) {
    params.validate();
    const double phi = params.ar1.value_or(0.0);
    GarchPath path;
    path.mean.resize(returns.size() + 1);
    path.variance.resize(returns.size() + 1);
    path.mean[0] = params.mu;
    path.variance[0] = params.unconditional_variance();
    for (std::size_t t = 0; t < returns.size(); ++t) {
        const double eps = returns[t] - path.mean[t];
        path.variance[t + 1] = params.omega + params.alpha1 * eps * eps + params.beta1 * path.variance[t];
        path.mean[t + 1] = params.mu + phi * (returns[t] - params.mu);
    }
    return path;
}

double garch_var_forecast(const GarchParams& params, double mean, double sigma, QuantileLevel level) {
    if (params.empirical_quantiles) {
        if (params.residuals.empty()) throw InvalidState("EDF forecast requested but no residuals are stored");
        return mean + sigma * empirical_quantile(params.residuals, level);
    }
    return mean + sigma * quantile(params.dist, level);
}

GarchFit fit_garch(const ReturnSeries& train, Innovation innovation, MeanMode mean_mode,
                   const GarchFitOptions& options) {
    return fit_garch(train.values(), innovation, mean_mode, options);
}

GarchFit fit_garch(std::span<const double> train, Innovation innovation, MeanMode mean_mode,
                   const GarchFitOptions& options) {
    if (train.size() < kMinTrain) {
        throw InvalidInput(fmt::format("GARCH fit needs at least {} observations, got {}", kMinTrain, train.size()));
    }
    const double n = static_cast<double>(train.size());
    const double mean = std::accumulate(train.begin(), train.end(), 0.0) / n;
    double var = 0.0;
    for (double x : train) var += (x - mean) * (x - mean);
    var /= n;
    if (!(var > 0.0) || !std::isfinite(var)) throw FitFailure("returns have zero variance; GARCH is not identified");

    const GarchCoordinates coords(innovation, mean_mode, mean, var);
    optimize::ObjectiveSpec spec;
    spec.dimension = coords.dimension();
    spec.start = coords.start();
    spec.budget = options.budget;
    spec.restarts = options.restarts;
    spec.seed = options.seed;
    spec.evaluate = [&](std::span<const double> u) {
        const GarchParams p = coords.params(u);
        if (!(p.omega > 0.0) || !std::isfinite(p.omega) || !std::isfinite(p.mu)) return kInf;
        if (const auto* t = std::get_if<StudentT>(&p.dist); t && !(t->nu > 2.0 && std::isfinite(t->nu))) return kInf;
        if (const auto* s = std::get_if<HansenSkewT>(&p.dist);
            s && !(s->nu > 2.0 && std::isfinite(s->nu) && std::abs(s->lambda) < 1.0)) {
            return kInf;
        }
        const double ll = log_likelihood_unchecked(p, LogDensity(p.dist), train);
        return std::isfinite(ll) ? -ll / n : kInf;
    };

    optimize::OptimResult opt;
    try {
        opt = optimize::minimize(spec);
    } catch (const OptimizationFailure& e) {
        throw FitFailure(fmt::format("GARCH likelihood never finite: {}", e.what()));
    }

    GarchFit fit;
    fit.params = coords.params(opt.best_unconstrained);
    fit.log_likelihood = -opt.best_value * n;
    fit.converged = opt.converged;
    fit.evaluations = opt.evaluations_used;
    if (!opt.converged) {
        throw FitFailure(fmt::format("GARCH optimizer did not converge in {} evaluations", opt.evaluations_used),
                         coords.as_vector(fit.params), fit.log_likelihood);
    }

    const auto path = garch_filter(fit.params, train);
    fit.params.residuals.resize(train.size());
    for (std::size_t t = 0; t < train.size(); ++t) {
        fit.params.residuals[t] = (train[t] - path.mean[t]) / std::sqrt(path.variance[t]);
    }

    std::vector<std::string> flags;
    const auto& p = fit.params;
    if (p.alpha1 + p.beta1 > 0.9999) flags.push_back("persistence at the stationarity boundary");
    if (p.alpha1 < 1e-6) flags.push_back("alpha1 at zero");
    if (p.omega < 1e-8 * var) flags.push_back("omega collapsed to zero");
    if (const auto* s = std::get_if<HansenSkewT>(&p.dist); s && std::abs(s->lambda) > 0.99) {
        flags.push_back("skewness at the boundary");
    }
    if (!flags.empty()) {
        fit.degenerate = true;
        for (const auto& f : flags) fit.diagnostic += (fit.diagnostic.empty() ? "" : "; ") + f;
    }
    return fit;
}

std::vector<ForecastSeries> garch_forecasts(const GarchParams& params, const ReturnSeries& series,
                                            const Date& test_start, std::span<const QuantileLevel> levels,
                                            const std::string& model_id) {
    const auto path = garch_filter(params, series.values());
    const std::size_t first = series.lower_bound(test_start);
    const auto dates = series.dates();
    std::vector<ForecastSeries> out;
    for (const auto level : levels) {
        const double shift = garch_var_forecast(params, 0.0, 1.0, level);
        std::vector<double> values;
        values.reserve(series.size() - first);
        for (std::size_t t = first; t < series.size(); ++t) {
            values.push_back(path.mean[t] + std::sqrt(path.variance[t]) * shift);
        }
        out.emplace_back(series.asset_id(), model_id, level, std::vector<Date>(dates.begin() + first, dates.end()),
                         std::move(values));
    }
    return out;
}

std::vector<double> simulate_garch_path(const GarchParams& params, std::size_t n, std::uint64_t seed) {
    if (params.empirical_quantiles) throw UnsupportedOperation("cannot simulate from the EDF innovation variant");
    params.validate();
    const auto eta = sample(params.dist, n, seed);
    const double phi = params.ar1.value_or(0.0);
    std::vector<double> r(n);
    double mean = params.mu;
    double var = params.unconditional_variance();
    for (std::size_t t = 0; t < n; ++t) {
        r[t] = mean + std::sqrt(var) * eta[t];
        const double eps = r[t] - mean;
        var = params.omega + params.alpha1 * eps * eps + params.beta1 * var;
        mean = params.mu + phi * (r[t] - params.mu);
    }
    return r;
}

ReturnSeries simulate_garch(const GarchParams& params, std::size_t n, std::uint64_t seed, const std::string& asset_id,
                            Date first_date) {
    auto r = simulate_garch_path(params, n, seed);
    std::vector<Date> dates(n);
    for (std::size_t t = 0; t < n; ++t) dates[t] = first_date.plus_days(static_cast<long>(t));
    return ReturnSeries(asset_id, std::move(dates), std::move(r));
}

}  // namespace varbench
