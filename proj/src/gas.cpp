#include "varbench/gas.hpp"

#include "varbench/errors.hpp"
#include "varbench/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include <fmt/format.h>

namespace varbench {

namespace {

constexpr std::size_t kMinTrain = 250;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBetaStart = 0.95;
constexpr double kGammaStart = 0.005;

double score_step(const GasParams& p, double kappa, double r) {
    const double scale = std::exp(kappa);
    const double v = p.a * scale;
    const double e = p.b * scale;
    const double hit_term = r <= v ? r / p.alpha.value() : 0.0;
    return p.beta * kappa + p.gamma / e * (hit_term - e);
}

// Index of the step where exp(kappa) stopped being finite and positive, if any.
std::optional<std::size_t> run_filter(const GasParams& p, std::span<const double> r, std::vector<double>& kappa) {
    kappa.resize(r.size() + 1);
    kappa[0] = p.kappa0;
    for (std::size_t t = 0; t < r.size(); ++t) {
        const double scale = std::exp(kappa[t]);
        if (!std::isfinite(scale) || !(scale > 0.0)) return t;
        kappa[t + 1] = score_step(p, kappa[t], r[t]);
    }
    const double last = std::exp(kappa.back());
    if (!std::isfinite(last) || !(last > 0.0)) return r.size();
    return std::nullopt;
}

// a = a0 exp(u0), b = a - |a0| exp(u1), beta = logistic(u2), gamma = exp(u3).
struct GasCoordinates {
    double a0;
    QuantileLevel level;

    GasParams params(std::span<const double> u) const {
        GasParams p;
        p.a = a0 * std::exp(u[0]);
        p.b = p.a - std::abs(a0) * std::exp(u[1]);
        p.beta = optimize::logistic(u[2]);
        p.gamma = std::exp(u[3]);
        p.alpha = level;
        p.kappa0 = 0.0;
        return p;
    }
};

}  // namespace

void GasParams::validate() const {
    if (!(a < 0.0)) throw InvalidParameter(fmt::format("GAS requires a < 0, got {}", a));
    if (!(b < a)) throw InvalidParameter(fmt::format("GAS requires b < a, got b={} a={}", b, a));
    if (!(beta >= 0.0 && beta < 1.0)) throw InvalidParameter(fmt::format("GAS requires beta in [0, 1), got {}", beta));
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidParameter(fmt::format("GAS requires gamma >= 0, got {}", gamma));
    if (!std::isfinite(b) || !std::isfinite(kappa0)) throw InvalidParameter("GAS parameters must be finite");
}

double fz0_loss(double r, double v, double e, double alpha) {
    const double hit = r <= v ? 1.0 : 0.0;
    return -hit * (v - r) / (alpha * e) + v / e + std::log(-e) - 1.0;
}

GasPath gas_filter(const GasParams& params, std::span<const double> returns) {
    params.validate();
    GasPath path;
    if (const auto bad = run_filter(params, returns, path.kappa)) {
        throw FitFailure(fmt::format("GAS state overflow: exp(kappa) not finite at step {} (kappa = {})", *bad,
                                     path.kappa[*bad]));
    }
    path.var.resize(path.kappa.size());
    for (std::size_t t = 0; t < path.kappa.size(); ++t) path.var[t] = params.a * std::exp(path.kappa[t]);
    return path;
}

double gas_mean_loss(const GasParams& params, std::span<const double> returns) {
    if (returns.empty()) return kInf;
    double kappa = params.kappa0;
    double total = 0.0;
    const double alpha = params.alpha.value();
    for (double r : returns) {
        const double scale = std::exp(kappa);
        if (!std::isfinite(scale) || !(scale > 0.0)) return kInf;
        total += fz0_loss(r, params.a * scale, params.b * scale, alpha);
        kappa = score_step(params, kappa, r);
    }
    const double mean = total / static_cast<double>(returns.size());
    return std::isfinite(mean) ? mean : kInf;
}

GasFit fit_gas(const ReturnSeries& train, QuantileLevel level, const GasFitOptions& options) {
    return fit_gas(train.values(), level, options);
}

GasFit fit_gas(std::span<const double> train, QuantileLevel level, const GasFitOptions& options) {
    if (train.size() < kMinTrain) {
        throw InvalidInput(fmt::format("GAS fit needs at least {} observations, got {}", kMinTrain, train.size()));
    }
    const double n = static_cast<double>(train.size());
    const double mean = std::accumulate(train.begin(), train.end(), 0.0) / n;
    double var = 0.0;
    for (double x : train) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / n);
    if (!(sd > 0.0)) throw FitFailure("returns have zero variance; GAS is not identified");

    GasFit fit;
    // Start at the empirical quantile and expected shortfall of the sample.
    double a0 = empirical_quantile(train, level);
    if (!(a0 < 0.0)) {
        fit.warnings.push_back(fmt::format("empirical {}-quantile {} is not negative; starting from -sd",
                                           level.value(), a0));
        a0 = -sd;
    }
    double tail_sum = 0.0;
    std::size_t tail_count = 0;
    for (double x : train) {
        if (x <= a0) {
            tail_sum += x;
            ++tail_count;
        }
    }
    if (tail_count == 0) {
        fit.degenerate = true;
        fit.warnings.push_back("no training return falls below the initial VaR path");
    }
    double b0 = tail_count > 0 ? tail_sum / static_cast<double>(tail_count) : a0 - 0.5 * sd;
    if (!(b0 < a0)) b0 = a0 - 0.1 * sd;

    const GasCoordinates coords{a0, level};
    optimize::ObjectiveSpec spec;
    spec.dimension = 4;
    spec.start = {0.0, std::log((a0 - b0) / std::abs(a0)), optimize::logit(kBetaStart), std::log(kGammaStart)};
    spec.budget = options.budget;
    spec.restarts = options.restarts;
    spec.seed = options.seed;
    spec.evaluate = [&](std::span<const double> u) {
        const GasParams p = coords.params(u);
        if (!(p.a < 0.0) || !(p.b < p.a) || !(p.gamma > 0.0) || !(p.beta < 1.0) || !std::isfinite(p.b) ||
            !std::isfinite(p.gamma)) {
            return kInf;
        }
        return gas_mean_loss(p, train);
    };

    optimize::OptimResult opt;
    try {
        opt = optimize::minimize(spec);
    } catch (const OptimizationFailure& e) {
        throw FitFailure(fmt::format("GAS loss never finite: {}", e.what()));
    }
    fit.params = coords.params(opt.best_unconstrained);
    fit.loss = opt.best_value;
    fit.converged = opt.converged;
    fit.evaluations = opt.evaluations_used;
    if (!opt.converged) {
        const auto& p = fit.params;
        throw FitFailure(fmt::format("GAS optimizer did not converge in {} evaluations", opt.evaluations_used),
                         {p.a, p.b, p.beta, p.gamma}, opt.best_value);
    }
    return fit;
}

ForecastSeries gas_forecasts(const GasParams& params, const ReturnSeries& series, const Date& test_start,
                             const std::string& model_id) {
    const auto path = gas_filter(params, series.values());
    const std::size_t first = series.lower_bound(test_start);
    const auto dates = series.dates();
    return ForecastSeries(series.asset_id(), model_id, params.alpha, std::vector<Date>(dates.begin() + first, dates.end()),
                          std::vector<double>(path.var.begin() + static_cast<std::ptrdiff_t>(first),
                                              path.var.begin() + static_cast<std::ptrdiff_t>(series.size())));
}

}  // namespace varbench
