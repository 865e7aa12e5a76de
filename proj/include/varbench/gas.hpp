#pragma once

#include "varbench/dist.hpp"
#include "varbench/forecast.hpp"
#include "varbench/series.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace varbench {

/// One-factor GAS model for (VaR, ES):
///   v_t = a exp(kappa_t),  e_t = b exp(kappa_t),
///   kappa_t = beta kappa_{t-1}
///           + gamma / e_{t-1} * ((1/alpha) 1{r_{t-1} <= v_{t-1}} r_{t-1} - e_{t-1}).
struct GasParams {
    double a = -1.0;
    double b = -2.0;
    double beta = 0.9;
    double gamma = 0.01;
    QuantileLevel alpha{0.05};
    double kappa0 = 0.0;

    /// b < a < 0, beta in [0, 1), gamma >= 0. Fitted models always have
    /// gamma > 0; gamma = 0 is accepted so the filter can run score-free.
    void validate() const;
};

/// kappa and VaR paths of length n + 1; the last entry is the forecast state
/// after the final observation.
struct GasPath {
    std::vector<double> kappa;
    std::vector<double> var;
};

struct GasFit {
    GasParams params;
    double loss = 0.0;  // mean FZ0 loss on the training sample
    bool converged = false;
    bool degenerate = false;
    std::vector<std::string> warnings;
    std::size_t evaluations = 0;
};

struct GasFitOptions {
    std::size_t budget = 2000;
    std::size_t restarts = 5;
    std::uint64_t seed = 0;
};

/// FZ0(r, v, e) = -(1/(alpha e)) 1{r <= v}(v - r) + v/e + log(-e) - 1, for e < 0.
double fz0_loss(double r, double v, double e, double alpha);

/// Throws FitFailure if exp(kappa) leaves the representable range.
GasPath gas_filter(const GasParams& params, std::span<const double> returns);

/// Mean FZ0 loss of the filtered (v_t, e_t) path; +infinity on overflow.
double gas_mean_loss(const GasParams& params, std::span<const double> returns);

/// Minimizes the mean FZ0 loss over (a, b, beta, gamma) with kappa_1 = 0.
/// Requires at least 250 observations. Throws FitFailure on non-convergence.
GasFit fit_gas(const ReturnSeries& train, QuantileLevel level, const GasFitOptions& options = {});
GasFit fit_gas(std::span<const double> train, QuantileLevel level, const GasFitOptions& options = {});

/// Filters the whole of `series` and returns the forecasts dated on or after
/// `test_start`.
ForecastSeries gas_forecasts(const GasParams& params, const ReturnSeries& series, const Date& test_start,
                             const std::string& model_id);

}  // namespace varbench
