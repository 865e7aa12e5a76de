#pragma once

#include "varbench/dist.hpp"
#include "varbench/forecast.hpp"
#include "varbench/series.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace varbench {

enum class MeanMode { constant, ar1 };

/// Innovation family for the GARCH(1,1) fit. `edf` is estimated by Gaussian
/// quasi-likelihood and takes its quantiles from the standardized training
/// residuals.
enum class Innovation { normal, student_t, skew_t, edf };

/// r_t = mu_t + sigma_t * eta_t with
///   mu_t      = mu + ar1 * (r_{t-1} - mu)   (ar1 absent: mu_t = mu)
///   sigma^2_t = omega + alpha1 * eps^2_{t-1} + beta1 * sigma^2_{t-1}.
struct GarchParams {
    double mu = 0.0;
    std::optional<double> ar1;
    double omega = 0.0;
    double alpha1 = 0.0;
    double beta1 = 0.0;
    DistSpec dist = Normal{};
    bool empirical_quantiles = false;  // EDF variant
    std::vector<double> residuals;     // standardized training residuals

    /// omega > 0, alpha1 >= 0, beta1 >= 0, alpha1 + beta1 < 1, |ar1| < 1, and
    /// a valid parametric `dist`. Throws InvalidParameter.
    void validate() const;
    double unconditional_variance() const { return omega / (1.0 - alpha1 - beta1); }
};

/// Conditional mean and variance; entry t is the one-step prediction for
/// observation t, and the extra last entry is the prediction after the final
/// observation.
struct GarchPath {
    std::vector<double> mean;
    std::vector<double> variance;
};

struct GarchFit {
    GarchParams params;
    double log_likelihood = 0.0;
    bool converged = false;
    bool degenerate = false;
    std::string diagnostic;
    std::size_t evaluations = 0;
};

struct GarchFitOptions {
    std::size_t budget = 2000;
    std::size_t restarts = 5;
    std::uint64_t seed = 0;
};

/// Maximum likelihood fit of a GARCH(1,1) with the chosen innovation family.
/// Requires at least 250 observations (InvalidInput). Throws FitFailure when
/// the optimizer does not converge or the data has no variation.
GarchFit fit_garch(const ReturnSeries& train, Innovation innovation, MeanMode mean_mode,
                   const GarchFitOptions& options = {});
/// Same fit on a bare return path (no calendar, no r > -1 requirement), for
/// data expressed in other units such as percent.
GarchFit fit_garch(std::span<const double> train, Innovation innovation, MeanMode mean_mode,
                   const GarchFitOptions& options = {});

/// Sum over t of log g((r_t - mu_t) / sigma_t) - log sigma_t.
double garch_log_likelihood(const GarchParams& params, std::span<const double> returns);

GarchPath garch_filter(const GarchParams& params, std::span<const double> returns);

/// mu + sigma * a_alpha, a_alpha taken from the innovation distribution or,
/// for the EDF variant, from the stored residuals (InvalidState when empty).
double garch_var_forecast(const GarchParams& params, double mean, double sigma, QuantileLevel level);

/// Runs the filter over the whole of `series` with frozen parameters and
/// returns forecasts for the observations dated on or after `test_start`.
std::vector<ForecastSeries> garch_forecasts(const GarchParams& params, const ReturnSeries& series,
                                            const Date& test_start, std::span<const QuantileLevel> levels,
                                            const std::string& model_id);

/// Simulates n returns from the data-generating process. Dates are
/// consecutive calendar days from `first_date`; throws InvalidInput if a draw
/// falls at or below -1 (use simulate_garch_path for unit-free paths).
ReturnSeries simulate_garch(const GarchParams& params, std::size_t n, std::uint64_t seed,
                            const std::string& asset_id = "SIM", Date first_date = Date{2000, 1, 3});
std::vector<double> simulate_garch_path(const GarchParams& params, std::size_t n, std::uint64_t seed);

}  // namespace varbench
