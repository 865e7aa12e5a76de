#pragma once

#include "varbench/dist.hpp"
#include "varbench/forecast.hpp"
#include "varbench/series.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace varbench {

/// hits[t] = 1 iff r_t < q_t.
struct HitSeries {
    QuantileLevel level{0.05};
    std::vector<std::uint8_t> hits;

    std::size_t size() const noexcept { return hits.size(); }
    std::size_t violations() const noexcept;
};

inline constexpr std::array<double, 3> kSignificanceLevels{0.01, 0.025, 0.05};

/// Chi-square backtest outcome. `p_value` is empty when the test could not be
/// computed (singular DQ design); `degenerate` marks boundary cases that are
/// still reported.
struct TestResult {
    double statistic = 0.0;
    int dof = 1;
    std::optional<double> p_value;
    bool degenerate = false;
    std::string note;

    /// Reject iff p <= significance; never rejects without a p-value.
    bool rejects(double significance) const noexcept { return p_value && *p_value <= significance; }
    std::array<std::pair<double, bool>, 3> decisions() const noexcept;
};

struct QuantileScores {
    std::vector<double> per_day;
    double mean = 0.0;
    double total = 0.0;
};

struct BacktestReport {
    std::string asset_id;
    std::string model_id;
    double level = 0.0;
    std::size_t observations = 0;  // T
    std::size_t violations = 0;    // A
    double ae = 0.0;
    TestResult uc;
    TestResult cc;
    TestResult dq;
    double mean_qs = 0.0;
    double total_qs = 0.0;
};

struct DmResult {
    double statistic = 0.0;
    double p_value = 0.5;  // one-sided, H1: first model has the larger loss
    bool infinite = false;
};

struct DmOptions {
    std::size_t hac_lags = 0;  // Newey–West lags; 0 is the plain sample variance
};

enum class TTestKind { welch, paired };

struct TTestResult {
    double statistic = 0.0;
    double df = 0.0;
    double p_value = 0.5;  // one-sided, H1: mean_i > mean_j
    bool degenerate = false;
};

/// Throws AlignmentError unless the return and forecast dates are identical.
HitSeries compute_hits(const ReturnSeries& returns, const ForecastSeries& forecasts);
HitSeries compute_hits(std::span<const double> returns, std::span<const double> forecasts, QuantileLevel level);

/// A / (T alpha).
double ae_ratio(const HitSeries& hits);

/// Kupiec unconditional coverage LR, 1 dof.
TestResult uc_test(const HitSeries& hits);

/// Christoffersen conditional coverage LR, 2 dof. Requires T >= 2.
TestResult cc_test(const HitSeries& hits);

/// Engle–Manganelli dynamic quantile test: OLS of I_t - alpha on an intercept,
/// `lags` lagged demeaned hits and the contemporaneous forecast;
/// lags + 2 dof. Requires T > lags + 5.
TestResult dq_test(const HitSeries& hits, std::span<const double> forecasts, std::size_t lags = 4);

/// QS_t = (alpha - 1{r_t < q_t}) (r_t - q_t).
QuantileScores quantile_scores(const ReturnSeries& returns, const ForecastSeries& forecasts);
QuantileScores quantile_scores(std::span<const double> returns, std::span<const double> forecasts,
                               QuantileLevel level);

/// Diebold–Mariano test on d_t = scores_i[t] - scores_j[t]. Requires equal
/// lengths T >= 30.
DmResult dm_test(std::span<const double> scores_i, std::span<const double> scores_j, const DmOptions& options = {});

/// One-sided two-sample t-test of mean(dev_i) > mean(dev_j). Requires equal
/// lengths n >= 3.
TTestResult ae_dev_ttest(std::span<const double> dev_i, std::span<const double> dev_j,
                         TTestKind kind = TTestKind::welch);

/// Full per-(asset, model, level) evaluation.
BacktestReport backtest(const ReturnSeries& returns, const ForecastSeries& forecasts, std::size_t dq_lags = 4);

}  // namespace varbench
