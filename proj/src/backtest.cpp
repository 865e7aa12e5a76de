#include "varbench/backtest.hpp"

#include "varbench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace varbench {

namespace {

// x log y with 0 log 0 = 0.
double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

double binomial_loglik(double n_hit, double n_total, double p) {
    return xlogy(n_total - n_hit, 1.0 - p) + xlogy(n_hit, p);
}

TestResult chi2_result(double statistic, int dof) {
    TestResult out;
    out.statistic = std::max(statistic, 0.0);
    out.dof = dof;
    out.p_value = chi2_survival(out.statistic, dof);
    return out;
}

void check_lengths(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw AlignmentError(fmt::format("{}: length mismatch ({} vs {})", what, a, b));
}

struct Moments {
    double mean = 0.0;
    double variance = 0.0;  // n - 1 denominator
};

// Constant input yields its value and exactly zero variance.
Moments moments(std::span<const double> x) {
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    if (*lo == *hi) return {*lo, 0.0};
    Moments m;
    m.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - m.mean) * (v - m.mean);
    m.variance = ss / static_cast<double>(x.size() - 1);
    return m;
}

}  // namespace

std::size_t HitSeries::violations() const noexcept {
    return static_cast<std::size_t>(std::count(hits.begin(), hits.end(), std::uint8_t{1}));
}

std::array<std::pair<double, bool>, 3> TestResult::decisions() const noexcept {
    std::array<std::pair<double, bool>, 3> out{};
    for (std::size_t i = 0; i < kSignificanceLevels.size(); ++i) {
        out[i] = {kSignificanceLevels[i], rejects(kSignificanceLevels[i])};
    }
    return out;
}

HitSeries compute_hits(const ReturnSeries& returns, const ForecastSeries& forecasts) {
    const auto rd = returns.dates();
    const auto fd = forecasts.dates();
    if (!std::equal(rd.begin(), rd.end(), fd.begin(), fd.end())) {
        throw AlignmentError(fmt::format("returns of {} and forecasts of {} / {} are not date-aligned ({} vs {} dates)",
                                         returns.asset_id(), forecasts.asset_id(), forecasts.model_id(), rd.size(),
                                         fd.size()));
    }
    return compute_hits(returns.values(), forecasts.values(), forecasts.level());
}

HitSeries compute_hits(std::span<const double> returns, std::span<const double> forecasts, QuantileLevel level) {
    check_lengths(returns.size(), forecasts.size(), "compute_hits");
    HitSeries out{level, std::vector<std::uint8_t>(returns.size())};
    for (std::size_t t = 0; t < returns.size(); ++t) out.hits[t] = returns[t] < forecasts[t] ? 1 : 0;
    return out;
}

double ae_ratio(const HitSeries& hits) {
    if (hits.size() == 0) throw InvalidInput("AE ratio of an empty hit series");
    return static_cast<double>(hits.violations()) / (static_cast<double>(hits.size()) * hits.level.value());
}

TestResult uc_test(const HitSeries& hits) {
    if (hits.size() == 0) throw InvalidInput("UC test of an empty hit series");
    const double n = static_cast<double>(hits.size());
    const double a = static_cast<double>(hits.violations());
    const double alpha = hits.level.value();
    auto out = chi2_result(2.0 * (binomial_loglik(a, n, a / n) - binomial_loglik(a, n, alpha)), 1);
    if (a == 0.0 || a == n) {
        out.degenerate = true;
        out.note = a == 0.0 ? "no violations" : "every observation is a violation";
    }
    return out;
}

TestResult cc_test(const HitSeries& hits) {
    if (hits.size() < 2) throw InvalidInput("CC test needs at least 2 observations");
    double n[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    for (std::size_t t = 1; t < hits.size(); ++t) n[hits.hits[t - 1]][hits.hits[t]] += 1.0;

    const double from0 = n[0][0] + n[0][1];
    const double from1 = n[1][0] + n[1][1];
    const double pi01 = from0 > 0.0 ? n[0][1] / from0 : 0.0;
    const double pi11 = from1 > 0.0 ? n[1][1] / from1 : 0.0;
    const double markov = binomial_loglik(n[0][1], from0, pi01) + binomial_loglik(n[1][1], from1, pi11);

    // Both likelihoods condition on the first observation.
    const double total = from0 + from1;
    const double a = n[0][1] + n[1][1];
    const double null = binomial_loglik(a, total, hits.level.value());
    auto out = chi2_result(-2.0 * null + 2.0 * markov, 2);
    if (a == 0.0 || a == total) {
        out.degenerate = true;
        out.note = a == 0.0 ? "no violations" : "every observation is a violation";
    }
    return out;
}

TestResult dq_test(const HitSeries& hits, std::span<const double> forecasts, std::size_t lags) {
    check_lengths(hits.size(), forecasts.size(), "dq_test");
    if (hits.size() <= lags + 5) {
        throw InvalidInput(fmt::format("DQ test with {} lags needs more than {} observations, got {}", lags, lags + 5,
                                       hits.size()));
    }
    const double alpha = hits.level.value();
    const auto rows = static_cast<Eigen::Index>(hits.size() - lags);
    const auto cols = static_cast<Eigen::Index>(lags + 2);
    Eigen::MatrixXd x(rows, cols);
    Eigen::VectorXd y(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const std::size_t t = static_cast<std::size_t>(i) + lags;
        y(i) = hits.hits[t] - alpha;
        x(i, 0) = 1.0;
        for (std::size_t k = 1; k <= lags; ++k) x(i, static_cast<Eigen::Index>(k)) = hits.hits[t - k] - alpha;
        x(i, cols - 1) = forecasts[t];
    }

    TestResult out;
    out.dof = static_cast<int>(lags + 2);
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() < cols) {
        out.degenerate = true;
        out.note = fmt::format("singular design matrix (rank {} of {})", qr.rank(), cols);
        return out;
    }
    const Eigen::VectorXd beta = qr.solve(y);
    const double statistic = (x * beta).squaredNorm() / (alpha * (1.0 - alpha));
    return chi2_result(statistic, out.dof);
}

QuantileScores quantile_scores(const ReturnSeries& returns, const ForecastSeries& forecasts) {
    const auto rd = returns.dates();
    const auto fd = forecasts.dates();
    if (!std::equal(rd.begin(), rd.end(), fd.begin(), fd.end())) {
        throw AlignmentError(fmt::format("returns of {} and forecasts of {} / {} are not date-aligned",
                                         returns.asset_id(), forecasts.asset_id(), forecasts.model_id()));
    }
    return quantile_scores(returns.values(), forecasts.values(), forecasts.level());
}

QuantileScores quantile_scores(std::span<const double> returns, std::span<const double> forecasts,
                               QuantileLevel level) {
    check_lengths(returns.size(), forecasts.size(), "quantile_scores");
    const double alpha = level.value();
    QuantileScores out;
    out.per_day.resize(returns.size());
    for (std::size_t t = 0; t < returns.size(); ++t) {
        const double hit = returns[t] < forecasts[t] ? 1.0 : 0.0;
        out.per_day[t] = (alpha - hit) * (returns[t] - forecasts[t]);
    }
    out.total = std::accumulate(out.per_day.begin(), out.per_day.end(), 0.0);
    out.mean = out.per_day.empty() ? 0.0 : out.total / static_cast<double>(out.per_day.size());
    return out;
}

DmResult dm_test(std::span<const double> scores_i, std::span<const double> scores_j, const DmOptions& options) {
    check_lengths(scores_i.size(), scores_j.size(), "dm_test");
    const std::size_t n = scores_i.size();
    if (n < 30) throw InvalidInput(fmt::format("DM test needs at least 30 observations, got {}", n));
    if (options.hac_lags >= n) throw InvalidInput("DM HAC lag count must be below the sample size");

    std::vector<double> d(n);
    for (std::size_t t = 0; t < n; ++t) d[t] = scores_i[t] - scores_j[t];
    const auto [mean, sample_var] = moments(d);
    double var = sample_var;
    for (std::size_t k = 1; k <= options.hac_lags; ++k) {
        double cov = 0.0;
        for (std::size_t t = k; t < n; ++t) cov += (d[t] - mean) * (d[t - k] - mean);
        cov /= static_cast<double>(n - 1);
        var += 2.0 * (1.0 - static_cast<double>(k) / static_cast<double>(options.hac_lags + 1)) * cov;
    }

    DmResult out;
    if (!(var > 0.0)) {
        if (mean == 0.0) return out;
        out.infinite = true;
        out.statistic = mean > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        out.p_value = mean > 0.0 ? 0.0 : 1.0;
        return out;
    }
    out.statistic = mean / std::sqrt(var / static_cast<double>(n));
    out.p_value = normal_cdf(-out.statistic);
    return out;
}

TTestResult ae_dev_ttest(std::span<const double> dev_i, std::span<const double> dev_j, TTestKind kind) {
    check_lengths(dev_i.size(), dev_j.size(), "ae_dev_ttest");
    const std::size_t n = dev_i.size();
    if (n < 3) throw InvalidInput(fmt::format("t-test needs at least 3 assets, got {}", n));
    const double dn = static_cast<double>(n);

    TTestResult out;
    double diff = 0.0;
    double se2 = 0.0;
    if (kind == TTestKind::paired) {
        std::vector<double> d(n);
        for (std::size_t k = 0; k < n; ++k) d[k] = dev_i[k] - dev_j[k];
        const auto m = moments(d);
        diff = m.mean;
        se2 = m.variance / dn;
        out.df = dn - 1.0;
    } else {
        const auto mi = moments(dev_i);
        const auto mj = moments(dev_j);
        const double vi = mi.variance / dn;
        const double vj = mj.variance / dn;
        diff = mi.mean - mj.mean;
        se2 = vi + vj;
        out.df = se2 > 0.0 ? se2 * se2 / (vi * vi / (dn - 1.0) + vj * vj / (dn - 1.0)) : dn - 1.0;
    }

    if (!(se2 > 0.0)) {
        out.degenerate = true;
        if (diff == 0.0) return out;
        out.statistic = diff > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        out.p_value = diff > 0.0 ? 0.0 : 1.0;
        return out;
    }
    out.statistic = diff / std::sqrt(se2);
    out.p_value = student_t_cdf(-out.statistic, out.df);
    return out;
}

BacktestReport backtest(const ReturnSeries& returns, const ForecastSeries& forecasts, std::size_t dq_lags) {
    const HitSeries hits = compute_hits(returns, forecasts);
    const QuantileScores qs = quantile_scores(returns.values(), forecasts.values(), forecasts.level());

    BacktestReport out;
    out.asset_id = returns.asset_id();
    out.model_id = forecasts.model_id();
    out.level = forecasts.level().value();
    out.observations = hits.size();
    out.violations = hits.violations();
    out.ae = ae_ratio(hits);
    out.uc = uc_test(hits);
    out.cc = cc_test(hits);
    out.dq = dq_test(hits, forecasts.values(), dq_lags);
    out.mean_qs = qs.mean;
    out.total_qs = qs.total;
    return out;
}

}  // namespace varbench
