#include "varbench/historical.hpp"

#include "varbench/errors.hpp"

#include <fmt/format.h>

namespace varbench {

double historical_var(const ReturnSeries& window, QuantileLevel level) {
    if (window.size() < 2) {
        throw InvalidInput(fmt::format("historical VaR needs at least 2 returns, got {}", window.size()));
    }
    return empirical_quantile(window.values(), level);
}

std::vector<ForecastSeries> historical_forecasts(const ReturnSeries& series, const WindowSpec& spec,
                                                 const Date& test_start, std::span<const QuantileLevel> levels,
                                                 const std::string& model_id) {
    const auto windows = rolling_windows(series, spec, test_start);
    std::vector<Date> dates;
    std::vector<std::vector<double>> values(levels.size());
    for (const auto& w : windows) {
        if (!(w.window.dates().back() < w.target_dates.front())) {
            throw InvalidState(fmt::format("window ending {} reaches target {}", w.window.dates().back().to_string(),
                                           w.target_dates.front().to_string()));
        }
        for (std::size_t k = 0; k < levels.size(); ++k) {
            const double var = historical_var(w.window, levels[k]);
            values[k].insert(values[k].end(), w.target_dates.size(), var);
        }
        dates.insert(dates.end(), w.target_dates.begin(), w.target_dates.end());
    }
    std::vector<ForecastSeries> out;
    for (std::size_t k = 0; k < levels.size(); ++k) {
        out.emplace_back(series.asset_id(), model_id, levels[k], dates, std::move(values[k]));
    }
    return out;
}

}  // namespace varbench
