#pragma once

#include "varbench/dist.hpp"
#include "varbench/forecast.hpp"
#include "varbench/series.hpp"

#include <span>
#include <string>
#include <vector>

namespace varbench {

/// Empirical alpha-quantile of the window returns.
double historical_var(const ReturnSeries& window, QuantileLevel level);

/// Rolling historical VaR over every observation of `series` dated on or after
/// `test_start`. Each block of `spec.step` days shares the window of the
/// `spec.length` returns that precede the block. One series per level.
std::vector<ForecastSeries> historical_forecasts(const ReturnSeries& series, const WindowSpec& spec,
                                                 const Date& test_start, std::span<const QuantileLevel> levels,
                                                 const std::string& model_id);

}  // namespace varbench
