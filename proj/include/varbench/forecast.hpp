#pragma once

#include "varbench/date.hpp"
#include "varbench/dist.hpp"

#include <span>
#include <string>
#include <vector>

namespace varbench {

/// One-day-ahead VaR forecasts for an (asset, model) pair at a fixed level.
class ForecastSeries {
public:
    ForecastSeries(std::string asset_id, std::string model_id, QuantileLevel level, std::vector<Date> dates,
                   std::vector<double> forecasts);

    const std::string& asset_id() const noexcept { return asset_id_; }
    const std::string& model_id() const noexcept { return model_id_; }
    QuantileLevel level() const noexcept { return level_; }
    std::span<const Date> dates() const noexcept { return dates_; }
    std::span<const double> values() const noexcept { return forecasts_; }
    std::size_t size() const noexcept { return forecasts_.size(); }

private:
    std::string asset_id_;
    std::string model_id_;
    QuantileLevel level_;
    std::vector<Date> dates_;
    std::vector<double> forecasts_;
};

}  // namespace varbench
