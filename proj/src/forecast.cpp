#include "varbench/forecast.hpp"

#include "varbench/errors.hpp"

#include <cmath>

#include <fmt/format.h>

namespace varbench {

ForecastSeries::ForecastSeries(std::string asset_id, std::string model_id, QuantileLevel level,
                               std::vector<Date> dates, std::vector<double> forecasts)
    : asset_id_(std::move(asset_id)),
      model_id_(std::move(model_id)),
      level_(level),
      dates_(std::move(dates)),
      forecasts_(std::move(forecasts)) {
    if (dates_.size() != forecasts_.size()) {
        throw InvalidInput(fmt::format("{}/{}: {} dates but {} forecasts", asset_id_, model_id_, dates_.size(),
                                       forecasts_.size()));
    }
    for (std::size_t i = 0; i < forecasts_.size(); ++i) {
        if (i > 0 && !(dates_[i - 1] < dates_[i])) {
            throw InvalidInput(fmt::format("{}/{}: forecast dates not strictly increasing at {}", asset_id_,
                                           model_id_, dates_[i].to_string()));
        }
        if (!std::isfinite(forecasts_[i])) {
            throw InvalidInput(fmt::format("{}/{}: non-finite forecast on {}", asset_id_, model_id_,
                                           dates_[i].to_string()));
        }
    }
}

}  // namespace varbench
