#pragma once

#include "varbench/date.hpp"
#include "varbench/forecast.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace varbench {

/// Reads a `date,level,var_forecast` file: one ForecastSeries per distinct
/// level, in ascending level order, each sorted by date. Throws IoError when
/// the file cannot be opened and SchemaError on a bad header, malformed row,
/// level outside (0, 1), duplicate (date, level) pair, or no data rows.
std::vector<ForecastSeries> load_external_forecasts(const std::filesystem::path& path, const std::string& asset_id,
                                                    const std::string& model_id);

struct ExternalFileSummary {
    std::size_t rows = 0;
    std::vector<double> levels;
    Date first;
    Date last;
};

/// Schema check used by `varbench validate`.
ExternalFileSummary validate_external_file(const std::filesystem::path& path);

}  // namespace varbench
