#pragma once

#include "varbench/backtest.hpp"
#include "varbench/config.hpp"
#include "varbench/date.hpp"

#include <string>
#include <vector>

namespace varbench {

enum class Status { ok, failed, skipped };

std::string to_string(Status status);

/// Fate of one configured (asset, model, level) combination.
struct Outcome {
    std::string asset_id;
    std::string model_id;
    double level = 0.0;
    Status status = Status::ok;
    std::string diagnostic;
};

/// Per-day quantile scores behind a BacktestReport, kept for DM tests.
struct ScoreSeries {
    std::string asset_id;
    std::string model_id;
    double level = 0.0;
    std::vector<Date> dates;
    std::vector<double> scores;
};

/// Everything a run produces. `assets`, `models` and `levels` keep the
/// configured order; reports and scores are sorted by (asset, model, level)
/// in that order, and `outcomes` holds one entry per configured combination.
struct ReportBundle {
    std::vector<std::string> assets;
    std::vector<std::string> models;
    std::vector<double> levels;
    std::size_t dq_lags = 4;
    TTestKind ttest = TTestKind::welch;
    std::vector<BacktestReport> reports;
    std::vector<ScoreSeries> scores;
    std::vector<Outcome> outcomes;

    std::size_t count(Status status) const;
};

/// Loads every input, then evaluates each asset on a bounded worker pool.
/// Input and split problems throw (ConfigError, SchemaError, IoError);
/// failures inside a single combination are recorded in `outcomes`.
ReportBundle run(const RunConfig& config);

/// Deterministic per-task seed.
std::uint64_t derive_seed(std::uint64_t base, std::size_t asset, std::size_t model, std::size_t level);

}  // namespace varbench
