#pragma once

#include "varbench/date.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace varbench {

/// Closing prices for one asset. Dates strictly increasing, prices > 0, at
/// least two observations.
class PriceSeries {
public:
    PriceSeries(std::string asset_id, std::vector<Date> dates, std::vector<double> prices);

    const std::string& asset_id() const noexcept { return asset_id_; }
    std::span<const Date> dates() const noexcept { return dates_; }
    std::span<const double> prices() const noexcept { return prices_; }
    std::size_t size() const noexcept { return prices_.size(); }

private:
    std::string asset_id_;
    std::vector<Date> dates_;
    std::vector<double> prices_;
};

/// Date-indexed simple returns for one asset. Every return is finite and
/// greater than -1. May be empty (e.g. as a slice); operations that need data
/// check length themselves.
class ReturnSeries {
public:
    ReturnSeries() = default;
    ReturnSeries(std::string asset_id, std::vector<Date> dates, std::vector<double> returns);

    const std::string& asset_id() const noexcept { return asset_id_; }
    std::span<const Date> dates() const noexcept { return dates_; }
    std::span<const double> values() const noexcept { return returns_; }
    std::size_t size() const noexcept { return returns_.size(); }
    bool empty() const noexcept { return returns_.empty(); }

    /// Contiguous sub-series [first, first + count).
    ReturnSeries slice(std::size_t first, std::size_t count) const;

    /// Index of the first observation dated on or after `date` (size() if none).
    std::size_t lower_bound(const Date& date) const;

private:
    std::string asset_id_;
    std::vector<Date> dates_;
    std::vector<double> returns_;
};

struct SplitSpec {
    Date train_end;
    std::optional<Date> validation_end;
    Date test_end;
};

struct SplitResult {
    ReturnSeries train;
    std::optional<ReturnSeries> validation;
    ReturnSeries test;
};

struct WindowSpec {
    std::size_t length = 512;
    std::size_t step = 1;
};

struct RollingWindow {
    ReturnSeries window;
    std::vector<Date> target_dates;
    std::size_t target_begin = 0;  // index of the first target in the source series
};

/// r[t] = (p[t+1] - p[t]) / p[t], dated at the later price.
ReturnSeries simple_returns(const PriceSeries& prices);

/// Partitions `series` into train (dates <= train_end), optional validation
/// (train_end < date <= validation_end) and test (up to test_end). Throws
/// InvalidSplit on out-of-range dates or any empty segment.
SplitResult split(const ReturnSeries& series, const SplitSpec& spec);

/// Rolling windows of `spec.length` observations, each followed by a block of
/// up to `spec.step` target dates. The first target is the first observation
/// on or after `forecast_origin_start`; blocks continue to the end of
/// `series`, the last one possibly shorter.
std::vector<RollingWindow> rolling_windows(const ReturnSeries& series, const WindowSpec& spec,
                                           const Date& forecast_origin_start);

/// Reads a `date,price` or `date,return` delimited file. Price files are
/// converted with simple_returns.
ReturnSeries read_return_file(const std::filesystem::path& path, const std::string& asset_id);
PriceSeries read_price_file(const std::filesystem::path& path, const std::string& asset_id);

}  // namespace varbench
