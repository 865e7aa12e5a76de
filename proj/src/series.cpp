#include "varbench/series.hpp"

#include "csv.hpp"
#include "varbench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

namespace varbench {

namespace {

void check_dates(std::span<const Date> dates, const std::string& what) {
    for (std::size_t i = 1; i < dates.size(); ++i) {
        if (!(dates[i - 1] < dates[i])) {
            throw InvalidInput(fmt::format("{}: dates not strictly increasing at {} -> {}", what,
                                           dates[i - 1].to_string(), dates[i].to_string()));
        }
    }
}

struct RawColumns {
    std::string value_column;
    std::vector<Date> dates;
    std::vector<double> values;
};

RawColumns read_two_columns(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));

    RawColumns out;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) continue;
        const auto fields = csv::split(line);
        if (!have_header) {
            if (fields.size() != 2 || fields[0] != "date" ||
                (fields[1] != "price" && fields[1] != "return")) {
                throw SchemaError(fmt::format("{}: header must be 'date,price' or 'date,return'",
                                              path.string()));
            }
            out.value_column = std::string(fields[1]);
            have_header = true;
            continue;
        }
        if (fields.size() != 2) {
            throw SchemaError(fmt::format("{}:{}: expected 2 fields", path.string(), line_no));
        }
        try {
            out.dates.push_back(Date::parse(fields[0]));
        } catch (const InvalidInput& e) {
            throw SchemaError(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
        }
        const auto value = csv::parse_double(fields[1]);
        if (!value) {
            throw SchemaError(fmt::format("{}:{}: missing or non-numeric {} '{}'", path.string(),
                                          line_no, out.value_column, fields[1]));
        }
        out.values.push_back(*value);
    }
    if (!have_header) throw SchemaError(fmt::format("{}: empty file", path.string()));
    return out;
}

}  // namespace

PriceSeries::PriceSeries(std::string asset_id, std::vector<Date> dates, std::vector<double> prices)
    : asset_id_(std::move(asset_id)), dates_(std::move(dates)), prices_(std::move(prices)) {
    if (dates_.size() != prices_.size()) {
        throw InvalidInput(fmt::format("{}: {} dates but {} prices", asset_id_, dates_.size(),
                                       prices_.size()));
    }
    if (prices_.size() < 2) throw InvalidInput(fmt::format("{}: need at least 2 prices", asset_id_));
    check_dates(dates_, asset_id_);
    for (std::size_t i = 0; i < prices_.size(); ++i) {
        if (!std::isfinite(prices_[i]) || prices_[i] <= 0.0) {
            throw InvalidInput(fmt::format("{}: non-positive price {} on {}", asset_id_, prices_[i],
                                           dates_[i].to_string()));
        }
    }
}

ReturnSeries::ReturnSeries(std::string asset_id, std::vector<Date> dates, std::vector<double> returns)
    : asset_id_(std::move(asset_id)), dates_(std::move(dates)), returns_(std::move(returns)) {
    if (dates_.size() != returns_.size()) {
        throw InvalidInput(fmt::format("{}: {} dates but {} returns", asset_id_, dates_.size(),
                                       returns_.size()));
    }
    check_dates(dates_, asset_id_);
    for (std::size_t i = 0; i < returns_.size(); ++i) {
        if (!std::isfinite(returns_[i]) || returns_[i] <= -1.0) {
            throw InvalidInput(fmt::format("{}: invalid return {} on {}", asset_id_, returns_[i],
                                           dates_[i].to_string()));
        }
    }
}

ReturnSeries ReturnSeries::slice(std::size_t first, std::size_t count) const {
    if (first > size() || count > size() - first) {
        throw InvalidInput(fmt::format("{}: slice [{}, {}) out of range (size {})", asset_id_, first,
                                       first + count, size()));
    }
    ReturnSeries out;
    out.asset_id_ = asset_id_;
    out.dates_.assign(dates_.begin() + first, dates_.begin() + first + count);
    out.returns_.assign(returns_.begin() + first, returns_.begin() + first + count);
    return out;
}

std::size_t ReturnSeries::lower_bound(const Date& date) const {
    return static_cast<std::size_t>(std::lower_bound(dates_.begin(), dates_.end(), date) - dates_.begin());
}

ReturnSeries simple_returns(const PriceSeries& prices) {
    const auto p = prices.prices();
    const auto d = prices.dates();
    std::vector<Date> dates(d.begin() + 1, d.end());
    std::vector<double> returns(p.size() - 1);
    for (std::size_t t = 0; t + 1 < p.size(); ++t) returns[t] = (p[t + 1] - p[t]) / p[t];
    return ReturnSeries(prices.asset_id(), std::move(dates), std::move(returns));
}

SplitResult split(const ReturnSeries& series, const SplitSpec& spec) {
    if (series.empty()) throw InvalidSplit("cannot split an empty series");
    if (spec.validation_end && !(spec.train_end < *spec.validation_end && *spec.validation_end < spec.test_end)) {
        throw InvalidSplit("split dates must satisfy train_end < validation_end < test_end");
    }
    if (!(spec.train_end < spec.test_end)) throw InvalidSplit("split requires train_end < test_end");

    const auto dates = series.dates();
    if (spec.test_end > dates.back()) {
        throw InvalidSplit(fmt::format("test_end {} is after the last observation {}",
                                       spec.test_end.to_string(), dates.back().to_string()));
    }
    // Index one past the last observation dated on or before `d`.
    auto end_of = [&](const Date& d) {
        return static_cast<std::size_t>(std::upper_bound(dates.begin(), dates.end(), d) - dates.begin());
    };
    const std::size_t train_end = end_of(spec.train_end);
    const std::size_t valid_end = spec.validation_end ? end_of(*spec.validation_end) : train_end;
    const std::size_t test_end = end_of(spec.test_end);

    if (train_end == 0) throw InvalidSplit("train segment is empty (train_end before first date)");
    if (spec.validation_end && valid_end == train_end) throw InvalidSplit("validation segment is empty");
    if (test_end == valid_end) throw InvalidSplit("test segment is empty");

    SplitResult out;
    out.train = series.slice(0, train_end);
    if (spec.validation_end) out.validation = series.slice(train_end, valid_end - train_end);
    out.test = series.slice(valid_end, test_end - valid_end);
    return out;
}

std::vector<RollingWindow> rolling_windows(const ReturnSeries& series, const WindowSpec& spec,
                                           const Date& forecast_origin_start) {
    if (spec.length < 2) throw InvalidInput("window length must be at least 2");
    if (spec.step < 1) throw InvalidInput("window step must be at least 1");
    const std::size_t first_target = series.lower_bound(forecast_origin_start);
    if (first_target < spec.length) {
        throw InvalidInput(fmt::format("{}: only {} observations precede {}, window needs {}",
                                       series.asset_id(), first_target,
                                       forecast_origin_start.to_string(), spec.length));
    }
    std::vector<RollingWindow> out;
    const auto dates = series.dates();
    for (std::size_t origin = first_target; origin < series.size(); origin += spec.step) {
        const std::size_t block = std::min(spec.step, series.size() - origin);
        RollingWindow w;
        w.window = series.slice(origin - spec.length, spec.length);
        w.target_dates.assign(dates.begin() + origin, dates.begin() + origin + block);
        w.target_begin = origin;
        out.push_back(std::move(w));
    }
    return out;
}

PriceSeries read_price_file(const std::filesystem::path& path, const std::string& asset_id) {
    auto raw = read_two_columns(path);
    if (raw.value_column != "price") throw SchemaError(fmt::format("{}: not a price file", path.string()));
    try {
        return PriceSeries(asset_id, std::move(raw.dates), std::move(raw.values));
    } catch (const InvalidInput& e) {
        throw SchemaError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

ReturnSeries read_return_file(const std::filesystem::path& path, const std::string& asset_id) {
    auto raw = read_two_columns(path);
    try {
        if (raw.value_column == "price") {
            return simple_returns(PriceSeries(asset_id, std::move(raw.dates), std::move(raw.values)));
        }
        return ReturnSeries(asset_id, std::move(raw.dates), std::move(raw.values));
    } catch (const InvalidInput& e) {
        throw SchemaError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

}  // namespace varbench
