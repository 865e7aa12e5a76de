#include "varbench/external.hpp"

#include "csv.hpp"
#include "varbench/errors.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <utility>

#include <fmt/format.h>

namespace varbench {

namespace {

using Rows = std::map<double, std::vector<std::pair<Date, double>>>;

Rows read_rows(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));

    Rows rows;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
        if (csv::trim(view).empty()) continue;
        const auto fields = csv::split(view);
        if (!have_header) {
            if (fields.size() != 3 || fields[0] != "date" || fields[1] != "level" || fields[2] != "var_forecast") {
                throw SchemaError(fmt::format("{}: header must be 'date,level,var_forecast'", path.string()));
            }
            have_header = true;
            continue;
        }
        if (fields.size() != 3) throw SchemaError(fmt::format("{}:{}: expected 3 fields", path.string(), line_no));
        Date date;
        try {
            date = Date::parse(fields[0]);
        } catch (const InvalidInput& e) {
            throw SchemaError(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
        }
        const auto level = csv::parse_double(fields[1]);
        if (!level || !(*level > 0.0 && *level < 1.0)) {
            throw SchemaError(fmt::format("{}:{}: level must be a number in (0, 1), got '{}'", path.string(), line_no,
                                          fields[1]));
        }
        const auto value = csv::parse_double(fields[2]);
        if (!value) {
            throw SchemaError(fmt::format("{}:{}: missing or non-numeric var_forecast '{}'", path.string(), line_no,
                                          fields[2]));
        }
        rows[*level].emplace_back(date, *value);
    }
    if (!have_header) throw SchemaError(fmt::format("{}: empty file", path.string()));
    if (rows.empty()) throw SchemaError(fmt::format("{}: no forecast rows", path.string()));

    for (auto& [level, entries] : rows) {
        std::stable_sort(entries.begin(), entries.end(),
                         [](const auto& x, const auto& y) { return x.first < y.first; });
        const auto dup = std::adjacent_find(entries.begin(), entries.end(),
                                            [](const auto& x, const auto& y) { return x.first == y.first; });
        if (dup != entries.end()) {
            throw SchemaError(fmt::format("{}: duplicate row for date {} at level {}", path.string(),
                                          dup->first.to_string(), level));
        }
    }
    return rows;
}

}  // namespace

std::vector<ForecastSeries> load_external_forecasts(const std::filesystem::path& path, const std::string& asset_id,
                                                    const std::string& model_id) {
    std::vector<ForecastSeries> out;
    for (auto& [level, entries] : read_rows(path)) {
        std::vector<Date> dates;
        std::vector<double> values;
        dates.reserve(entries.size());
        values.reserve(entries.size());
        for (const auto& [d, v] : entries) {
            dates.push_back(d);
            values.push_back(v);
        }
        out.emplace_back(asset_id, model_id, QuantileLevel(level), std::move(dates), std::move(values));
    }
    return out;
}

ExternalFileSummary validate_external_file(const std::filesystem::path& path) {
    const auto rows = read_rows(path);
    ExternalFileSummary out;
    bool first = true;
    for (const auto& [level, entries] : rows) {
        out.levels.push_back(level);
        out.rows += entries.size();
        if (first || entries.front().first < out.first) out.first = entries.front().first;
        if (first || out.last < entries.back().first) out.last = entries.back().first;
        first = false;
    }
    return out;
}

}  // namespace varbench
