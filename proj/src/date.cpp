#include "varbench/date.hpp"

#include "varbench/errors.hpp"

#include <charconv>

#include <fmt/format.h>

namespace varbench {

namespace {

bool parse_digits(std::string_view text, int& out) {
    if (text.empty()) return false;
    for (char c : text) {
        if (c < '0' || c > '9') return false;
    }
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day) {
    const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                          std::chrono::day{day}};
    if (!ymd.ok()) throw InvalidInput(fmt::format("invalid calendar date {}-{}-{}", year, month, day));
    days_ = std::chrono::sys_days{ymd};
}

Date Date::parse(std::string_view text) {
    int y = 0;
    int m = 0;
    int d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !parse_digits(text.substr(0, 4), y) ||
        !parse_digits(text.substr(5, 2), m) || !parse_digits(text.substr(8, 2), d)) {
        throw InvalidInput(fmt::format("expected ISO-8601 date YYYY-MM-DD, got '{}'", text));
    }
    return Date{y, static_cast<unsigned>(m), static_cast<unsigned>(d)};
}

std::string Date::to_string() const {
    const std::chrono::year_month_day ymd{days_};
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
}

}  // namespace varbench
