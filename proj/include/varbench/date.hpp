#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace varbench {

/// Calendar date used as an ordered label. No business-day logic.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
    Date(int year, unsigned month, unsigned day);

    /// Parses `YYYY-MM-DD`; throws InvalidInput on anything else.
    static Date parse(std::string_view text);

    std::string to_string() const;
    constexpr std::chrono::sys_days sys_days() const { return days_; }

    /// Date shifted by a number of calendar days.
    Date plus_days(long n) const { return Date{days_ + std::chrono::days{n}}; }

    friend constexpr auto operator<=>(const Date&, const Date&) = default;

private:
    std::chrono::sys_days days_{};
};

}  // namespace varbench
