#pragma once

#include "varbench/date.hpp"
#include "varbench/series.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

namespace varbench::testing {

inline ReturnSeries make_series(std::vector<double> returns, Date start = Date{2020, 1, 1},
                                const std::string& id = "A") {
    std::vector<Date> dates;
    dates.reserve(returns.size());
    for (std::size_t i = 0; i < returns.size(); ++i) dates.push_back(start.plus_days(static_cast<long>(i)));
    return ReturnSeries(id, std::move(dates), std::move(returns));
}

inline std::vector<double> normal_draws(std::size_t n, std::uint64_t seed, double sd = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, sd);
    std::vector<double> out(n);
    for (auto& x : out) x = g(rng);
    return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Fresh directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("varbench-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace varbench::testing
