// Writes the bundled three-asset synthetic dataset: price files, a run
// configuration, and two external forecast files per asset built from the
// true data-generating process ("Oracle" at the four tail levels, "Deciles"
// at 0.1..0.9).

#include "varbench/date.hpp"
#include "varbench/dist.hpp"
#include "varbench/garch.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/os.h>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace {

using varbench::Date;
using varbench::GarchParams;

struct SyntheticAsset {
    std::string id;
    GarchParams params;
};

std::vector<SyntheticAsset> assets() {
    GarchParams a;
    a.mu = 3e-4;
    a.omega = 2e-6;
    a.alpha1 = 0.08;
    a.beta1 = 0.90;
    a.dist = varbench::Normal{};

    GarchParams b;
    b.mu = 2e-4;
    b.omega = 3e-6;
    b.alpha1 = 0.10;
    b.beta1 = 0.87;
    b.dist = varbench::StudentT{6.0};

    GarchParams c;
    c.mu = 4e-4;
    c.omega = 4e-6;
    c.alpha1 = 0.06;
    c.beta1 = 0.92;
    c.dist = varbench::HansenSkewT{5.0, -0.2};

    return {{"SYN1", a}, {"SYN2", b}, {"SYN3", c}};
}

bool is_weekday(const Date& d) {
    const std::chrono::weekday wd{d.sys_days()};
    return wd != std::chrono::Saturday && wd != std::chrono::Sunday;
}

std::vector<Date> business_days(Date start, std::size_t n) {
    std::vector<Date> out;
    for (Date d = start; out.size() < n; d = d.plus_days(1)) {
        if (is_weekday(d)) out.push_back(d);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generate the bundled synthetic dataset"};
    std::string out_dir = "data/synthetic";
    std::uint64_t seed = 20240917;
    std::size_t test_days = 2268;
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--seed", seed, "Simulation seed");
    app.add_option("--test-days", test_days, "Number of test-period returns");
    CLI11_PARSE(app, argc, argv);

    const Date first_price{2010, 1, 4};
    const Date train_end{2014, 12, 31};
    const Date test_start{2015, 1, 1};

    // Returns are dated at the later of the two prices they connect.
    std::size_t train_returns = 0;
    for (const auto& d : business_days(first_price, 4000)) {
        if (first_price < d && d <= train_end) ++train_returns;
    }
    const std::size_t n_returns = train_returns + test_days;
    const auto dates = business_days(first_price, n_returns + 1);
    const Date test_end = dates.back();

    const std::filesystem::path root(out_dir);
    std::filesystem::create_directories(root / "prices");
    std::filesystem::create_directories(root / "forecasts");

    const std::vector<double> tail_levels{0.01, 0.025, 0.05, 0.1};
    std::vector<double> deciles;
    for (int k = 1; k <= 9; ++k) deciles.push_back(k / 10.0);

    const auto specs = assets();
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& spec = specs[i];
        const auto returns = varbench::simulate_garch_path(spec.params, n_returns, seed + i);
        const auto path = varbench::garch_filter(spec.params, returns);

        auto prices = fmt::output_file((root / "prices" / (spec.id + ".csv")).string());
        prices.print("date,price\n");
        double p = 100.0;
        prices.print("{},{:.10f}\n", dates[0].to_string(), p);
        for (std::size_t t = 0; t < n_returns; ++t) {
            p *= 1.0 + returns[t];
            prices.print("{},{:.10f}\n", dates[t + 1].to_string(), p);
        }
        prices.close();

        const auto write_forecasts = [&](const std::string& model, const std::vector<double>& levels) {
            auto out = fmt::output_file((root / "forecasts" / fmt::format("{}_{}.csv", spec.id, model)).string());
            out.print("date,level,var_forecast\n");
            for (std::size_t t = train_returns; t < n_returns; ++t) {
                const double sigma = std::sqrt(path.variance[t]);
                for (double level : levels) {
                    const double q = varbench::garch_var_forecast(spec.params, path.mean[t], sigma,
                                                                  varbench::QuantileLevel(level));
                    out.print("{},{},{:.10f}\n", dates[t + 1].to_string(), level, q);
                }
            }
        };
        write_forecasts("Oracle", tail_levels);
        write_forecasts("Deciles", deciles);
    }

    auto config = fmt::output_file((root / "config.yaml").string());
    config.print("# Three simulated GARCH(1,1) assets with normal, Student-t and skewed-t shocks.\n");
    config.print("assets:\n");
    for (const auto& spec : specs) config.print("  - {{id: {0}, path: prices/{0}.csv}}\n", spec.id);
    config.print("split:\n  train_end: {}\n  test_end: {}\n", train_end.to_string(), test_end.to_string());
    config.print("levels: [0.01, 0.025, 0.05, 0.1]\n");
    config.print("window: 512\ncadences: [1, 21, 63]\nseed: 7\ndq_lags: 4\nttest: welch\n");
    config.print("output_dir: report\n");
    config.print("models:\n");
    config.print("  - {{type: historical}}\n");
    config.print("  - {{type: garch, dist: normal}}\n");
    config.print("  - {{type: garch, dist: student_t}}\n");
    config.print("  - {{type: garch, dist: skew_t}}\n");
    config.print("  - {{type: garch, dist: edf}}\n");
    config.print("  - {{type: gas}}\n");
    config.print("  - {{type: external, name: Oracle, path: \"forecasts/{{asset}}_Oracle.csv\"}}\n");
    config.print("  - {{type: external, name: Deciles, path: \"forecasts/{{asset}}_Deciles.csv\"}}\n");
    config.close();

    fmt::print("wrote {} assets, {} train and {} test returns, test span {} to {}\n", specs.size(), train_returns,
               test_days, test_start.to_string(), test_end.to_string());
    return 0;
}
