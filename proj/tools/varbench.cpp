#include "varbench/config.hpp"
#include "varbench/errors.hpp"
#include "varbench/external.hpp"
#include "varbench/harness.hpp"
#include "varbench/report.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <filesystem>
#include <string>

namespace {

enum ExitCode : int { kOk = 0, kError = 1, kConfigError = 2, kPartialFailure = 3 };

int run_command(const std::string& config_path, const std::string& output_override) {
    auto config = varbench::load_config(config_path);
    if (!output_override.empty()) config.output_dir = output_override;
    const auto bundle = varbench::run(config);
    if (bundle.reports.empty()) {
        spdlog::error("every configured combination failed; no reports written");
        return kPartialFailure;
    }
    varbench::emit_reports(bundle, config.output_dir);
    fmt::print("wrote reports to {}\n", config.output_dir.string());
    if (bundle.count(varbench::Status::failed) > 0) {
        fmt::print("{} combination(s) failed; see outcomes.csv\n", bundle.count(varbench::Status::failed));
        return kPartialFailure;
    }
    return kOk;
}

int validate_command(const std::string& path) {
    const auto summary = varbench::validate_external_file(path);
    std::string levels;
    for (double l : summary.levels) levels += (levels.empty() ? "" : ", ") + fmt::format("{}", l);
    fmt::print("{}: ok, {} rows, levels [{}], dates {} to {}\n", path, summary.rows, levels,
               summary.first.to_string(), summary.last.to_string());
    return kOk;
}

int report_command(const std::string& bundle_dir, const std::string& output_dir) {
    const auto bundle = varbench::load_bundle(bundle_dir);
    const std::filesystem::path out = output_dir.empty() ? bundle_dir : output_dir;
    varbench::emit_reports(bundle, out);
    fmt::print("wrote reports to {}\n", out.string());
    return bundle.count(varbench::Status::failed) > 0 ? kPartialFailure : kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Value-at-Risk forecasting and backtesting"};
    app.require_subcommand(1);

    bool verbose = false;
    bool quiet = false;
    app.add_flag("-v,--verbose", verbose, "Debug logging");
    app.add_flag("-q,--quiet", quiet, "Only log errors");

    std::string config_path;
    std::string run_output;
    auto* run = app.add_subcommand("run", "Run every configured model and write the report bundle");
    run->add_option("--config", config_path, "Run configuration (YAML)")->required();
    run->add_option("--output", run_output, "Override the configured output directory");

    std::string forecasts_path;
    auto* validate = app.add_subcommand("validate", "Check an external forecast file against the schema");
    validate->add_option("--forecasts", forecasts_path, "date,level,var_forecast file")->required();

    std::string bundle_dir;
    std::string report_output;
    auto* report = app.add_subcommand("report", "Re-render the tables of an existing report bundle");
    report->add_option("--bundle", bundle_dir, "Directory written by 'varbench run'")->required();
    report->add_option("--output", report_output, "Write tables here instead of the bundle directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    auto logger = spdlog::stderr_color_mt("varbench");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(quiet ? spdlog::level::err : verbose ? spdlog::level::debug : spdlog::level::info);

    try {
        if (*run) return run_command(config_path, run_output);
        if (*validate) return validate_command(forecasts_path);
        if (*report) return report_command(bundle_dir, report_output);
    } catch (const varbench::ConfigError& e) {
        spdlog::error("config error: {}", e.what());
        return kConfigError;
    } catch (const varbench::SchemaError& e) {
        spdlog::error("schema error: {}", e.what());
        return kConfigError;
    } catch (const varbench::IoError& e) {
        spdlog::error("{}", e.what());
        return *run ? kError : kConfigError;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kError;
    }
    return kError;
}
