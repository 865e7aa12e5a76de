#pragma once

#include "varbench/backtest.hpp"
#include "varbench/dist.hpp"
#include "varbench/garch.hpp"
#include "varbench/series.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace varbench {

struct AssetSpec {
    std::string id;
    std::filesystem::path path;
};

struct HistoricalModel {
    std::optional<std::string> name;
    std::optional<std::size_t> window;  // overrides RunConfig::window
};

struct GarchModel {
    Innovation innovation = Innovation::normal;
    MeanMode mean = MeanMode::constant;
    std::optional<std::string> name;
};

struct GasModel {
    std::optional<std::string> name;
};

/// Forecasts read from one file per asset; `{asset}` in the path template is
/// replaced by the asset id.
struct ExternalModel {
    std::string name;
    std::string path_template;
};

using ModelSpec = std::variant<HistoricalModel, GarchModel, GasModel, ExternalModel>;

struct RunConfig {
    std::vector<AssetSpec> assets;
    SplitSpec split;
    std::vector<QuantileLevel> levels;
    std::vector<ModelSpec> models;
    std::vector<std::size_t> cadences{1};
    std::size_t window = 512;
    std::filesystem::path output_dir = "varbench-out";
    std::uint64_t seed = 0;
    std::size_t dq_lags = 4;
    TTestKind ttest = TTestKind::welch;
    std::size_t workers = 0;  // 0: one per hardware thread, capped at the asset count

    /// Throws ConfigError when a required list is empty, a cadence or window
    /// is zero, or ids repeat.
    void validate() const;
};

/// One concrete model run: historical models are expanded per cadence.
struct ModelInstance {
    std::string id;
    ModelSpec spec;
    std::size_t cadence = 1;
};

std::vector<ModelInstance> expand_models(const RunConfig& config);

/// Default labels: Historical[cadence], G-N, G-t, G-skt, G-EDF, GAS.
std::string default_model_name(const ModelSpec& spec);

/// Parses the YAML run configuration; relative paths resolve against
/// `base_dir`. Throws ConfigError.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

/// `{asset}` substitution for external forecast paths.
std::filesystem::path external_path(const ExternalModel& model, const std::string& asset_id);

}  // namespace varbench
