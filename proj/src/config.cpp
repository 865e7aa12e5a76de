#include "varbench/config.hpp"

#include "varbench/errors.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace varbench {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const std::set<std::string> kTopLevelKeys{"assets", "split",   "levels",  "models",  "cadences", "window",
                                          "output_dir", "seed", "dq_lags", "ttest", "workers"};

std::string where(const YAML::Node& node) {
    const auto mark = node.Mark();
    return mark.line >= 0 ? fmt::format("line {}", mark.line + 1) : std::string("config");
}

template <class T>
T scalar(const YAML::Node& node, const std::string& key) {
    if (!node.IsScalar()) throw ConfigError(fmt::format("{}: '{}' must be a scalar", where(node), key));
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(fmt::format("{}: '{}' has an invalid value '{}'", where(node), key, node.Scalar()));
    }
}

std::size_t positive_size(const YAML::Node& node, const std::string& key) {
    const auto value = scalar<long long>(node, key);
    if (value <= 0) throw ConfigError(fmt::format("{}: '{}' must be positive", where(node), key));
    return static_cast<std::size_t>(value);
}

Date date_value(const YAML::Node& node, const std::string& key) {
    try {
        return Date::parse(scalar<std::string>(node, key));
    } catch (const InvalidInput& e) {
        throw ConfigError(fmt::format("{}: '{}': {}", where(node), key, e.what()));
    }
}

const YAML::Node require(const YAML::Node& map, const std::string& key) {
    const YAML::Node node = map[key];
    if (!node) throw ConfigError(fmt::format("{}: missing required key '{}'", where(map), key));
    return node;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

void check_keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& context) {
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.contains(key)) throw ConfigError(fmt::format("{}: unknown key '{}' in {}", where(kv.first), key, context));
    }
}

Innovation parse_innovation(const YAML::Node& node) {
    const auto s = scalar<std::string>(node, "dist");
    if (s == "normal") return Innovation::normal;
    if (s == "student_t") return Innovation::student_t;
    if (s == "skew_t") return Innovation::skew_t;
    if (s == "edf") return Innovation::edf;
    throw ConfigError(fmt::format("{}: dist must be normal, student_t, skew_t or edf, got '{}'", where(node), s));
}

MeanMode parse_mean(const YAML::Node& node) {
    const auto s = scalar<std::string>(node, "mean");
    if (s == "constant") return MeanMode::constant;
    if (s == "ar1") return MeanMode::ar1;
    throw ConfigError(fmt::format("{}: mean must be constant or ar1, got '{}'", where(node), s));
}

std::optional<std::string> optional_name(const YAML::Node& node) {
    if (!node["name"]) return std::nullopt;
    auto name = scalar<std::string>(node["name"], "name");
    if (name.empty()) throw ConfigError(fmt::format("{}: model name must not be empty", where(node)));
    return name;
}

ModelSpec parse_model(const YAML::Node& node, const std::filesystem::path& base) {
    if (!node.IsMap()) throw ConfigError(fmt::format("{}: each model must be a mapping", where(node)));
    const auto type = scalar<std::string>(require(node, "type"), "type");
    if (type == "historical") {
        check_keys(node, {"type", "name", "window"}, "historical model");
        HistoricalModel m;
        m.name = optional_name(node);
        if (node["window"]) m.window = positive_size(node["window"], "window");
        return m;
    }
    if (type == "garch") {
        check_keys(node, {"type", "name", "dist", "mean"}, "garch model");
        GarchModel m;
        if (node["dist"]) m.innovation = parse_innovation(node["dist"]);
        if (node["mean"]) m.mean = parse_mean(node["mean"]);
        m.name = optional_name(node);
        return m;
    }
    if (type == "gas") {
        check_keys(node, {"type", "name"}, "gas model");
        return GasModel{optional_name(node)};
    }
    if (type == "external") {
        check_keys(node, {"type", "name", "path"}, "external model");
        const auto name = optional_name(node);
        if (!name) throw ConfigError(fmt::format("{}: external model needs a name", where(node)));
        const auto path = scalar<std::string>(require(node, "path"), "path");
        return ExternalModel{*name, resolve(base, path).string()};
    }
    throw ConfigError(fmt::format("{}: unknown model type '{}'", where(node), type));
}

}  // namespace

void RunConfig::validate() const {
    if (assets.empty()) throw ConfigError("config lists no assets");
    if (levels.empty()) throw ConfigError("config lists no quantile levels");
    if (models.empty()) throw ConfigError("config lists no models");
    if (cadences.empty()) throw ConfigError("config lists no cadences");
    for (auto c : cadences) {
        if (c == 0) throw ConfigError("cadence values must be positive");
    }
    if (window < 2) throw ConfigError("window must be at least 2");
    std::set<std::string> ids;
    for (const auto& a : assets) {
        if (a.id.empty()) throw ConfigError("asset id must not be empty");
        if (!ids.insert(a.id).second) throw ConfigError(fmt::format("duplicate asset id '{}'", a.id));
    }
    std::set<double> seen_levels;
    for (const auto& l : levels) {
        if (!seen_levels.insert(l.value()).second) throw ConfigError(fmt::format("duplicate level {}", l.value()));
    }
    if (std::set<std::size_t>(cadences.begin(), cadences.end()).size() != cadences.size()) {
        throw ConfigError("duplicate cadence");
    }
    if (split.validation_end ? !(split.train_end < *split.validation_end && *split.validation_end < split.test_end)
                             : !(split.train_end < split.test_end)) {
        throw ConfigError("split dates must satisfy train_end < validation_end < test_end");
    }
    expand_models(*this);
}

std::string default_model_name(const ModelSpec& spec) {
    return std::visit(overloaded{
                          [](const HistoricalModel& m) { return m.name.value_or("Historical"); },
                          [](const GarchModel& m) {
                              if (m.name) return *m.name;
                              std::string base;
                              switch (m.innovation) {
                                  case Innovation::normal: base = "G-N"; break;
                                  case Innovation::student_t: base = "G-t"; break;
                                  case Innovation::skew_t: base = "G-skt"; break;
                                  case Innovation::edf: base = "G-EDF"; break;
                              }
                              return m.mean == MeanMode::ar1 ? base + "-AR1" : base;
                          },
                          [](const GasModel& m) { return m.name.value_or("GAS"); },
                          [](const ExternalModel& m) { return m.name; },
                      },
                      spec);
}

std::vector<ModelInstance> expand_models(const RunConfig& config) {
    std::vector<ModelInstance> out;
    std::set<std::string> ids;
    for (const auto& spec : config.models) {
        const std::string base = default_model_name(spec);
        if (std::holds_alternative<HistoricalModel>(spec)) {
            for (auto cadence : config.cadences) {
                out.push_back({cadence == 1 ? base : fmt::format("{}{}", base, cadence), spec, cadence});
            }
        } else {
            out.push_back({base, spec, 1});
        }
    }
    for (const auto& m : out) {
        if (!ids.insert(m.id).second) throw ConfigError(fmt::format("duplicate model id '{}'", m.id));
        if (m.id.find_first_of(",\n\r") != std::string::npos) {
            throw ConfigError(fmt::format("model id '{}' contains a delimiter", m.id));
        }
    }
    return out;
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(fmt::format("config is not valid YAML: {}", e.what()));
    }
    if (!root.IsMap()) throw ConfigError("config must be a mapping at the top level");
    check_keys(root, kTopLevelKeys, "config");

    RunConfig cfg;
    const auto assets = require(root, "assets");
    if (!assets.IsSequence()) throw ConfigError(fmt::format("{}: 'assets' must be a list", where(assets)));
    for (const auto& a : assets) {
        if (!a.IsMap()) throw ConfigError(fmt::format("{}: each asset needs 'id' and 'path'", where(a)));
        check_keys(a, {"id", "path"}, "asset");
        const auto id = scalar<std::string>(require(a, "id"), "id");
        if (id.find_first_of(",\n\r{}") != std::string::npos) {
            throw ConfigError(fmt::format("{}: asset id '{}' contains a reserved character", where(a), id));
        }
        cfg.assets.push_back({id, resolve(base_dir, scalar<std::string>(require(a, "path"), "path"))});
    }

    const auto split = require(root, "split");
    if (!split.IsMap()) throw ConfigError(fmt::format("{}: 'split' must be a mapping", where(split)));
    check_keys(split, {"train_end", "validation_end", "test_end"}, "split");
    cfg.split.train_end = date_value(require(split, "train_end"), "train_end");
    if (split["validation_end"]) cfg.split.validation_end = date_value(split["validation_end"], "validation_end");
    cfg.split.test_end = date_value(require(split, "test_end"), "test_end");

    const auto levels = require(root, "levels");
    if (!levels.IsSequence()) throw ConfigError(fmt::format("{}: 'levels' must be a list", where(levels)));
    for (const auto& l : levels) {
        const auto value = scalar<double>(l, "levels");
        try {
            cfg.levels.emplace_back(value);
        } catch (const InvalidParameter& e) {
            throw ConfigError(fmt::format("{}: {}", where(l), e.what()));
        }
    }

    const auto models = require(root, "models");
    if (!models.IsSequence()) throw ConfigError(fmt::format("{}: 'models' must be a list", where(models)));
    for (const auto& m : models) cfg.models.push_back(parse_model(m, base_dir));

    if (root["cadences"]) {
        const auto cad = root["cadences"];
        if (!cad.IsSequence()) throw ConfigError(fmt::format("{}: 'cadences' must be a list", where(cad)));
        cfg.cadences.clear();
        for (const auto& c : cad) cfg.cadences.push_back(positive_size(c, "cadences"));
    }
    if (root["window"]) cfg.window = positive_size(root["window"], "window");
    cfg.output_dir = resolve(base_dir, root["output_dir"] ? scalar<std::string>(root["output_dir"], "output_dir")
                                                           : cfg.output_dir.string());
    if (root["seed"]) {
        const auto seed = scalar<long long>(root["seed"], "seed");
        if (seed < 0) throw ConfigError(fmt::format("{}: 'seed' must be non-negative", where(root["seed"])));
        cfg.seed = static_cast<std::uint64_t>(seed);
    }
    if (root["dq_lags"]) cfg.dq_lags = positive_size(root["dq_lags"], "dq_lags");
    if (root["ttest"]) {
        const auto kind = scalar<std::string>(root["ttest"], "ttest");
        if (kind == "welch") {
            cfg.ttest = TTestKind::welch;
        } else if (kind == "paired") {
            cfg.ttest = TTestKind::paired;
        } else {
            throw ConfigError(fmt::format("{}: ttest must be welch or paired, got '{}'", where(root["ttest"]), kind));
        }
    }
    if (root["workers"]) cfg.workers = positive_size(root["workers"], "workers");

    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.parent_path());
}

std::filesystem::path external_path(const ExternalModel& model, const std::string& asset_id) {
    std::string path = model.path_template;
    const std::string token = "{asset}";
    for (auto pos = path.find(token); pos != std::string::npos; pos = path.find(token, pos + asset_id.size())) {
        path.replace(pos, token.size(), asset_id);
    }
    return path;
}

}  // namespace varbench
