#include "varbench/harness.hpp"

#include "varbench/errors.hpp"
#include "varbench/external.hpp"
#include "varbench/gas.hpp"
#include "varbench/historical.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <optional>
#include <random>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace varbench {

namespace {

struct PreparedAsset {
    ReturnSeries through_test;  // every observation up to test_end
    ReturnSeries train;
    ReturnSeries test;
    // Indexed like the model instances; filled for external models only.
    std::vector<std::vector<ForecastSeries>> external;
};

struct AssetResult {
    std::vector<BacktestReport> reports;
    std::vector<ScoreSeries> scores;
    std::vector<Outcome> outcomes;
};

class AssetEvaluator {
public:
    AssetEvaluator(const RunConfig& cfg, const std::vector<ModelInstance>& models, std::size_t asset_index,
                   const PreparedAsset& asset)
        : cfg_(cfg), models_(models), asset_index_(asset_index), asset_(asset) {}

    AssetResult evaluate() {
        for (std::size_t mi = 0; mi < models_.size(); ++mi) {
            const auto& model = models_[mi];
            try {
                std::visit([&](const auto& spec) { evaluate_model(mi, spec); }, model.spec);
            } catch (const std::exception& e) {
                fail_remaining(mi, e.what());
            }
        }
        return std::move(result_);
    }

private:
    const std::string& asset_id() const { return asset_.test.asset_id(); }
    Date test_start() const { return asset_.test.dates().front(); }

    void record(std::size_t mi, std::size_t li, Status status, std::string diagnostic) {
        result_.outcomes.push_back(
            {asset_id(), models_[mi].id, cfg_.levels[li].value(), status, std::move(diagnostic)});
        if (status == Status::failed) {
            spdlog::warn("{} / {} / {}: {}", asset_id(), models_[mi].id, cfg_.levels[li].value(),
                         result_.outcomes.back().diagnostic);
        }
    }

    void evaluate_forecast(std::size_t mi, std::size_t li, const ForecastSeries& forecast, std::string note = {}) {
        try {
            auto report = backtest(asset_.test, forecast, cfg_.dq_lags);
            auto qs = quantile_scores(asset_.test, forecast);
            const auto dates = forecast.dates();
            result_.scores.push_back({asset_id(), models_[mi].id, forecast.level().value(),
                                      std::vector<Date>(dates.begin(), dates.end()), std::move(qs.per_day)});
            result_.reports.push_back(std::move(report));
            record(mi, li, Status::ok, std::move(note));
        } catch (const std::exception& e) {
            record(mi, li, Status::failed, e.what());
        }
    }

    // Marks every level of model `mi` without an outcome yet as failed.
    void fail_remaining(std::size_t mi, const std::string& why) {
        for (std::size_t li = 0; li < cfg_.levels.size(); ++li) {
            const auto level = cfg_.levels[li].value();
            const bool done = std::any_of(result_.outcomes.begin(), result_.outcomes.end(), [&](const Outcome& o) {
                return o.model_id == models_[mi].id && o.level == level;
            });
            if (!done) record(mi, li, Status::failed, why);
        }
    }

    void evaluate_model(std::size_t mi, const HistoricalModel& spec) {
        const WindowSpec window{spec.window.value_or(cfg_.window), models_[mi].cadence};
        const auto forecasts =
            historical_forecasts(asset_.through_test, window, test_start(), cfg_.levels, models_[mi].id);
        for (std::size_t li = 0; li < forecasts.size(); ++li) evaluate_forecast(mi, li, forecasts[li]);
    }

    void evaluate_model(std::size_t mi, const GarchModel& spec) {
        const GarchFitOptions opts{2000, 5, derive_seed(cfg_.seed, asset_index_, mi, 0)};
        const auto fit = fit_garch(asset_.train, spec.innovation, spec.mean, opts);
        const std::string note = fit.degenerate ? fit.diagnostic : std::string{};
        const auto forecasts = garch_forecasts(fit.params, asset_.through_test, test_start(), cfg_.levels,
                                               models_[mi].id);
        for (std::size_t li = 0; li < forecasts.size(); ++li) evaluate_forecast(mi, li, forecasts[li], note);
    }

    void evaluate_model(std::size_t mi, const GasModel&) {
        for (std::size_t li = 0; li < cfg_.levels.size(); ++li) {
            try {
                const GasFitOptions opts{2000, 5, derive_seed(cfg_.seed, asset_index_, mi, li + 1)};
                const auto fit = fit_gas(asset_.train, cfg_.levels[li], opts);
                std::string note;
                for (const auto& w : fit.warnings) note += (note.empty() ? "" : "; ") + w;
                evaluate_forecast(mi, li, gas_forecasts(fit.params, asset_.through_test, test_start(), models_[mi].id),
                                  note);
            } catch (const std::exception& e) {
                record(mi, li, Status::failed, e.what());
            }
        }
    }

    void evaluate_model(std::size_t mi, const ExternalModel&) {
        const auto& series = asset_.external[mi];
        const auto test_dates = asset_.test.dates();

        // Any date problem fails the whole (asset, model) pair.
        for (const auto& s : series) {
            if (auto problem = date_problem(s.dates(), test_dates)) {
                fail_remaining(mi, fmt::format("level {}: {}", s.level().value(), *problem));
                return;
            }
        }
        for (std::size_t li = 0; li < cfg_.levels.size(); ++li) {
            const auto it = std::find_if(series.begin(), series.end(),
                                         [&](const ForecastSeries& s) { return s.level() == cfg_.levels[li]; });
            if (it == series.end()) {
                record(mi, li, Status::skipped, "level not present in forecast file");
            } else {
                evaluate_forecast(mi, li, *it);
            }
        }
    }

    static std::optional<std::string> date_problem(std::span<const Date> have, std::span<const Date> want) {
        for (const auto& d : have) {
            if (d < want.front() || want.back() < d) {
                return fmt::format("forecast date {} lies outside the test span {} to {}", d.to_string(),
                                   want.front().to_string(), want.back().to_string());
            }
        }
        for (const auto& d : want) {
            if (!std::binary_search(have.begin(), have.end(), d)) {
                return fmt::format("missing forecast for test date {}", d.to_string());
            }
        }
        if (have.size() != want.size()) {
            for (const auto& d : have) {
                if (!std::binary_search(want.begin(), want.end(), d)) {
                    return fmt::format("forecast date {} is not a trading date of the asset", d.to_string());
                }
            }
        }
        return std::nullopt;
    }

    const RunConfig& cfg_;
    const std::vector<ModelInstance>& models_;
    std::size_t asset_index_;
    const PreparedAsset& asset_;
    AssetResult result_;
};

PreparedAsset prepare(const RunConfig& cfg, const AssetSpec& spec, const std::vector<ModelInstance>& models) {
    ReturnSeries series;
    try {
        series = read_return_file(spec.path, spec.id);
    } catch (const IoError& e) {
        throw ConfigError(fmt::format("asset {}: {}", spec.id, e.what()));
    }

    SplitResult parts;
    try {
        parts = split(series, cfg.split);
    } catch (const InvalidInput& e) {
        throw ConfigError(fmt::format("asset {}: {}", spec.id, e.what()));
    }

    PreparedAsset out;
    const std::size_t n_val = parts.validation ? parts.validation->size() : 0;
    out.through_test = series.slice(0, parts.train.size() + n_val + parts.test.size());
    out.train = std::move(parts.train);
    out.test = std::move(parts.test);
    out.external.resize(models.size());
    for (std::size_t mi = 0; mi < models.size(); ++mi) {
        if (const auto* ext = std::get_if<ExternalModel>(&models[mi].spec)) {
            const auto path = external_path(*ext, spec.id);
            try {
                out.external[mi] = load_external_forecasts(path, spec.id, models[mi].id);
            } catch (const IoError& e) {
                throw ConfigError(fmt::format("model {} for asset {}: {}", models[mi].id, spec.id, e.what()));
            }
        }
    }
    return out;
}

}  // namespace

std::string to_string(Status status) {
    switch (status) {
        case Status::ok: return "ok";
        case Status::failed: return "failed";
        case Status::skipped: return "skipped";
    }
    return "unknown";
}

std::size_t ReportBundle::count(Status status) const {
    return static_cast<std::size_t>(
        std::count_if(outcomes.begin(), outcomes.end(), [status](const Outcome& o) { return o.status == status; }));
}

std::uint64_t derive_seed(std::uint64_t base, std::size_t asset, std::size_t model, std::size_t level) {
    std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                      static_cast<std::uint32_t>(asset), static_cast<std::uint32_t>(model),
                      static_cast<std::uint32_t>(level)};
    std::array<std::uint32_t, 2> words{};
    seq.generate(words.begin(), words.end());
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

ReportBundle run(const RunConfig& config) {
    config.validate();
    const auto models = expand_models(config);

    std::vector<PreparedAsset> assets;
    assets.reserve(config.assets.size());
    for (const auto& spec : config.assets) assets.push_back(prepare(config, spec, models));

    std::vector<AssetResult> results(assets.size());
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t i = next++; i < assets.size(); i = next++) {
            spdlog::info("evaluating {} ({} of {})", config.assets[i].id, i + 1, assets.size());
            results[i] = AssetEvaluator(config, models, i, assets[i]).evaluate();
        }
    };
    std::size_t workers = config.workers > 0 ? config.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, assets.size());
    {
        std::vector<std::jthread> pool;
        for (std::size_t k = 1; k < workers; ++k) pool.emplace_back(work);
        work();
    }

    ReportBundle bundle;
    for (const auto& a : config.assets) bundle.assets.push_back(a.id);
    for (const auto& m : models) bundle.models.push_back(m.id);
    for (const auto& l : config.levels) bundle.levels.push_back(l.value());
    bundle.dq_lags = config.dq_lags;
    bundle.ttest = config.ttest;
    for (auto& r : results) {
        std::move(r.reports.begin(), r.reports.end(), std::back_inserter(bundle.reports));
        std::move(r.scores.begin(), r.scores.end(), std::back_inserter(bundle.scores));
        std::move(r.outcomes.begin(), r.outcomes.end(), std::back_inserter(bundle.outcomes));
    }
    spdlog::info("run finished: {} ok, {} failed, {} skipped", bundle.count(Status::ok), bundle.count(Status::failed),
                 bundle.count(Status::skipped));
    return bundle;
}

}  // namespace varbench
