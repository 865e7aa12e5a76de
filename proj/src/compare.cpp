#include "varbench/compare.hpp"

#include "varbench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <fmt/format.h>

namespace varbench {

void MetricTable::validate() const {
    if (models.empty() || assets.empty()) throw InvalidInput("metric table needs at least one model and one asset");
    if (std::set<std::string>(models.begin(), models.end()).size() != models.size()) {
        throw InvalidInput("metric table has duplicate model labels");
    }
    if (std::set<std::string>(assets.begin(), assets.end()).size() != assets.size()) {
        throw InvalidInput("metric table has duplicate asset labels");
    }
    if (values.size() != models.size()) throw InvalidInput("metric table row count differs from model count");
    for (std::size_t m = 0; m < models.size(); ++m) {
        if (values[m].size() != assets.size()) {
            throw InvalidInput(fmt::format("model {} does not cover every asset", models[m]));
        }
        for (std::size_t a = 0; a < assets.size(); ++a) {
            if (!std::isfinite(values[m][a])) {
                throw InvalidInput(fmt::format("non-finite metric for model {} on asset {}", models[m], assets[a]));
            }
        }
    }
}

std::vector<ModelSummary> cross_section_summary(const MetricTable& metric) {
    metric.validate();
    const std::size_t n_models = metric.models.size();
    const std::size_t n_assets = metric.assets.size();

    std::vector<ModelSummary> out(n_models);
    for (std::size_t m = 0; m < n_models; ++m) {
        auto& s = out[m];
        std::vector<double> v = metric.values[m];
        std::sort(v.begin(), v.end());
        s.model = metric.models[m];
        s.min = v.front();
        s.max = v.back();
        s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n_assets);
        const std::size_t mid = n_assets / 2;
        s.median = n_assets % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
        if (n_assets > 1) {
            double ss = 0.0;
            for (double x : v) ss += (x - s.mean) * (x - s.mean);
            s.sd = std::sqrt(ss / static_cast<double>(n_assets - 1));
        }
    }

    for (std::size_t a = 0; a < n_assets; ++a) {
        for (std::size_t m = 0; m < n_models; ++m) {
            const double x = metric.values[m][a];
            std::size_t strictly_better = 0;
            for (std::size_t k = 0; k < n_models; ++k) {
                if (metric.values[k][a] < x) ++strictly_better;
            }
            const std::size_t rank = strictly_better + 1;
            if (rank == 1) ++out[m].best_count;
            if (rank <= 2) ++out[m].top2_count;
        }
    }
    return out;
}

SkillMatrix skill_matrix(const MetricTable& total_qs) {
    total_qs.validate();
    const std::size_t n = total_qs.models.size();
    SkillMatrix out;
    out.models = total_qs.models;
    out.ratio.assign(n, std::vector<double>(n, 0.0));

    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t> usable;
        for (std::size_t a = 0; a < total_qs.assets.size(); ++a) {
            if (total_qs.values[i][a] == 0.0) {
                out.warnings.push_back(fmt::format("benchmark {} has zero loss on asset {}; asset excluded from its row",
                                                   total_qs.models[i], total_qs.assets[a]));
            } else {
                usable.push_back(a);
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (usable.empty()) {
                out.ratio[i][j] = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            double sum = 0.0;
            for (std::size_t a : usable) sum += total_qs.values[j][a] / total_qs.values[i][a];
            out.ratio[i][j] = sum / static_cast<double>(usable.size());
        }
    }
    return out;
}

}  // namespace varbench
