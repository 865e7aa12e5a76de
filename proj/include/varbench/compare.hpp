#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace varbench {

/// Model × asset grid of a scalar metric; values[m][a] belongs to models[m]
/// on assets[a]. Row and column order is preserved in every derived table.
struct MetricTable {
    std::vector<std::string> models;
    std::vector<std::string> assets;
    std::vector<std::vector<double>> values;

    /// Throws InvalidInput on ragged rows, duplicate labels, or non-finite cells.
    void validate() const;
};

struct ModelSummary {
    std::string model;
    double min = 0.0;
    double mean = 0.0;
    double median = 0.0;
    double max = 0.0;
    double sd = 0.0;  // sample standard deviation; 0 for a single asset
    std::size_t best_count = 0;
    std::size_t top2_count = 0;
};

/// Per-model statistics across assets with competition ranking on each asset
/// (lower is better; tied models share the smallest rank).
std::vector<ModelSummary> cross_section_summary(const MetricTable& metric);

struct SkillMatrix {
    std::vector<std::string> models;
    /// ratio[i][j] = mean over assets of total[j] / total[i]; diagonal is 0.
    std::vector<std::vector<double>> ratio;
    std::vector<std::string> warnings;
};

/// Assets with zero benchmark loss are excluded from that benchmark's row.
/// A row with no usable asset holds NaN off the diagonal.
SkillMatrix skill_matrix(const MetricTable& total_qs);

}  // namespace varbench
