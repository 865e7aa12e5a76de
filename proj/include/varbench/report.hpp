#pragma once

#include "varbench/harness.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace varbench {

/// Three decimals; values that round to zero print as 0.000.
std::string format_metric(double value);
/// Three decimals, or scientific with three significant decimals below 1e-3.
std::string format_p(double p);
/// "***", "**", "*" for p <= 0.01, 0.025, 0.05; empty otherwise.
std::string significance_stars(double p);

/// A named output file and its full contents.
using ReportFile = std::pair<std::string, std::string>;

/// Derived tables in the order they are written:
///   ae_summary.csv    |1-AE| summary with best/top-2 counts per level
///   qs_summary.csv    mean quantile score summary, in percent
///   ae_ttest.csv      mean |1-AE| differences with one-sided t-test p-values
///   uc_pass.csv, cc_pass.csv, dq_pass.csv
///                     assets not rejected at 99/97.5/95% confidence
///   skill_matrix.csv  mean total-loss ratios with DM majority stars
///   summary.txt       human-readable overview
/// Cross-sectional tables for a level include only models with a report for
/// every asset at that level.
std::vector<ReportFile> render_tables(const ReportBundle& bundle);

/// Writes manifest.yaml, reports.csv, scores.csv, outcomes.csv and every
/// derived table into `dir`. Throws InvalidInput on an empty bundle and
/// IoError when the directory cannot be written.
void emit_reports(const ReportBundle& bundle, const std::filesystem::path& dir);

/// Rebuilds a bundle from the raw files written by emit_reports. Throws
/// IoError or SchemaError.
ReportBundle load_bundle(const std::filesystem::path& dir);

}  // namespace varbench
