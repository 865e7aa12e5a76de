#include "report_fixture.hpp"
#include "support.hpp"

#include "varbench/errors.hpp"
#include "varbench/report.hpp"

#include <gtest/gtest.h>

#include <fmt/format.h>

#include <cmath>
#include <map>
#include <sstream>

using namespace varbench;
using varbench::testing::read_text;
using varbench::testing::report_fixture;
using varbench::testing::TempDir;
using varbench::testing::write_text;

namespace {

std::map<std::string, std::string> tables(const ReportBundle& b) {
    std::map<std::string, std::string> out;
    for (auto& [name, content] : render_tables(b)) out[name] = content;
    return out;
}

std::vector<std::vector<std::string>> rows(const std::string& csv) {
    std::vector<std::vector<std::string>> out;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        out.push_back(std::move(cells));
    }
    return out;
}

const std::filesystem::path kGolden = VARBENCH_GOLDEN_DIR;

}  // namespace

TEST(Format, Metric) {
    EXPECT_EQ(format_metric(0.12345), "0.123");
    EXPECT_EQ(format_metric(1.0), "1.000");
    EXPECT_EQ(format_metric(-0.0001), "0.000");
    EXPECT_EQ(format_metric(-1.25), "-1.250");
    EXPECT_EQ(format_metric(12.3456), "12.346");
    EXPECT_EQ(format_metric(std::nan("")), "nan");
}

TEST(Format, PValue) {
    EXPECT_EQ(format_p(0.5), "0.500");
    EXPECT_EQ(format_p(0.001), "0.001");
    EXPECT_EQ(format_p(0.000999), "9.990e-04");
    EXPECT_EQ(format_p(1.3e-7), "1.300e-07");
    EXPECT_EQ(format_p(0.0), "0.000");
    EXPECT_EQ(format_p(1.0), "1.000");
}

TEST(Format, Stars) {
    EXPECT_EQ(significance_stars(0.0), "***");
    EXPECT_EQ(significance_stars(0.01), "***");
    EXPECT_EQ(significance_stars(0.0100001), "**");
    EXPECT_EQ(significance_stars(0.025), "**");
    EXPECT_EQ(significance_stars(0.0250001), "*");
    EXPECT_EQ(significance_stars(0.05), "*");
    EXPECT_EQ(significance_stars(0.0500001), "");
    EXPECT_EQ(significance_stars(1.0), "");
}

TEST(Tables, MatchGoldenFiles) {
    const auto t = tables(report_fixture());
    for (const char* name : {"ae_summary.csv", "uc_pass.csv", "skill_matrix.csv"}) {
        EXPECT_EQ(t.at(name), read_text(kGolden / name)) << name;
    }
}

TEST(Tables, RenderOrder) {
    std::vector<std::string> names;
    for (const auto& f : render_tables(report_fixture())) names.push_back(f.first);
    EXPECT_EQ(names, (std::vector<std::string>{"ae_summary.csv", "qs_summary.csv", "ae_ttest.csv", "uc_pass.csv",
                                               "cc_pass.csv", "dq_pass.csv", "skill_matrix.csv", "summary.txt"}));
}

TEST(Tables, PassCountsAreAssetsAboveEachThreshold) {
    const auto b = report_fixture();
    const auto t = tables(b);
    for (const auto& [file, test] : std::vector<std::pair<std::string, TestResult BacktestReport::*>>{
             {"uc_pass.csv", &BacktestReport::uc}, {"cc_pass.csv", &BacktestReport::cc},
             {"dq_pass.csv", &BacktestReport::dq}}) {
        const auto r = rows(t.at(file));
        ASSERT_EQ(r.size(), 7u);
        for (std::size_t i = 1; i < r.size(); ++i) {
            const double level = std::stod(r[i][0]);
            const double sig = r[i][1] == "99%" ? 0.01 : r[i][1] == "97.5%" ? 0.025 : 0.05;
            for (std::size_t c = 2; c < r[i].size(); ++c) {
                const std::string& model = r[0][c];
                std::size_t expect = 0;
                std::size_t have = 0;
                for (const auto& rep : b.reports) {
                    if (rep.model_id != model || rep.level != level) continue;
                    ++have;
                    const auto& p = (rep.*test).p_value;
                    if (p && *p > sig) ++expect;
                }
                if (have < b.assets.size()) {
                    EXPECT_EQ(r[i][c], "") << file << " " << model;
                } else {
                    EXPECT_EQ(r[i][c], std::to_string(expect)) << file << " " << model;
                }
            }
        }
    }
}

TEST(Tables, QuantileScoresInPercent) {
    const auto r = rows(tables(report_fixture()).at("qs_summary.csv"));
    ASSERT_EQ(r.size(), 6u);
    EXPECT_EQ(r[0], (std::vector<std::string>{"level", "model", "min", "mean", "median", "max", "sd"}));
    // M2 at 0.01: mean daily scores 0.25%, 0.5%, 0.125%.
    EXPECT_EQ(r[2], (std::vector<std::string>{"0.01", "M2", "0.125", "0.292", "0.250", "0.500", "0.191"}));
}

TEST(Tables, AeTTestMatrix) {
    const auto b = report_fixture();
    const auto r = rows(tables(b).at("ae_ttest.csv"));
    ASSERT_EQ(r.size(), 1u + 2u * 3u + 2u * 2u);
    EXPECT_EQ(r[0], (std::vector<std::string>{"level", "model", "stat", "M1", "M2", "M3"}));

    const std::vector<double> m1{0.25, 0.25, 1.0};
    const std::vector<double> m2{0.25, 0.25, 0.25};
    const auto t = ae_dev_ttest(m1, m2, TTestKind::welch);
    EXPECT_EQ(r[1], (std::vector<std::string>{"0.01", "M1", "diff", "0.000", "0.250" + significance_stars(t.p_value),
                                              "-0.083"}));
    EXPECT_EQ(r[2][3], "");
    EXPECT_EQ(r[2][4], "(" + format_p(t.p_value) + ")");
    // M2 is constant and M3 is not, so that pair still has a p-value.
    EXPECT_FALSE(r[4][5].empty());
    // M3 is incomplete at 0.05: blank column, no rows.
    for (std::size_t i = 7; i < r.size(); ++i) {
        EXPECT_EQ(r[i][0], "0.05");
        EXPECT_NE(r[i][1], "M3");
        EXPECT_EQ(r[i][5], "");
    }
}

TEST(Tables, EightModelsGiveEightRowsPerLevelBlock) {
    ReportBundle b;
    b.assets = {"A", "B", "C"};
    b.levels = {0.01, 0.025, 0.05, 0.1};
    for (int m = 0; m < 8; ++m) b.models.push_back(fmt::format("Model{}", m));
    for (const auto& a : b.assets) {
        for (const auto& m : b.models) {
            for (double l : b.levels) {
                BacktestReport r;
                r.asset_id = a;
                r.model_id = m;
                r.level = l;
                r.observations = 100;
                r.violations = static_cast<std::size_t>(m.back() - '0') + a[0] - 'A';
                r.ae = static_cast<double>(r.violations) / (100.0 * l);
                r.uc.p_value = 0.5;
                r.total_qs = 1.0 + 0.1 * (m.back() - '0') + 0.01 * (a[0] - 'A');
                r.mean_qs = r.total_qs / 100.0;
                b.reports.push_back(r);
                b.outcomes.push_back({a, m, l, Status::ok, ""});
            }
        }
    }
    const auto t = tables(b);
    for (const char* name : {"ae_summary.csv", "qs_summary.csv", "skill_matrix.csv"}) {
        const auto r = rows(t.at(name));
        ASSERT_EQ(r.size(), 1u + 8u * 4u) << name;
        for (std::size_t block = 0; block < 4; ++block) {
            for (std::size_t m = 0; m < 8; ++m) {
                const auto& row = r[1 + 8 * block + m];
                EXPECT_EQ(row[0], fmt::format("{}", b.levels[block]));
                EXPECT_EQ(row[1], b.models[m]);
            }
        }
    }
    const auto skill = rows(t.at("skill_matrix.csv"));
    for (std::size_t i = 1; i < skill.size(); ++i) {
        ASSERT_EQ(skill[i].size(), 10u);
        EXPECT_EQ(skill[i][2 + (i - 1) % 8], "0.000");
    }
    EXPECT_EQ(rows(t.at("uc_pass.csv")).size(), 1u + 3u * 4u);
}

TEST(Tables, SummaryListsFailures) {
    const auto s = tables(report_fixture()).at("summary.txt");
    EXPECT_NE(s.find("assets (3): X, Y, Z"), std::string::npos);
    EXPECT_NE(s.find("combinations: 17 ok, 1 failed, 0 skipped"), std::string::npos);
    EXPECT_NE(s.find("Z / M3 / 0.05: forecast file"), std::string::npos);
    EXPECT_NE(s.find("level 0.05"), std::string::npos);
}

TEST(Emit, EmptyBundleIsAnErrorAndWritesNothing) {
    TempDir dir;
    ReportBundle b;
    b.assets = {"X"};
    b.models = {"M"};
    b.levels = {0.05};
    b.outcomes.push_back({"X", "M", 0.05, Status::failed, "boom"});
    EXPECT_THROW(render_tables(b), InvalidInput);
    EXPECT_THROW(emit_reports(b, dir / "out"), InvalidInput);
    EXPECT_FALSE(std::filesystem::exists(dir / "out"));
}

TEST(Emit, UnwritableDirectoryIsIoError) {
    TempDir dir;
    write_text(dir / "file", "x");
    EXPECT_THROW(emit_reports(report_fixture(), dir / "file" / "sub"), IoError);
}

TEST(Emit, RoundTripThroughLoadBundle) {
    TempDir dir;
    const auto b = report_fixture();
    emit_reports(b, dir / "a");
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir / "a")) ++files;
    EXPECT_EQ(files, 12u);

    const auto loaded = load_bundle(dir / "a");
    EXPECT_EQ(loaded.assets, b.assets);
    EXPECT_EQ(loaded.models, b.models);
    EXPECT_EQ(loaded.levels, b.levels);
    EXPECT_EQ(loaded.dq_lags, b.dq_lags);
    ASSERT_EQ(loaded.reports.size(), b.reports.size());
    for (std::size_t i = 0; i < b.reports.size(); ++i) {
        const auto& x = b.reports[i];
        const auto& y = loaded.reports[i];
        EXPECT_EQ(x.asset_id, y.asset_id);
        EXPECT_EQ(x.model_id, y.model_id);
        EXPECT_EQ(x.level, y.level);
        EXPECT_EQ(x.violations, y.violations);
        EXPECT_EQ(x.ae, y.ae);
        EXPECT_EQ(x.uc.p_value, y.uc.p_value);
        EXPECT_EQ(x.dq.degenerate, y.dq.degenerate);
        EXPECT_EQ(x.cc.dof, y.cc.dof);
        EXPECT_EQ(x.total_qs, y.total_qs);
    }
    ASSERT_EQ(loaded.scores.size(), b.scores.size());
    for (std::size_t i = 0; i < b.scores.size(); ++i) {
        EXPECT_EQ(loaded.scores[i].scores, b.scores[i].scores);
        EXPECT_EQ(loaded.scores[i].dates, b.scores[i].dates);
    }
    ASSERT_EQ(loaded.outcomes.size(), b.outcomes.size());
    EXPECT_EQ(loaded.count(Status::failed), 1u);

    emit_reports(loaded, dir / "b");
    for (const auto& e : std::filesystem::directory_iterator(dir / "a")) {
        EXPECT_EQ(read_text(e.path()), read_text(dir / "b" / e.path().filename())) << e.path().filename();
    }
}

TEST(Emit, LoadBundleErrors) {
    TempDir dir;
    EXPECT_THROW(load_bundle(dir / "nothing"), IoError);

    emit_reports(report_fixture(), dir / "a");
    const auto reports = read_text(dir / "a" / "reports.csv");
    write_text(dir / "a" / "reports.csv", "asset,model\n");
    EXPECT_THROW(load_bundle(dir / "a"), SchemaError);

    write_text(dir / "a" / "reports.csv", reports);
    auto outcomes = read_text(dir / "a" / "outcomes.csv");
    outcomes.replace(outcomes.find(",ok,"), 4, ",fine,");
    write_text(dir / "a" / "outcomes.csv", outcomes);
    EXPECT_THROW(load_bundle(dir / "a"), SchemaError);
}
