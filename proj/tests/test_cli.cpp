#include "support.hpp"

#include <gtest/gtest.h>

#include <fmt/format.h>

#include <cstdlib>
#include <sys/wait.h>

using varbench::Date;
using varbench::testing::normal_draws;
using varbench::testing::read_text;
using varbench::testing::TempDir;
using varbench::testing::write_text;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

CliResult cli(const TempDir& dir, const std::string& args) {
    const auto out = dir / "stdout.txt";
    const auto err = dir / "stderr.txt";
    const auto cmd = fmt::format("\"{}\" {} >\"{}\" 2>\"{}\"", VARBENCH_CLI, args, out.string(), err.string());
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_text(out);
    r.err = read_text(err);
    return r;
}

// One asset with 600 training and 100 test returns; an external file that
// covers the test span unless `drop` names a test day to leave out.
std::vector<Date> write_run(const TempDir& dir, std::optional<std::size_t> drop = std::nullopt) {
    const auto r = normal_draws(700, 99, 0.01);
    std::vector<Date> dates;
    std::string text = "date,return\n";
    for (std::size_t t = 0; t < r.size(); ++t) {
        dates.push_back(Date{2008, 1, 1}.plus_days(static_cast<long>(t)));
        text += fmt::format("{},{}\n", dates.back().to_string(), r[t]);
    }
    write_text(dir / "run" / "A.csv", text);
    std::string ext = "date,level,var_forecast\n";
    for (std::size_t t = 600; t < r.size(); ++t) {
        if (drop && t == 600 + *drop) continue;
        ext += fmt::format("{},0.05,-0.0165\n", dates[t].to_string());
    }
    write_text(dir / "run" / "A_ext.csv", ext);
    write_text(dir / "run" / "config.yaml", fmt::format(R"(assets: [{{id: A, path: A.csv}}]
split: {{train_end: {}, test_end: {}}}
levels: [0.05]
seed: 3
output_dir: out
models:
  - {{type: historical}}
  - {{type: external, name: Ext, path: "{{asset}}_ext.csv"}}
)",
                                                        dates[599].to_string(), dates.back().to_string()));
    return dates;
}

}  // namespace

TEST(Cli, UsageErrorsExitWithTwo) {
    TempDir dir;
    EXPECT_EQ(cli(dir, "").code, 2);
    EXPECT_EQ(cli(dir, "frobnicate").code, 2);
    EXPECT_EQ(cli(dir, "run").code, 2);
    EXPECT_EQ(cli(dir, "--help").code, 0);
}

TEST(Cli, ValidateGoodFile) {
    TempDir dir;
    write_text(dir / "f.csv",
               "date,level,var_forecast\n2020-01-02,0.1,-0.02\n2020-01-02,0.05,-0.03\n2020-01-03,0.1,-0.021\n"
               "2020-01-03,0.05,-0.031\n");
    const auto r = cli(dir, fmt::format("validate --forecasts \"{}\"", (dir / "f.csv").string()));
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, fmt::format("{}: ok, 4 rows, levels [0.05, 0.1], dates 2020-01-02 to 2020-01-03\n",
                                 (dir / "f.csv").string()));
}

TEST(Cli, ValidateRejectsSchemaProblems) {
    TempDir dir;
    write_text(dir / "dup.csv", "date,level,var_forecast\n2020-01-02,0.1,-0.02\n2020-01-02,0.1,-0.03\n");
    write_text(dir / "hdr.csv", "date,quantile,var_forecast\n2020-01-02,0.1,-0.02\n");
    write_text(dir / "lvl.csv", "date,level,var_forecast\n2020-01-02,1.5,-0.02\n");
    for (const char* f : {"dup.csv", "hdr.csv", "lvl.csv", "missing.csv"}) {
        const auto r = cli(dir, fmt::format("validate --forecasts \"{}\"", (dir / f).string()));
        EXPECT_EQ(r.code, 2) << f;
        EXPECT_NE(r.err.find("[error]"), std::string::npos) << f;
    }
}

TEST(Cli, RunSucceedsAndReportRerenders) {
    TempDir dir;
    write_run(dir);
    const auto r = cli(dir, fmt::format("-q run --config \"{}\"", (dir / "run" / "config.yaml").string()));
    EXPECT_EQ(r.code, 0) << r.err;
    const auto out = dir / "run" / "out";
    ASSERT_TRUE(std::filesystem::exists(out / "reports.csv"));
    EXPECT_EQ(r.out, fmt::format("wrote reports to {}\n", out.string()));

    const auto again = cli(dir, fmt::format("-q report --bundle \"{}\" --output \"{}\"", out.string(),
                                            (dir / "rerendered").string()));
    EXPECT_EQ(again.code, 0) << again.err;
    for (const auto& e : std::filesystem::directory_iterator(out)) {
        EXPECT_EQ(read_text(e.path()), read_text(dir / "rerendered" / e.path().filename())) << e.path().filename();
    }
}

TEST(Cli, OutputOverride) {
    TempDir dir;
    write_run(dir);
    const auto r = cli(dir, fmt::format("-q run --config \"{}\" --output \"{}\"",
                                        (dir / "run" / "config.yaml").string(), (dir / "elsewhere").string()));
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(std::filesystem::exists(dir / "elsewhere" / "summary.txt"));
    EXPECT_FALSE(std::filesystem::exists(dir / "run" / "out"));
}

TEST(Cli, PartialFailureExitsWithThree) {
    TempDir dir;
    write_run(dir, 40);
    const auto r = cli(dir, fmt::format("-q run --config \"{}\"", (dir / "run" / "config.yaml").string()));
    EXPECT_EQ(r.code, 3) << r.err;
    const auto outcomes = read_text(dir / "run" / "out" / "outcomes.csv");
    EXPECT_NE(outcomes.find("A,Historical,0.05,ok,"), std::string::npos);
    EXPECT_NE(outcomes.find("A,Ext,0.05,failed,"), std::string::npos);

    const auto rerender = cli(dir, fmt::format("-q report --bundle \"{}\"", (dir / "run" / "out").string()));
    EXPECT_EQ(rerender.code, 3);
}

TEST(Cli, ConfigProblemsExitWithTwo) {
    TempDir dir;
    EXPECT_EQ(cli(dir, fmt::format("run --config \"{}\"", (dir / "nope.yaml").string())).code, 2);

    write_text(dir / "bad.yaml", "assets: [\n");
    EXPECT_EQ(cli(dir, fmt::format("run --config \"{}\"", (dir / "bad.yaml").string())).code, 2);

    write_text(dir / "nolevels.yaml", "assets: [{id: A, path: A.csv}]\nsplit: {train_end: 2020-01-01, test_end: "
                                      "2021-01-01}\nlevels: []\nmodels: [{type: historical}]\n");
    EXPECT_EQ(cli(dir, fmt::format("run --config \"{}\"", (dir / "nolevels.yaml").string())).code, 2);

    write_text(dir / "noasset.yaml", "assets: [{id: A, path: A.csv}]\nsplit: {train_end: 2020-01-01, test_end: "
                                     "2021-01-01}\nlevels: [0.05]\nmodels: [{type: historical}]\n");
    EXPECT_EQ(cli(dir, fmt::format("run --config \"{}\"", (dir / "noasset.yaml").string())).code, 2);

    EXPECT_EQ(cli(dir, fmt::format("report --bundle \"{}\"", (dir / "none").string())).code, 2);
}
