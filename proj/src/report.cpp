#include "varbench/report.hpp"

#include "csv.hpp"
#include "varbench/compare.hpp"
#include "varbench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <tuple>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace varbench {

namespace {

constexpr double kQsPercent = 100.0;

struct ConfidenceRow {
    const char* label;
    double significance;
};
constexpr std::array<ConfidenceRow, 3> kConfidenceRows{{{"99%", 0.01}, {"97.5%", 0.025}, {"95%", 0.05}}};

using Key = std::tuple<std::string, std::string, double>;

class BundleIndex {
public:
    explicit BundleIndex(const ReportBundle& b) : bundle_(b) {
        for (std::size_t i = 0; i < b.reports.size(); ++i) {
            const auto& r = b.reports[i];
            reports_[{r.asset_id, r.model_id, r.level}] = i;
        }
        for (std::size_t i = 0; i < b.scores.size(); ++i) {
            const auto& s = b.scores[i];
            scores_[{s.asset_id, s.model_id, s.level}] = i;
        }
    }

    const BacktestReport* report(const std::string& asset, const std::string& model, double level) const {
        const auto it = reports_.find({asset, model, level});
        return it == reports_.end() ? nullptr : &bundle_.reports[it->second];
    }

    const ScoreSeries* scores(const std::string& asset, const std::string& model, double level) const {
        const auto it = scores_.find({asset, model, level});
        return it == scores_.end() ? nullptr : &bundle_.scores[it->second];
    }

    /// Models, in configured order, with a report for every asset at `level`.
    std::vector<std::string> complete_models(double level) const {
        std::vector<std::string> out;
        for (const auto& m : bundle_.models) {
            const bool complete = std::all_of(bundle_.assets.begin(), bundle_.assets.end(),
                                              [&](const std::string& a) { return report(a, m, level) != nullptr; });
            if (complete) out.push_back(m);
        }
        return out;
    }

    /// Models complete at one level or more, in configured order.
    std::vector<std::string> column_models() const {
        std::vector<std::string> out;
        for (const auto& m : bundle_.models) {
            const bool any = std::any_of(bundle_.levels.begin(), bundle_.levels.end(), [&](double level) {
                const auto c = complete_models(level);
                return std::find(c.begin(), c.end(), m) != c.end();
            });
            if (any) out.push_back(m);
        }
        return out;
    }

    template <class F>
    MetricTable metric(double level, const std::vector<std::string>& models, F&& extract) const {
        MetricTable t;
        t.models = models;
        t.assets = bundle_.assets;
        for (const auto& m : models) {
            std::vector<double> row;
            for (const auto& a : bundle_.assets) row.push_back(extract(*report(a, m, level)));
            t.values.push_back(std::move(row));
        }
        return t;
    }

private:
    const ReportBundle& bundle_;
    std::map<Key, std::size_t> reports_;
    std::map<Key, std::size_t> scores_;
};

std::string format_level(double level) { return fmt::format("{}", level); }

std::string join(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out += ',';
        out += cells[i];
    }
    out += '\n';
    return out;
}

std::string header(const std::vector<std::string>& lead, const std::vector<std::string>& models) {
    std::vector<std::string> cells = lead;
    cells.insert(cells.end(), models.begin(), models.end());
    return join(cells);
}

double abs_dev(const BacktestReport& r) { return std::abs(1.0 - r.ae); }
double mean_qs_percent(const BacktestReport& r) { return r.mean_qs * kQsPercent; }

std::string ae_summary_table(const ReportBundle& b, const BundleIndex& idx) {
    std::string out = "level,model,min,mean,median,max,sd,best,top2\n";
    for (double level : b.levels) {
        const auto models = idx.complete_models(level);
        if (models.empty()) continue;
        for (const auto& s : cross_section_summary(idx.metric(level, models, abs_dev))) {
            out += join({format_level(level), s.model, format_metric(s.min), format_metric(s.mean),
                         format_metric(s.median), format_metric(s.max), format_metric(s.sd),
                         std::to_string(s.best_count), std::to_string(s.top2_count)});
        }
    }
    return out;
}

std::string qs_summary_table(const ReportBundle& b, const BundleIndex& idx) {
    std::string out = "level,model,min,mean,median,max,sd\n";
    for (double level : b.levels) {
        const auto models = idx.complete_models(level);
        if (models.empty()) continue;
        for (const auto& s : cross_section_summary(idx.metric(level, models, mean_qs_percent))) {
            out += join({format_level(level), s.model, format_metric(s.min), format_metric(s.mean),
                         format_metric(s.median), format_metric(s.max), format_metric(s.sd)});
        }
    }
    return out;
}

std::string ae_ttest_table(const ReportBundle& b, const BundleIndex& idx) {
    const auto columns = idx.column_models();
    std::string out = header({"level", "model", "stat"}, columns);
    for (double level : b.levels) {
        const auto models = idx.complete_models(level);
        if (models.empty()) continue;
        const auto dev = idx.metric(level, models, abs_dev);
        const auto row_of = [&](const std::string& m) {
            return static_cast<std::size_t>(std::find(models.begin(), models.end(), m) - models.begin());
        };
        for (std::size_t i = 0; i < models.size(); ++i) {
            std::vector<std::string> diffs{format_level(level), models[i], "diff"};
            std::vector<std::string> pvals{format_level(level), models[i], "p"};
            for (const auto& col : columns) {
                const std::size_t j = row_of(col);
                if (j == models.size()) {
                    diffs.emplace_back();
                    pvals.emplace_back();
                    continue;
                }
                if (i == j) {
                    diffs.push_back(format_metric(0.0));
                    pvals.emplace_back();
                    continue;
                }
                double diff = 0.0;
                for (std::size_t a = 0; a < b.assets.size(); ++a) diff += dev.values[i][a] - dev.values[j][a];
                diff /= static_cast<double>(b.assets.size());
                std::optional<double> p;
                try {
                    p = ae_dev_ttest(dev.values[i], dev.values[j], b.ttest).p_value;
                } catch (const InvalidInput&) {
                    p.reset();
                }
                diffs.push_back(format_metric(diff) + (p ? significance_stars(*p) : ""));
                pvals.push_back(p ? "(" + format_p(*p) + ")" : "");
            }
            out += join(diffs);
            out += join(pvals);
        }
    }
    return out;
}

std::string pass_table(const ReportBundle& b, const BundleIndex& idx, TestResult BacktestReport::*test) {
    const auto columns = idx.column_models();
    std::string out = header({"level", "confidence"}, columns);
    for (double level : b.levels) {
        const auto models = idx.complete_models(level);
        if (models.empty()) continue;
        for (const auto& row : kConfidenceRows) {
            std::vector<std::string> cells{format_level(level), row.label};
            for (const auto& col : columns) {
                if (std::find(models.begin(), models.end(), col) == models.end()) {
                    cells.emplace_back();
                    continue;
                }
                std::size_t passed = 0;
                for (const auto& a : b.assets) {
                    const auto& result = idx.report(a, col, level)->*test;
                    if (result.p_value && *result.p_value > row.significance) ++passed;
                }
                cells.push_back(std::to_string(passed));
            }
            out += join(cells);
        }
    }
    return out;
}

// Stars for the strongest significance level at which DM rejects on more than
// half of the assets.
std::string dm_majority_stars(const ReportBundle& b, const BundleIndex& idx, double level, const std::string& mi,
                              const std::string& mj) {
    std::array<std::size_t, 3> rejected{};
    for (const auto& a : b.assets) {
        const auto* si = idx.scores(a, mi, level);
        const auto* sj = idx.scores(a, mj, level);
        if (si == nullptr || sj == nullptr) return {};
        try {
            const auto dm = dm_test(si->scores, sj->scores);
            for (std::size_t k = 0; k < kSignificanceLevels.size(); ++k) {
                if (dm.p_value <= kSignificanceLevels[k]) ++rejected[k];
            }
        } catch (const std::invalid_argument&) {
            return {};
        }
    }
    const double half = 0.5 * static_cast<double>(b.assets.size());
    if (static_cast<double>(rejected[0]) > half) return "***";
    if (static_cast<double>(rejected[1]) > half) return "**";
    if (static_cast<double>(rejected[2]) > half) return "*";
    return {};
}

std::string skill_matrix_table(const ReportBundle& b, const BundleIndex& idx) {
    const auto columns = idx.column_models();
    std::string out = header({"level", "model"}, columns);
    for (double level : b.levels) {
        const auto models = idx.complete_models(level);
        if (models.empty()) continue;
        const auto skill = skill_matrix(idx.metric(level, models, [](const BacktestReport& r) { return r.total_qs; }));
        for (std::size_t i = 0; i < models.size(); ++i) {
            std::vector<std::string> cells{format_level(level), models[i]};
            for (const auto& col : columns) {
                const auto j = static_cast<std::size_t>(std::find(models.begin(), models.end(), col) - models.begin());
                if (j == models.size()) {
                    cells.emplace_back();
                } else if (i == j) {
                    cells.push_back(format_metric(0.0));
                } else if (std::isnan(skill.ratio[i][j])) {
                    cells.emplace_back();
                } else {
                    cells.push_back(format_metric(skill.ratio[i][j]) +
                                    dm_majority_stars(b, idx, level, models[i], models[j]));
                }
            }
            out += join(cells);
        }
    }
    return out;
}

// Diagnostics go into comma-delimited, line-oriented files.
std::string sanitize(std::string text) {
    std::replace(text.begin(), text.end(), ',', ';');
    std::replace(text.begin(), text.end(), '\n', ' ');
    std::replace(text.begin(), text.end(), '\r', ' ');
    return text;
}

std::string summary_text(const ReportBundle& b, const BundleIndex& idx) {
    std::string out = "varbench report\n\n";
    const auto list = [](const auto& items, auto&& fmt_item) {
        std::string s;
        for (std::size_t i = 0; i < items.size(); ++i) s += (i ? ", " : "") + fmt_item(items[i]);
        return s;
    };
    const auto same = [](const std::string& s) { return s; };
    out += fmt::format("assets ({}): {}\n", b.assets.size(), list(b.assets, same));
    out += fmt::format("models ({}): {}\n", b.models.size(), list(b.models, same));
    out += fmt::format("levels: {}\n", list(b.levels, format_level));
    out += fmt::format("combinations: {} ok, {} failed, {} skipped\n", b.count(Status::ok), b.count(Status::failed),
                       b.count(Status::skipped));

    bool any_failed = false;
    for (const auto& o : b.outcomes) {
        if (o.status != Status::failed) continue;
        if (!any_failed) out += "\nfailed combinations\n";
        any_failed = true;
        out += fmt::format("  {} / {} / {}: {}\n", o.asset_id, o.model_id, format_level(o.level),
                           sanitize(o.diagnostic));
    }

    std::size_t width = 5;
    for (const auto& m : b.models) width = std::max(width, m.size());
    for (double level : b.levels) {
        const auto models = idx.complete_models(level);
        out += fmt::format("\nlevel {}\n", format_level(level));
        if (models.empty()) {
            out += "  no model covers every asset at this level\n";
            continue;
        }
        const auto dev = cross_section_summary(idx.metric(level, models, abs_dev));
        const auto qs = cross_section_summary(idx.metric(level, models, mean_qs_percent));
        out += fmt::format("  {:<{}}  {:>10}  {:>4}  {:>4}  {:>10}  {:>7}  {:>7}  {:>7}\n", "model", width,
                           "mean|1-AE|", "best", "top2", "meanQS(%)", "UC@95%", "CC@95%", "DQ@95%");
        for (std::size_t i = 0; i < models.size(); ++i) {
            std::size_t uc = 0, cc = 0, dq = 0;
            for (const auto& a : b.assets) {
                const auto* r = idx.report(a, models[i], level);
                uc += r->uc.p_value && *r->uc.p_value > 0.05 ? 1 : 0;
                cc += r->cc.p_value && *r->cc.p_value > 0.05 ? 1 : 0;
                dq += r->dq.p_value && *r->dq.p_value > 0.05 ? 1 : 0;
            }
            out += fmt::format("  {:<{}}  {:>10}  {:>4}  {:>4}  {:>10}  {:>7}  {:>7}  {:>7}\n", models[i], width,
                               format_metric(dev[i].mean), dev[i].best_count, dev[i].top2_count,
                               format_metric(qs[i].mean), uc, cc, dq);
        }
    }
    return out;
}

// Raw data files, full precision.

std::string optional_number(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string(); }

std::string reports_csv(const ReportBundle& b) {
    std::string out =
        "asset,model,level,observations,violations,ae,uc_stat,uc_dof,uc_p,uc_degenerate,cc_stat,cc_dof,cc_p,"
        "cc_degenerate,dq_stat,dq_dof,dq_p,dq_degenerate,mean_qs,total_qs\n";
    for (const auto& r : b.reports) {
        std::vector<std::string> cells{r.asset_id, r.model_id, format_level(r.level), std::to_string(r.observations),
                                       std::to_string(r.violations), fmt::format("{}", r.ae)};
        for (const TestResult* t : {&r.uc, &r.cc, &r.dq}) {
            cells.push_back(fmt::format("{}", t->statistic));
            cells.push_back(std::to_string(t->dof));
            cells.push_back(optional_number(t->p_value));
            cells.push_back(t->degenerate ? "1" : "0");
        }
        cells.push_back(fmt::format("{}", r.mean_qs));
        cells.push_back(fmt::format("{}", r.total_qs));
        out += join(cells);
    }
    return out;
}

std::string scores_csv(const ReportBundle& b) {
    std::string out = "asset,model,level,date,qs\n";
    for (const auto& s : b.scores) {
        const std::string prefix = fmt::format("{},{},{},", s.asset_id, s.model_id, format_level(s.level));
        for (std::size_t t = 0; t < s.scores.size(); ++t) {
            out += prefix;
            out += s.dates[t].to_string();
            out += fmt::format(",{}\n", s.scores[t]);
        }
    }
    return out;
}

std::string outcomes_csv(const ReportBundle& b) {
    std::string out = "asset,model,level,status,diagnostic\n";
    for (const auto& o : b.outcomes) {
        out += join({o.asset_id, o.model_id, format_level(o.level), to_string(o.status), sanitize(o.diagnostic)});
    }
    return out;
}

std::string manifest_yaml(const ReportBundle& b) {
    YAML::Emitter e;
    e << YAML::BeginMap;
    e << YAML::Key << "assets" << YAML::Value << YAML::Flow << b.assets;
    e << YAML::Key << "models" << YAML::Value << YAML::Flow << b.models;
    std::vector<std::string> levels;
    for (double l : b.levels) levels.push_back(format_level(l));
    e << YAML::Key << "levels" << YAML::Value << YAML::Flow << levels;
    e << YAML::Key << "dq_lags" << YAML::Value << b.dq_lags;
    e << YAML::Key << "ttest" << YAML::Value << (b.ttest == TTestKind::paired ? "paired" : "welch");
    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
    out << content;
    if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

// Loading.

struct CsvFile {
    std::filesystem::path path;
    std::vector<std::vector<std::string>> rows;
};

CsvFile read_csv(const std::filesystem::path& path, const std::string& expected_header) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
    CsvFile f{path, {}};
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!have_header) {
            if (line != expected_header) throw SchemaError(fmt::format("{}: unexpected header", path.string()));
            have_header = true;
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> cells;
        for (auto c : csv::split(line)) cells.emplace_back(c);
        f.rows.push_back(std::move(cells));
    }
    if (!have_header) throw SchemaError(fmt::format("{}: empty file", path.string()));
    return f;
}

double number(const CsvFile& f, const std::string& cell) {
    const auto v = csv::parse_double(cell);
    if (!v) throw SchemaError(fmt::format("{}: bad number '{}'", f.path.string(), cell));
    return *v;
}

std::size_t count(const CsvFile& f, const std::string& cell) {
    const double v = number(f, cell);
    if (v < 0.0 || v != std::floor(v)) throw SchemaError(fmt::format("{}: bad count '{}'", f.path.string(), cell));
    return static_cast<std::size_t>(v);
}

}  // namespace

std::string format_metric(double value) {
    if (std::isnan(value)) return "nan";
    std::string s = fmt::format("{:.3f}", value);
    if (s == "-0.000") s = "0.000";
    return s;
}

std::string format_p(double p) {
    if (p > 0.0 && p < 1e-3) return fmt::format("{:.3e}", p);
    return fmt::format("{:.3f}", p);
}

std::string significance_stars(double p) {
    if (p <= 0.01) return "***";
    if (p <= 0.025) return "**";
    if (p <= 0.05) return "*";
    return {};
}

std::vector<ReportFile> render_tables(const ReportBundle& bundle) {
    if (bundle.reports.empty()) throw InvalidInput("report bundle holds no backtest reports");
    const BundleIndex idx(bundle);
    return {
        {"ae_summary.csv", ae_summary_table(bundle, idx)},
        {"qs_summary.csv", qs_summary_table(bundle, idx)},
        {"ae_ttest.csv", ae_ttest_table(bundle, idx)},
        {"uc_pass.csv", pass_table(bundle, idx, &BacktestReport::uc)},
        {"cc_pass.csv", pass_table(bundle, idx, &BacktestReport::cc)},
        {"dq_pass.csv", pass_table(bundle, idx, &BacktestReport::dq)},
        {"skill_matrix.csv", skill_matrix_table(bundle, idx)},
        {"summary.txt", summary_text(bundle, idx)},
    };
}

void emit_reports(const ReportBundle& bundle, const std::filesystem::path& dir) {
    auto files = render_tables(bundle);
    files.insert(files.begin(), {{"manifest.yaml", manifest_yaml(bundle)},
                                 {"reports.csv", reports_csv(bundle)},
                                 {"scores.csv", scores_csv(bundle)},
                                 {"outcomes.csv", outcomes_csv(bundle)}});
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
    for (const auto& [name, content] : files) write_file(dir / name, content);
}

ReportBundle load_bundle(const std::filesystem::path& dir) {
    ReportBundle b;
    const auto manifest_path = dir / "manifest.yaml";
    YAML::Node manifest;
    try {
        manifest = YAML::LoadFile(manifest_path.string());
        b.assets = manifest["assets"].as<std::vector<std::string>>();
        b.models = manifest["models"].as<std::vector<std::string>>();
        for (const auto& l : manifest["levels"].as<std::vector<std::string>>()) {
            const auto v = csv::parse_double(l);
            if (!v) throw SchemaError(fmt::format("{}: bad level '{}'", manifest_path.string(), l));
            b.levels.push_back(*v);
        }
        b.dq_lags = manifest["dq_lags"].as<std::size_t>();
        const auto kind = manifest["ttest"].as<std::string>();
        if (kind != "welch" && kind != "paired") throw SchemaError(fmt::format("{}: bad ttest", manifest_path.string()));
        b.ttest = kind == "paired" ? TTestKind::paired : TTestKind::welch;
    } catch (const YAML::BadFile&) {
        throw IoError(fmt::format("cannot open '{}'", manifest_path.string()));
    } catch (const YAML::Exception& e) {
        throw SchemaError(fmt::format("{}: {}", manifest_path.string(), e.what()));
    }

    const auto reports = read_csv(dir / "reports.csv",
                                  "asset,model,level,observations,violations,ae,uc_stat,uc_dof,uc_p,uc_degenerate,"
                                  "cc_stat,cc_dof,cc_p,cc_degenerate,dq_stat,dq_dof,dq_p,dq_degenerate,mean_qs,total_qs");
    for (const auto& row : reports.rows) {
        if (row.size() != 20) throw SchemaError(fmt::format("{}: expected 20 fields", reports.path.string()));
        BacktestReport r;
        r.asset_id = row[0];
        r.model_id = row[1];
        r.level = number(reports, row[2]);
        r.observations = count(reports, row[3]);
        r.violations = count(reports, row[4]);
        r.ae = number(reports, row[5]);
        std::size_t c = 6;
        for (TestResult* t : {&r.uc, &r.cc, &r.dq}) {
            t->statistic = number(reports, row[c]);
            t->dof = static_cast<int>(count(reports, row[c + 1]));
            if (!row[c + 2].empty()) t->p_value = number(reports, row[c + 2]);
            t->degenerate = row[c + 3] == "1";
            c += 4;
        }
        r.mean_qs = number(reports, row[18]);
        r.total_qs = number(reports, row[19]);
        b.reports.push_back(std::move(r));
    }

    const auto scores = read_csv(dir / "scores.csv", "asset,model,level,date,qs");
    for (const auto& row : scores.rows) {
        if (row.size() != 5) throw SchemaError(fmt::format("{}: expected 5 fields", scores.path.string()));
        const double level = number(scores, row[2]);
        if (b.scores.empty() || b.scores.back().asset_id != row[0] || b.scores.back().model_id != row[1] ||
            b.scores.back().level != level) {
            b.scores.push_back({row[0], row[1], level, {}, {}});
        }
        try {
            b.scores.back().dates.push_back(Date::parse(row[3]));
        } catch (const InvalidInput& e) {
            throw SchemaError(fmt::format("{}: {}", scores.path.string(), e.what()));
        }
        b.scores.back().scores.push_back(number(scores, row[4]));
    }

    const auto outcomes = read_csv(dir / "outcomes.csv", "asset,model,level,status,diagnostic");
    for (const auto& row : outcomes.rows) {
        if (row.size() != 5) throw SchemaError(fmt::format("{}: expected 5 fields", outcomes.path.string()));
        Status status;
        if (row[3] == "ok") {
            status = Status::ok;
        } else if (row[3] == "failed") {
            status = Status::failed;
        } else if (row[3] == "skipped") {
            status = Status::skipped;
        } else {
            throw SchemaError(fmt::format("{}: unknown status '{}'", outcomes.path.string(), row[3]));
        }
        b.outcomes.push_back({row[0], row[1], number(outcomes, row[2]), status, row[4]});
    }
    return b;
}

}  // namespace varbench
