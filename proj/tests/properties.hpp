#pragma once

// Randomized invariant checks shared by the property tests and the acceptance
// binary. Each check runs `cases` generated inputs and reports the first
// counterexample it finds.

#include "varbench/backtest.hpp"
#include "varbench/dist.hpp"
#include "varbench/garch.hpp"
#include "varbench/gas.hpp"
#include "varbench/historical.hpp"
#include "varbench/series.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace varbench::testing {

struct PropertyResult {
    std::size_t cases = 0;
    std::size_t failures = 0;
    std::string first_failure;

    bool ok() const { return failures == 0; }
};

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    std::size_t index(std::size_t lo, std::size_t hi) {  // inclusive
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
    }
    bool chance(double p) { return uniform(0.0, 1.0) < p; }
    double normal(double sd = 1.0) { return std::normal_distribution<double>(0.0, sd)(rng_); }

    double level() {
        static constexpr double kCanonical[] = {0.01, 0.025, 0.05, 0.1};
        return chance(0.5) ? kCanonical[index(0, 3)] : uniform(0.001, 0.5);
    }

    DistSpec dist() {
        switch (index(0, 2)) {
            case 0: return Normal{};
            case 1: return StudentT{uniform(2.1, 30.0)};
            default: return HansenSkewT{uniform(2.1, 30.0), uniform(-0.95, 0.95)};
        }
    }

    GarchParams garch() {
        GarchParams p;
        p.mu = uniform(-1e-3, 1e-3);
        if (chance(0.3)) p.ar1 = uniform(-0.5, 0.5);
        p.omega = uniform(1e-7, 1e-4);
        p.alpha1 = uniform(0.0, 0.3);
        p.beta1 = uniform(0.0, 0.99 - p.alpha1);
        p.dist = dist();
        return p;
    }

    GasParams gas() {
        GasParams p;
        p.a = -uniform(0.005, 0.05);
        p.b = p.a * uniform(1.05, 2.5);
        p.beta = uniform(0.0, 0.98);
        p.gamma = uniform(0.0, 0.05);
        p.alpha = QuantileLevel(level());
        return p;
    }

    /// Daily returns with scale about 1%, occasionally rounded to create ties.
    std::vector<double> returns(std::size_t n) {
        const double sd = uniform(0.002, 0.03);
        const bool rounded = chance(0.3);
        std::vector<double> r(n);
        for (auto& x : r) {
            x = std::clamp(normal(sd), -0.5, 0.5);
            if (rounded) x = std::round(x * 1000.0) / 1000.0;
        }
        return r;
    }

    std::vector<std::uint8_t> hits(std::size_t n, double p) {
        std::vector<std::uint8_t> h(n);
        for (auto& x : h) x = chance(p) ? 1 : 0;
        return h;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

inline ReturnSeries dated(std::vector<double> r, const std::string& id = "P") {
    std::vector<Date> d;
    for (std::size_t t = 0; t < r.size(); ++t) d.push_back(Date{2001, 1, 1}.plus_days(static_cast<long>(t)));
    return ReturnSeries(id, std::move(d), std::move(r));
}

/// Runs `body` once per case; a non-empty return or an exception is a failure.
inline PropertyResult run_property(std::size_t cases, std::uint64_t seed,
                                   const std::function<std::optional<std::string>(Gen&, std::size_t)>& body) {
    PropertyResult out;
    Gen gen(seed);
    for (std::size_t k = 0; k < cases; ++k) {
        std::optional<std::string> problem;
        try {
            problem = body(gen, k);
        } catch (const std::exception& e) {
            problem = fmt::format("exception: {}", e.what());
        }
        ++out.cases;
        if (problem) {
            if (out.failures == 0) out.first_failure = fmt::format("case {}: {}", k, *problem);
            ++out.failures;
        }
    }
    return out;
}

/// VaR is nondecreasing in alpha for the distribution quantiles, historical
/// VaR, and GARCH forecasts (parametric and EDF).
inline PropertyResult var_monotone_in_alpha(std::size_t cases, std::uint64_t seed) {
    return run_property(cases, seed, [](Gen& g, std::size_t) -> std::optional<std::string> {
        double a1 = g.level();
        double a2 = g.level();
        if (a1 == a2) a2 = std::min(0.999, a1 + 0.01);
        if (a1 > a2) std::swap(a1, a2);
        const QuantileLevel l1(a1), l2(a2);

        const auto dist = g.dist();
        if (quantile(dist, l1) > quantile(dist, l2)) return fmt::format("{} quantile at {} > {}", describe(dist), a1, a2);

        const auto window = dated(g.returns(g.index(2, 600)));
        if (historical_var(window, l1) > historical_var(window, l2)) {
            return fmt::format("historical VaR at {} > {} (n = {})", a1, a2, window.size());
        }

        auto p = g.garch();
        if (g.chance(0.3)) {
            p.empirical_quantiles = true;
            p.residuals.resize(g.index(10, 400));
            for (auto& z : p.residuals) z = g.normal();
        }
        const double mean = g.uniform(-0.01, 0.01);
        const double sigma = g.uniform(1e-4, 0.1);
        if (garch_var_forecast(p, mean, sigma, l1) > garch_var_forecast(p, mean, sigma, l2)) {
            return fmt::format("GARCH VaR at {} > {}", a1, a2);
        }
        return std::nullopt;
    });
}

/// Every daily quantile score is >= 0, and 0 exactly when r = q.
inline PropertyResult quantile_score_nonnegative(std::size_t cases, std::uint64_t seed) {
    return run_property(cases, seed, [](Gen& g, std::size_t) -> std::optional<std::string> {
        const std::size_t n = g.index(1, 300);
        const auto r = g.returns(n);
        std::vector<double> q(n);
        for (std::size_t t = 0; t < n; ++t) q[t] = g.chance(0.1) ? r[t] : g.uniform(-0.1, 0.05);
        const auto qs = quantile_scores(r, q, QuantileLevel(g.level()));
        for (std::size_t t = 0; t < n; ++t) {
            if (qs.per_day[t] < 0.0) return fmt::format("negative score {} at t = {}", qs.per_day[t], t);
            if ((qs.per_day[t] == 0.0) != (r[t] == q[t])) {
                return fmt::format("score {} for r = {}, q = {}", qs.per_day[t], r[t], q[t]);
            }
        }
        return std::nullopt;
    });
}

/// Swapping the two models negates the DM statistic and mirrors the p-value.
inline PropertyResult dm_antisymmetric(std::size_t cases, std::uint64_t seed) {
    return run_property(cases, seed, [](Gen& g, std::size_t k) -> std::optional<std::string> {
        const std::size_t n = g.index(30, 500);
        std::vector<double> a(n), b(n);
        for (std::size_t t = 0; t < n; ++t) {
            a[t] = std::abs(g.normal(0.01));
            b[t] = k % 10 == 0 ? a[t] : std::abs(g.normal(0.01)) * g.uniform(0.5, 1.5);
        }
        const DmOptions opts{g.chance(0.5) ? g.index(1, 10) : 0};
        const auto ij = dm_test(a, b, opts);
        const auto ji = dm_test(b, a, opts);
        if (ij.statistic != -ji.statistic) return fmt::format("stat {} vs {}", ij.statistic, ji.statistic);
        if (std::abs(ij.p_value + ji.p_value - 1.0) > 1e-12) {
            return fmt::format("p-values {} and {} do not sum to 1", ij.p_value, ji.p_value);
        }
        return std::nullopt;
    });
}

/// UC, CC, DQ, DM and t-test p-values lie in [0, 1]; rejection decisions
/// agree with the p-value and are nested across significance levels.
inline PropertyResult p_values_in_range(std::size_t cases, std::uint64_t seed) {
    return run_property(cases, seed, [](Gen& g, std::size_t k) -> std::optional<std::string> {
        const std::size_t n = g.index(20, 1000);
        const double alpha = g.level();
        const double rate = k % 25 == 0 ? 0.0 : k % 25 == 1 ? 1.0 : g.uniform(0.0, 3.0 * alpha);
        HitSeries h{QuantileLevel(alpha), g.hits(n, std::min(rate, 1.0))};
        std::vector<double> q(n);
        for (auto& x : q) x = g.uniform(-0.05, -0.001);
        const std::size_t lags = g.index(1, 4);

        const auto check = [](const char* name, const TestResult& r) -> std::optional<std::string> {
            if (r.p_value && !(*r.p_value >= 0.0 && *r.p_value <= 1.0)) return fmt::format("{} p = {}", name, *r.p_value);
            const auto d = r.decisions();
            for (std::size_t i = 0; i < d.size(); ++i) {
                if (d[i].second != (r.p_value && *r.p_value <= d[i].first)) {
                    return fmt::format("{} decision at {} disagrees with p", name, d[i].first);
                }
                if (i > 0 && d[i - 1].second && !d[i].second) return fmt::format("{} decisions not nested", name);
            }
            return std::nullopt;
        };
        if (auto e = check("UC", uc_test(h))) return e;
        if (auto e = check("CC", cc_test(h))) return e;
        if (n > lags + 5) {
            if (auto e = check("DQ", dq_test(h, q, lags))) return e;
        }

        const std::size_t m = g.index(30, 300);
        std::vector<double> a(m), b(m);
        for (std::size_t t = 0; t < m; ++t) {
            a[t] = std::abs(g.normal(0.01));
            b[t] = std::abs(g.normal(0.01)) + g.uniform(-0.005, 0.005);
        }
        const auto dm = dm_test(a, b, {g.index(0, 5)});
        if (!(dm.p_value >= 0.0 && dm.p_value <= 1.0)) return fmt::format("DM p = {}", dm.p_value);

        const std::size_t assets = g.index(3, 40);
        std::vector<double> di(assets), dj(assets);
        for (std::size_t i = 0; i < assets; ++i) {
            di[i] = std::abs(g.normal(0.3));
            dj[i] = g.chance(0.1) ? di[i] : std::abs(g.normal(0.3));
        }
        for (auto kind : {TTestKind::welch, TTestKind::paired}) {
            const auto t = ae_dev_ttest(di, dj, kind);
            if (!(t.p_value >= 0.0 && t.p_value <= 1.0)) return fmt::format("t-test p = {}", t.p_value);
        }
        return std::nullopt;
    });
}

/// A hit is r < q: equality is not a hit, the next representable value below
/// q is.
inline PropertyResult strict_hit_convention(std::size_t cases, std::uint64_t seed) {
    return run_property(cases, seed, [](Gen& g, std::size_t) -> std::optional<std::string> {
        const std::size_t n = g.index(1, 200);
        std::vector<double> q(n), r(n);
        std::vector<std::uint8_t> expect(n);
        for (std::size_t t = 0; t < n; ++t) {
            q[t] = g.uniform(-0.2, 0.1);
            switch (g.index(0, 3)) {
                case 0: r[t] = q[t]; break;
                case 1: r[t] = std::nextafter(q[t], -std::numeric_limits<double>::infinity()); break;
                case 2: r[t] = std::nextafter(q[t], std::numeric_limits<double>::infinity()); break;
                default: r[t] = g.uniform(-0.2, 0.2); break;
            }
            expect[t] = r[t] < q[t] ? 1 : 0;
        }
        const auto h = compute_hits(r, q, QuantileLevel(g.level()));
        for (std::size_t t = 0; t < n; ++t) {
            if (h.hits[t] != expect[t]) return fmt::format("r = {:.17g}, q = {:.17g}: hit {}", r[t], q[t], h.hits[t]);
        }
        std::size_t a = 0;
        for (auto x : expect) a += x;
        if (h.violations() != a) return fmt::format("violations {} != {}", h.violations(), a);
        return std::nullopt;
    });
}

/// A forecast for day t never depends on returns dated t or later: rewriting
/// the tail of the series from a random cut leaves every earlier forecast
/// unchanged, and every rolling window ends before its first target.
inline PropertyResult no_leakage(std::size_t cases, std::uint64_t seed) {
    return run_property(cases, seed, [](Gen& g, std::size_t k) -> std::optional<std::string> {
        const std::size_t m = g.index(2, 60);
        const std::size_t step = g.index(1, 30);
        const std::size_t test = g.index(1, 150);
        const std::size_t n = m + test + g.index(0, 20);
        auto r = g.returns(n);
        const std::size_t origin = n - test;
        const auto series = dated(r);
        const Date start = series.dates()[origin];

        for (const auto& w : rolling_windows(series, {m, step}, start)) {
            if (!(w.window.dates().back() < w.target_dates.front())) return std::string("window reaches its target");
            if (w.target_dates.front() < start) return std::string("target before the test span");
        }

        const std::size_t cut = g.index(origin, n - 1);
        auto changed = r;
        for (std::size_t t = cut; t < n; ++t) changed[t] = std::clamp(g.normal(0.05), -0.5, 0.5);
        const auto altered = dated(changed);

        const std::vector<QuantileLevel> levels{QuantileLevel(g.level())};
        std::vector<double> before, after;
        switch (k % 3) {
            case 0: {
                const auto f0 = historical_forecasts(series, {m, step}, start, levels, "H")[0];
                const auto f1 = historical_forecasts(altered, {m, step}, start, levels, "H")[0];
                before.assign(f0.values().begin(), f0.values().end());
                after.assign(f1.values().begin(), f1.values().end());
                break;
            }
            case 1: {
                const auto p = g.garch();
                const auto f0 = garch_forecasts(p, series, start, levels, "G")[0];
                const auto f1 = garch_forecasts(p, altered, start, levels, "G")[0];
                before.assign(f0.values().begin(), f0.values().end());
                after.assign(f1.values().begin(), f1.values().end());
                break;
            }
            default: {
                const auto p = g.gas();
                const auto f0 = gas_forecasts(p, series, start, "S");
                const auto f1 = gas_forecasts(p, altered, start, "S");
                before.assign(f0.values().begin(), f0.values().end());
                after.assign(f1.values().begin(), f1.values().end());
                break;
            }
        }
        if (before.size() != test || after.size() != test) return fmt::format("expected {} forecasts", test);
        for (std::size_t t = origin; t <= cut; ++t) {
            if (before[t - origin] != after[t - origin]) {
                return fmt::format("model {} forecast for t = {} moved after rewriting from {}", k % 3, t, cut);
            }
        }
        return std::nullopt;
    });
}

/// Reordering (r, q) pairs leaves AE and UC unchanged; packing the same hits
/// into one run changes the CC statistic, raising it above an evenly spread
/// arrangement once there are three or more hits.
inline PropertyResult permutation_sensitivity(std::size_t cases, std::uint64_t seed) {
    return run_property(cases, seed, [](Gen& g, std::size_t) -> std::optional<std::string> {
        const std::size_t n = g.index(50, 1000);
        const double alpha = g.level();
        const auto r = g.returns(n);
        std::vector<double> q(n);
        for (auto& x : q) x = g.uniform(-0.03, 0.0);
        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), g.engine());
        std::vector<double> rp(n), qp(n);
        for (std::size_t i = 0; i < n; ++i) {
            rp[i] = r[perm[i]];
            qp[i] = q[perm[i]];
        }
        const QuantileLevel level(alpha);
        const auto h = compute_hits(r, q, level);
        const auto hp = compute_hits(rp, qp, level);
        if (ae_ratio(h) != ae_ratio(hp)) return std::string("AE changed under permutation");
        if (uc_test(h).statistic != uc_test(hp).statistic) return std::string("UC changed under permutation");

        const std::size_t a = g.index(2, n / 4);
        HitSeries spread{level, std::vector<std::uint8_t>(n, 0)};
        HitSeries packed{level, std::vector<std::uint8_t>(n, 0)};
        for (std::size_t i = 0; i < a; ++i) spread.hits[i * n / a] = 1;
        const std::size_t first = g.index(0, n - a);
        for (std::size_t i = 0; i < a; ++i) packed.hits[first + i] = 1;
        if (uc_test(spread).statistic != uc_test(packed).statistic) return std::string("UC differs for equal counts");
        // Two isolated hits also fit a Markov chain well (no hit ever follows
        // a hit), so only sensitivity is required there.
        const double cc_packed = cc_test(packed).statistic;
        const double cc_spread = cc_test(spread).statistic;
        if (a == 2 ? cc_packed == cc_spread : !(cc_packed > cc_spread)) {
            return fmt::format("CC {} packed vs {} spread (T = {}, A = {})", cc_packed, cc_spread, n, a);
        }
        return std::nullopt;
    });
}

/// The CC statistic never falls below its UC component, the Kupiec statistic
/// of the observations after the first.
inline PropertyResult cc_dominates_uc(std::size_t cases, std::uint64_t seed) {
    return run_property(cases, seed, [](Gen& g, std::size_t) -> std::optional<std::string> {
        const std::size_t n = g.index(2, 3000);
        const double alpha = g.level();
        const double rate = g.chance(0.2) ? g.uniform(0.0, 1.0) : alpha * g.uniform(0.3, 3.0);
        HitSeries h{QuantileLevel(alpha), g.hits(n, std::min(rate, 1.0))};
        if (g.chance(0.1)) std::fill(h.hits.begin(), h.hits.end(), g.chance(0.5) ? 1 : 0);
        const HitSeries tail{h.level, std::vector<std::uint8_t>(h.hits.begin() + 1, h.hits.end())};
        const double cc = cc_test(h).statistic;
        const double uc = uc_test(tail).statistic;
        if (cc < uc - 1e-9) return fmt::format("CC {} below UC component {} (T = {})", cc, uc, n);
        return std::nullopt;
    });
}

}  // namespace varbench::testing
