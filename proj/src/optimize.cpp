#include "varbench/optimize.hpp"

#include "varbench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <fmt/format.h>

namespace varbench::optimize {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct RestartOutcome {
    std::vector<double> point;
    double value = kInf;
    std::size_t evaluations = 0;
    bool converged = false;
};

class Simplex {
public:
    Simplex(const ObjectiveSpec& spec, std::size_t& evals) : spec_(spec), evals_(evals) {}

    double eval(const std::vector<double>& x) {
        ++evals_;
        const double v = spec_.evaluate(std::span<const double>(x));
        return std::isnan(v) ? kInf : v;
    }

    RestartOutcome run(const std::vector<double>& start) {
        const std::size_t n = spec_.dimension;
        const std::size_t first_eval = evals_;
        std::vector<std::vector<double>> x(n + 1, start);
        for (std::size_t i = 0; i < n; ++i) x[i + 1][i] += spec_.initial_step;
        std::vector<double> f(n + 1);
        for (std::size_t i = 0; i <= n; ++i) f[i] = eval(x[i]);

        std::vector<std::size_t> order(n + 1);
        std::vector<double> centroid(n);
        auto point_along = [&](double coef, const std::vector<double>& worst) {
            std::vector<double> p(n);
            for (std::size_t i = 0; i < n; ++i) p[i] = centroid[i] + coef * (worst[i] - centroid[i]);
            return p;
        };

        bool converged = false;
        while (true) {
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
            const std::size_t best = order.front();
            const std::size_t worst = order.back();
            const std::size_t second_worst = order[n - 1];

            if (std::isfinite(f[worst]) && f[worst] - f[best] < spec_.tolerance) {
                converged = true;
                break;
            }
            if (evals_ - first_eval >= spec_.budget) break;

            std::fill(centroid.begin(), centroid.end(), 0.0);
            for (std::size_t k = 0; k < n; ++k) {
                const auto& v = x[order[k]];
                for (std::size_t i = 0; i < n; ++i) centroid[i] += v[i];
            }
            for (auto& c : centroid) c /= static_cast<double>(n);

            auto reflected = point_along(-kReflect, x[worst]);
            const double fr = eval(reflected);
            if (fr < f[best]) {
                auto expanded = point_along(-kExpand, x[worst]);
                const double fe = eval(expanded);
                if (fe < fr) {
                    x[worst] = std::move(expanded);
                    f[worst] = fe;
                } else {
                    x[worst] = std::move(reflected);
                    f[worst] = fr;
                }
                continue;
            }
            if (fr < f[second_worst]) {
                x[worst] = std::move(reflected);
                f[worst] = fr;
                continue;
            }
            if (fr < f[worst]) {
                auto outside = point_along(-kContract * kReflect, x[worst]);
                const double fc = eval(outside);
                if (fc <= fr) {
                    x[worst] = std::move(outside);
                    f[worst] = fc;
                    continue;
                }
            } else {
                auto inside = point_along(kContract, x[worst]);
                const double fc = eval(inside);
                if (fc < f[worst]) {
                    x[worst] = std::move(inside);
                    f[worst] = fc;
                    continue;
                }
            }
            for (std::size_t k = 1; k <= n; ++k) {
                auto& v = x[order[k]];
                for (std::size_t i = 0; i < n; ++i) v[i] = x[best][i] + kShrink * (v[i] - x[best][i]);
                f[order[k]] = eval(v);
            }
        }

        const auto best_it = std::min_element(f.begin(), f.end());
        RestartOutcome out;
        out.point = x[static_cast<std::size_t>(best_it - f.begin())];
        out.value = *best_it;
        out.evaluations = evals_ - first_eval;
        out.converged = converged;
        return out;
    }

private:
    const ObjectiveSpec& spec_;
    std::size_t& evals_;
};

}  // namespace

OptimResult minimize(const ObjectiveSpec& spec) {
    if (spec.dimension < 1) throw InvalidInput("objective dimension must be at least 1");
    if (!spec.evaluate) throw InvalidInput("objective has no evaluate function");
    if (spec.budget < 50 * spec.dimension) {
        throw InvalidInput(fmt::format("budget {} below 50 x dimension ({})", spec.budget, 50 * spec.dimension));
    }
    if (spec.restarts < 1) throw InvalidInput("at least one restart is required");
    if (!spec.start.empty() && spec.start.size() != spec.dimension) {
        throw InvalidInput(fmt::format("start point has {} coordinates, dimension is {}", spec.start.size(),
                                       spec.dimension));
    }

    std::size_t evals = 0;
    Simplex simplex(spec, evals);
    const std::vector<double> origin = spec.start.empty() ? std::vector<double>(spec.dimension, 0.0) : spec.start;

    OptimResult result;
    RestartOutcome best;
    for (std::size_t k = 0; k < spec.restarts; ++k) {
        std::vector<double> start = k == 0 || best.point.empty() ? origin : best.point;
        if (k > 0) {
            std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                              static_cast<std::uint32_t>(k)};
            std::mt19937_64 rng(seq);
            std::normal_distribution<double> jitter(0.0, spec.initial_step);
            for (auto& s : start) s += jitter(rng);
        }
        auto outcome = simplex.run(start);
        result.restart_values.push_back(outcome.value);
        if (outcome.value < best.value || best.point.empty()) best = std::move(outcome);
    }

    if (!std::isfinite(best.value)) {
        throw OptimizationFailure(fmt::format("no finite objective value in {} evaluations", evals));
    }
    result.best_unconstrained = best.point;
    result.best_point = spec.transform ? spec.transform(std::span<const double>(best.point)) : best.point;
    result.best_value = best.value;
    result.evaluations_used = evals;
    result.converged = best.converged;
    return result;
}

}  // namespace varbench::optimize
