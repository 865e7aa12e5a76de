#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace varbench::optimize {

/// Minimization problem posed in unconstrained coordinates. `evaluate` must
/// be total: return +infinity (or NaN, treated the same) for points it cannot
/// score. `transform` maps unconstrained coordinates to model parameters and
/// defaults to the identity.
struct ObjectiveSpec {
    std::size_t dimension = 0;
    std::function<double(std::span<const double>)> evaluate;
    std::function<std::vector<double>(std::span<const double>)> transform;
    std::vector<double> start;  // unconstrained; zeros when empty
    std::size_t budget = 2000;  // evaluations per restart
    std::size_t restarts = 5;
    std::uint64_t seed = 0;
    double tolerance = 1e-9;     // simplex value spread at convergence
    double initial_step = 0.1;   // simplex edge and restart jitter scale
};

struct OptimResult {
    std::vector<double> best_point;          // transformed
    std::vector<double> best_unconstrained;
    double best_value = 0.0;
    std::size_t evaluations_used = 0;
    bool converged = false;
    std::vector<double> restart_values;
};

/// Nelder–Mead with reflection 1, expansion 2, contraction 0.5, shrink 0.5.
/// Restart 0 starts at `spec.start`; restart k > 0 starts at the best point
/// found so far plus Gaussian jitter drawn from a stream seeded by (seed, k).
/// Throws InvalidInput on a malformed spec and OptimizationFailure when no
/// finite value is ever found.
OptimResult minimize(const ObjectiveSpec& spec);

/// Positive and interval transforms shared by the model fits.
inline double logistic(double u) noexcept { return 1.0 / (1.0 + std::exp(-u)); }
inline double logit(double p) noexcept { return std::log(p / (1.0 - p)); }

}  // namespace varbench::optimize
