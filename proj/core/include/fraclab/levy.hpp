#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "fraclab/grid.hpp"

namespace fraclab {

// Monte Carlo for the symmetric 2a-stable process X_t generated by -(-Δ)^a,
// E[exp(iθ X_t)] = exp(-t |θ|^{2a}).

/// Counter-based generator: the k-th output of stream (seed, stream) is a fixed
/// function of (seed, stream, k), so paths can be simulated in any order.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
    result_type operator()() noexcept;

    /// Uniform on (0, 1], 53-bit resolution.
    double uniform_open0() noexcept;

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

enum class DomainKind { Interval, WholeLine };

struct StableConfig {
    FractionalOrder a{0.5};
    double dt = 1e-3;
    std::size_t n_paths = 100000;
    std::uint64_t seed = 1;
    DomainKind domain = DomainKind::Interval;
    /// Killing interval for DomainKind::Interval.
    double lo = -1.0;
    double hi = 1.0;
    /// Worker threads; 0 means hardware concurrency. Results do not depend on it.
    std::size_t threads = 1;
};

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_effective = 0;

    double lower() const noexcept { return mean - 3.0 * std_error; }
    double upper() const noexcept { return mean + 3.0 * std_error; }
    /// |mean - value| ≤ k std_error.
    bool agrees_with(double value, double k = 3.0) const noexcept;
};

/// One draw of X_dt by the Chambers–Mallows–Stuck construction with α = 2a.
double sample_increment(FractionalOrder a, double dt, CounterRng& rng);

/// E[u0(x + X_t)] (exact one-step sampling of X_t).
MCEstimate feynman_kac_free(const StableConfig& cfg, const std::function<double(double)>& u0, double x, double t);

struct KilledEstimate {
    /// dt-extrapolated value 2 S(dt) - S(2dt).
    MCEstimate extrapolated;
    /// Estimates with the kill check every dt·2^l, l = 0, 1, ...
    std::vector<MCEstimate> levels;
    std::vector<double> level_dt;
    /// |S(dt) - S(2dt)|: first-order estimate of the kill bias left in S(dt).
    double bias_estimate = 0.0;
};

/// E[u0(X_t); τ > t] for X_0 = x, τ the first exit time from (lo, hi), checked at
/// step ends. t must be a multiple of 2 dt. Requires cfg.dt ≤ 1e-2.
KilledEstimate feynman_kac_killed(const StableConfig& cfg, const std::function<double(double)>& u0, double x,
                                  double t, std::size_t levels = 2);

struct EigenvalueMcOptions {
    /// λ_gap of the first mode that survives the symmetric start (λ₃ - λ₁); 0 skips the check.
    double gap = 0.0;
    /// Largest admissible exp(-gap · t1).
    double contamination_limit = 0.15;
    std::size_t min_survivors = 100;
};

struct EigenvalueMcReport {
    /// dt-extrapolated -d log P(τ > t)/dt over the window.
    MCEstimate lambda;
    MCEstimate lambda_fine;
    MCEstimate lambda_coarse;
    /// Survival at t1 and t2 (finest level).
    MCEstimate survival_t1;
    MCEstimate survival_t2;
    std::vector<double> survival_curve_times;
    std::vector<double> survival_curve;
};

/// Paths start uniformly on (lo, hi). Throws InvalidArgument if t2 < 2 t1 or the
/// gap check fails, and ConvergenceError if fewer than min_survivors paths live to t2.
EigenvalueMcReport principal_eigenvalue_mc(const StableConfig& cfg, std::pair<double, double> window,
                                           const EigenvalueMcOptions& opts = {});

}  // namespace fraclab
