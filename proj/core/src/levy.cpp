#include "fraclab/levy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "fraclab/error.hpp"

namespace fraclab {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

template <class F>
void for_each_path(std::size_t n, std::size_t threads, const F& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, std::max<std::size_t>(1, n / 256));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::jthread> pool;
    const std::size_t block = (n + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t lo = t * block, hi = std::min(n, lo + block);
        pool.emplace_back([&body, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
}

// Mean and standard error, summed in path order.
MCEstimate summarize(const std::vector<double>& v) {
    MCEstimate e;
    e.n_effective = v.size();
    if (v.empty()) return e;
    double s = 0.0;
    for (double x : v) s += x;
    e.mean = s / static_cast<double>(v.size());
    if (v.size() > 1) {
        double q = 0.0;
        for (double x : v) q += (x - e.mean) * (x - e.mean);
        e.std_error = std::sqrt(q / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    }
    return e;
}

void check_config(const StableConfig& cfg) {
    if (cfg.n_paths < 1000) throw InvalidArgument("StableConfig: n_paths must be at least 1000");
    if (!(cfg.dt > 0.0)) throw InvalidArgument("StableConfig: dt must be positive");
}

std::size_t steps_for(double t, double dt, std::size_t multiple) {
    const double r = t / dt;
    const double n = std::round(r);
    if (std::abs(r - n) > 1e-9 * std::max(1.0, r) || static_cast<std::size_t>(n) % multiple != 0) {
        throw InvalidArgument("killed simulation: t must be a multiple of " + std::to_string(multiple) + "·dt");
    }
    return static_cast<std::size_t>(n);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(mix(seed + kGolden) ^ mix(mix(stream + 2 * kGolden))) {}

CounterRng::result_type CounterRng::operator()() noexcept { return mix(key_ ^ mix(++counter_ * kGolden)); }

double CounterRng::uniform_open0() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

bool MCEstimate::agrees_with(double value, double k) const noexcept {
    return std::abs(mean - value) <= k * std_error;
}

double sample_increment(FractionalOrder a, double dt, CounterRng& rng) {
    const double alpha = a.stable_index();
    const double v = std::numbers::pi * (rng.uniform_open0() - 0.5);
    const double w = -std::log(rng.uniform_open0());
    double x;
    if (std::abs(alpha - 1.0) < 1e-12) {
        x = std::tan(v);
    } else {
        x = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
            std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
    }
    return std::pow(dt, 1.0 / alpha) * x;
}

MCEstimate feynman_kac_free(const StableConfig& cfg, const std::function<double(double)>& u0, double x, double t) {
    check_config(cfg);
    if (t < 0.0) throw InvalidArgument("feynman_kac_free: t must be nonnegative");
    if (t == 0.0) return {u0(x), 0.0, cfg.n_paths};
    std::vector<double> vals(cfg.n_paths);
    for_each_path(cfg.n_paths, cfg.threads, [&](std::size_t i) {
        CounterRng rng(cfg.seed, i);
        vals[i] = u0(x + sample_increment(cfg.a, t, rng));
    });
    return summarize(vals);
}

KilledEstimate feynman_kac_killed(const StableConfig& cfg, const std::function<double(double)>& u0, double x,
                                  double t, std::size_t levels) {
    check_config(cfg);
    if (cfg.dt > 1e-2) throw InvalidArgument("feynman_kac_killed: dt must not exceed 1e-2");
    if (levels < 2 || levels > 8) throw InvalidArgument("feynman_kac_killed: levels must lie in [2, 8]");
    if (!(x > cfg.lo && x < cfg.hi)) throw InvalidArgument("feynman_kac_killed: x must lie inside the interval");
    KilledEstimate out;
    if (t == 0.0) {
        const MCEstimate e{u0(x), 0.0, cfg.n_paths};
        out.extrapolated = e;
        for (std::size_t l = 0; l < levels; ++l) {
            out.levels.push_back(e);
            out.level_dt.push_back(cfg.dt * static_cast<double>(std::size_t{1} << l));
        }
        return out;
    }
    const std::size_t steps = steps_for(t, cfg.dt, std::size_t{1} << (levels - 1));
    std::vector<std::vector<double>> vals(levels, std::vector<double>(cfg.n_paths, 0.0));
    for_each_path(cfg.n_paths, cfg.threads, [&](std::size_t i) {
        CounterRng rng(cfg.seed, i);
        double pos = x;
        std::vector<bool> alive(levels, true);
        std::size_t living = levels;
        for (std::size_t s = 1; s <= steps && living > 0; ++s) {
            pos += sample_increment(cfg.a, cfg.dt, rng);
            if (pos > cfg.lo && pos < cfg.hi) continue;
            for (std::size_t l = 0; l < levels; ++l) {
                if (alive[l] && s % (std::size_t{1} << l) == 0) {
                    alive[l] = false;
                    --living;
                }
            }
        }
        if (living == 0) return;
        const double v = u0(pos);
        for (std::size_t l = 0; l < levels; ++l) {
            if (alive[l]) vals[l][i] = v;
        }
    });
    for (std::size_t l = 0; l < levels; ++l) {
        out.levels.push_back(summarize(vals[l]));
        out.level_dt.push_back(cfg.dt * static_cast<double>(std::size_t{1} << l));
    }
    std::vector<double> combo(cfg.n_paths);
    for (std::size_t i = 0; i < cfg.n_paths; ++i) combo[i] = 2.0 * vals[0][i] - vals[1][i];
    out.extrapolated = summarize(combo);
    out.bias_estimate = std::abs(out.levels[0].mean - out.levels[1].mean);
    return out;
}

EigenvalueMcReport principal_eigenvalue_mc(const StableConfig& cfg, std::pair<double, double> window,
                                           const EigenvalueMcOptions& opts) {
    check_config(cfg);
    if (cfg.dt > 1e-2) throw InvalidArgument("principal_eigenvalue_mc: dt must not exceed 1e-2");
    const auto [t1, t2] = window;
    if (!(t1 > 0.0) || t2 < 2.0 * t1) throw InvalidArgument("principal_eigenvalue_mc: need t1 > 0 and t2 ≥ 2 t1");
    if (opts.gap > 0.0 && std::exp(-opts.gap * t1) > opts.contamination_limit) {
        throw InvalidArgument("principal_eigenvalue_mc: t1 too small for the spectral gap");
    }
    const std::size_t s1 = steps_for(t1, cfg.dt, 2);
    const std::size_t s2 = steps_for(t2, cfg.dt, 2);
    constexpr std::size_t kCurve = 16;

    // Per path: step index of the first failed check, fine (every step) and coarse (every other step).
    std::vector<std::size_t> death_fine(cfg.n_paths), death_coarse(cfg.n_paths);
    for_each_path(cfg.n_paths, cfg.threads, [&](std::size_t i) {
        CounterRng rng(cfg.seed, i);
        double pos = cfg.lo + (cfg.hi - cfg.lo) * rng.uniform_open0();
        std::size_t df = s2 + 1, dc = s2 + 1;
        for (std::size_t s = 1; s <= s2; ++s) {
            pos += sample_increment(cfg.a, cfg.dt, rng);
            if (pos > cfg.lo && pos < cfg.hi) continue;
            if (df > s2) df = s;
            if (s % 2 == 0) {
                dc = s;
                break;
            }
        }
        death_fine[i] = df;
        death_coarse[i] = dc;
    });

    const double n = static_cast<double>(cfg.n_paths);
    auto survival = [&](const std::vector<std::size_t>& death, std::size_t s) {
        std::size_t c = 0;
        for (std::size_t d : death) c += d > s ? 1 : 0;
        return static_cast<double>(c) / n;
    };
    const double f1 = survival(death_fine, s1), f2 = survival(death_fine, s2);
    const double c1 = survival(death_coarse, s1), c2 = survival(death_coarse, s2);
    if (f2 * n < static_cast<double>(opts.min_survivors) || c2 * n < static_cast<double>(opts.min_survivors)) {
        throw ConvergenceError("principal_eigenvalue_mc: too few paths survive to t2", f2, f2 * n);
    }
    const double span = t2 - t1;

    // Linearized (delta-method) influence of each path on the three λ estimates.
    std::vector<double> psi_fine(cfg.n_paths), psi_coarse(cfg.n_paths), psi_ext(cfg.n_paths);
    std::vector<double> ind1(cfg.n_paths), ind2(cfg.n_paths);
    for (std::size_t i = 0; i < cfg.n_paths; ++i) {
        const double i1f = death_fine[i] > s1, i2f = death_fine[i] > s2;
        const double i1c = death_coarse[i] > s1, i2c = death_coarse[i] > s2;
        psi_fine[i] = ((i1f - f1) / f1 - (i2f - f2) / f2) / span;
        psi_coarse[i] = ((i1c - c1) / c1 - (i2c - c2) / c2) / span;
        psi_ext[i] = 2.0 * psi_fine[i] - psi_coarse[i];
        ind1[i] = i1f;
        ind2[i] = i2f;
    }
    const double lam_f = (std::log(f1) - std::log(f2)) / span;
    const double lam_c = (std::log(c1) - std::log(c2)) / span;

    EigenvalueMcReport r;
    r.lambda_fine = summarize(psi_fine);
    r.lambda_fine.mean = lam_f;
    r.lambda_coarse = summarize(psi_coarse);
    r.lambda_coarse.mean = lam_c;
    r.lambda = summarize(psi_ext);
    r.lambda.mean = 2.0 * lam_f - lam_c;
    r.survival_t1 = summarize(ind1);
    r.survival_t2 = summarize(ind2);
    for (std::size_t k = 1; k <= kCurve; ++k) {
        const std::size_t s = s2 * k / kCurve;
        r.survival_curve_times.push_back(cfg.dt * static_cast<double>(s));
        r.survival_curve.push_back(survival(death_fine, s));
    }
    return r;
}

}  // namespace fraclab
