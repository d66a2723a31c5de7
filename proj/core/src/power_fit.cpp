#include "fraclab/power_fit.hpp"

#include <algorithm>
#include <cmath>

#include "fraclab/error.hpp"

namespace fraclab {

namespace {

void check_window(FitWindow w) {
    if (!(w.lo > 0.0) || !(w.hi > w.lo)) {
        throw InvalidArgument("fit window must satisfy 0 < lo < hi");
    }
}

PowerFit fit_log_log(const std::vector<double>& dist, const std::vector<double>& vals, FitWindow w) {
    if (dist.size() < 8) {
        throw InvalidArgument("fit_power_law: fewer than 8 usable points in window");
    }
    const bool positive = vals.front() > 0.0;
    for (double v : vals) {
        if (v == 0.0 || !std::isfinite(v)) {
            throw InvalidArgument("fit_power_law: zero or non-finite value in window");
        }
        if ((v > 0.0) != positive) {
            throw InvalidArgument("fit_power_law: sign change inside window");
        }
    }
    const std::size_t m = dist.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double lx = std::log(dist[i]);
        const double ly = std::log(std::abs(vals[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double md = static_cast<double>(m);
    const double slope = (md * sxy - sx * sy) / (md * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / md;

    PowerFit fit;
    fit.exponent = slope;
    fit.amplitude = std::exp(intercept);
    fit.fit_window = w;
    fit.points = m;
    for (std::size_t i = 0; i < m; ++i) {
        const double model = fit.amplitude * std::pow(dist[i], slope);
        fit.residual = std::max(fit.residual, std::abs(std::abs(vals[i]) - model) / model);
    }
    return fit;
}

}  // namespace

PowerFit fit_power_law(const SampledFunction& samples, double anchor, FitWindow window,
                       Side side, std::size_t target_points) {
    check_window(window);
    const auto& g = samples.grid();
    const double sign = side == Side::Right ? 1.0 : -1.0;
    if (!g.contains(anchor + sign * window.hi) || !g.contains(anchor + sign * window.lo)) {
        throw InvalidArgument("fit_power_law: window leaves the sampled range");
    }
    std::vector<std::size_t> nodes;
    const double ratio = std::pow(window.hi / window.lo, 1.0 / static_cast<double>(target_points - 1));
    double d = window.lo;
    for (std::size_t k = 0; k < target_points; ++k, d *= ratio) {
        const std::size_t i = g.nearest_index(anchor + sign * d);
        const double di = sign * (g.x(i) - anchor);
        if (di >= window.lo * (1.0 - 1e-12) && di <= window.hi * (1.0 + 1e-12) &&
            (nodes.empty() || nodes.back() != i)) {
            nodes.push_back(i);
        }
    }
    std::vector<double> dist, vals;
    for (std::size_t i : nodes) {
        dist.push_back(sign * (g.x(i) - anchor));
        vals.push_back(samples[i].real());
    }
    return fit_log_log(dist, vals, window);
}

PowerFit fit_power_law(const std::function<double(double)>& of_distance, FitWindow window,
                       std::size_t points) {
    check_window(window);
    std::vector<double> dist(points), vals(points);
    const double ratio = std::pow(window.hi / window.lo, 1.0 / static_cast<double>(points - 1));
    double d = window.lo;
    for (std::size_t k = 0; k < points; ++k, d *= ratio) {
        dist[k] = d;
        vals[k] = of_distance(d);
    }
    return fit_log_log(dist, vals, window);
}

LimitEstimate extrapolate_limit(std::span<const double> samples) {
    const std::size_t m = samples.size();
    if (m < 3) {
        throw InvalidArgument("extrapolate_limit: needs at least 3 samples");
    }
    std::vector<std::vector<double>> t(m);
    for (std::size_t j = 0; j < m; ++j) {
        t[j].resize(j + 1);
        t[j][0] = samples[j];
        double factor = 1.0;
        for (std::size_t k = 1; k <= j; ++k) {
            factor *= 2.0;
            t[j][k] = t[j][k - 1] + (t[j][k - 1] - t[j - 1][k - 1]) / (factor - 1.0);
        }
    }
    LimitEstimate est;
    for (std::size_t j = 0; j < m; ++j) est.diagonal.push_back(t[j][j]);

    // Walk down the diagonal while the level-to-level change keeps shrinking.
    // Once it grows above the rounding floor, sampling error has taken over.
    const double scale = std::max(std::abs(est.diagonal.front()), 1e-300);
    std::size_t level = 1;
    double change = std::abs(est.diagonal[1] - est.diagonal[0]);
    for (std::size_t j = 2; j < m; ++j) {
        const double cur = std::abs(est.diagonal[j] - est.diagonal[j - 1]);
        if (cur > change && cur > 1e-11 * scale) break;
        level = j;
        change = cur;
    }
    est.level = level;
    est.value = est.diagonal[level];
    est.last_change = change;
    est.stable = level >= 2;
    return est;
}

}  // namespace fraclab
