#include "fraclab/operators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "fraclab/error.hpp"
#include "fraclab/quadrature.hpp"
#include "fraclab/spectral.hpp"

namespace fraclab {

namespace {

std::vector<Complex> padded_apply(const std::function<Complex(double)>& symbol, const SampledFunction& u,
                                  std::size_t padding) {
    const auto& g = u.grid();
    const std::size_t total = g.n * padding;
    std::vector<Complex> data(total);
    std::copy(u.values().begin(), u.values().end(), data.begin());
    fft_in_place(data, FftDirection::Forward);
    const auto xi = dft_frequencies(total, g.h);
    const double scale = 1.0 / static_cast<double>(total);
    for (std::size_t k = 0; k < total; ++k) data[k] *= symbol(xi[k]) * scale;
    fft_in_place(data, FftDirection::Backward);
    data.resize(g.n);
    return data;
}

double edge_magnitude(const SampledFunction& u) {
    const double m = u.max_abs();
    if (m == 0.0) return 0.0;
    return std::max(std::abs(u[0]), std::abs(u[u.size() - 1])) / m;
}

// Local cubic interpolant of the samples, zero outside the grid.
class Interpolant {
public:
    explicit Interpolant(const SampledFunction& u) : u_(u), g_(u.grid()) {}

    Complex operator()(double x) const {
        if (x < g_.x_min || x > g_.x_max) return {};
        const double s = (x - g_.x_min) / g_.h;
        auto i = static_cast<std::ptrdiff_t>(std::floor(s));
        const auto n = static_cast<std::ptrdiff_t>(g_.n);
        std::ptrdiff_t first = std::clamp<std::ptrdiff_t>(i - 1, 0, n - 4);
        const double t = s - static_cast<double>(first);
        // Lagrange basis on nodes first..first+3 (local coordinates 0..3)
        const double l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
        const double l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
        const double l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
        const double l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
        const auto f = static_cast<std::size_t>(first);
        return l0 * u_[f] + l1 * u_[f + 1] + l2 * u_[f + 2] + l3 * u_[f + 3];
    }

private:
    const SampledFunction& u_;
    const UniformGrid1D& g_;
};

void reject_jumps_near(const SampledFunction& u, double x, double radius) {
    const auto& g = u.grid();
    const double scale = u.max_abs();
    if (scale == 0.0) return;
    const auto n = static_cast<std::ptrdiff_t>(g.n);
    const auto centre = static_cast<std::ptrdiff_t>(g.nearest_index(x));
    const auto reach = static_cast<std::ptrdiff_t>(std::ceil(radius / g.h)) + 2;
    for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(1, centre - reach);
         j <= std::min<std::ptrdiff_t>(n - 3, centre + reach); ++j) {
        const auto uj = static_cast<std::size_t>(j);
        const double d = std::abs(u[uj + 1] - u[uj]);
        const double left = std::abs(u[uj] - u[uj - 1]);
        const double right = std::abs(u[uj + 2] - u[uj + 1]);
        if (d > 1e-3 * scale && d > 10.0 * std::max(left, right)) {
            throw InvalidArgument("apply_pv_integral: sample jumps near x = " + std::to_string(x));
        }
    }
}

}  // namespace

SampledFunction apply_multiplier(const std::function<Complex(double)>& symbol, const SampledFunction& u,
                                 const MultiplierOptions& opts) {
    if (opts.periodic) {
        return SampledFunction(u.grid(), padded_apply(symbol, u, 1));
    }
    if (opts.padding < 1) {
        throw InvalidArgument("apply_multiplier: padding must be at least 1");
    }
    return SampledFunction(u.grid(), padded_apply(symbol, u, opts.padding));
}

SampledFunction apply_multiplier(const SymbolSpec& s, const SampledFunction& u, const MultiplierOptions& opts) {
    const auto symbol = [s](double xi) { return eval_symbol(s, xi); };
    if (opts.periodic) {
        return apply_multiplier(symbol, u, opts);
    }
    if (s.kind == SymbolKind::Riesz && s.order >= 1.0) {
        const double edge = edge_magnitude(u);
        if (edge > opts.edge_tolerance) {
            throw InvalidArgument("apply_multiplier: insufficient decay at box edge, relative magnitude " +
                                  std::to_string(edge));
        }
    }
    if (!(opts.image_extrapolation && s.kind == SymbolKind::Riesz)) {
        return apply_multiplier(symbol, u, opts);
    }
    const auto coarse = padded_apply(symbol, u, opts.padding);
    const auto fine = padded_apply(symbol, u, 2 * opts.padding);
    // image sum ~ L^{-1-2a}
    const double r = std::pow(2.0, 1.0 + s.order);
    std::vector<Complex> out(coarse.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (r * fine[i] - coarse[i]) / (r - 1.0);
    return SampledFunction(u.grid(), std::move(out));
}

PvEvaluation apply_pv_integral(const KernelSpec& k, const SampledFunction& u, std::span<const double> x_eval,
                               const PvOptions& opts) {
    const auto& g = u.grid();
    const double a = k.a.value();
    const double delta = opts.near_cells * g.h;
    const Interpolant U(u);
    const QuadratureRule rule = gauss_legendre(opts.gauss_points);

    PvEvaluation out;
    out.values.resize(x_eval.size());
    std::vector<double> cuts;
    for (std::size_t p = 0; p < x_eval.size(); ++p) {
        const double x = x_eval[p];
        if (!g.contains(x)) {
            throw InvalidArgument("apply_pv_integral: evaluation point outside the grid");
        }
        reject_jumps_near(u, x, delta);
        const Complex u0 = U(x);

        const Complex d2 = (U(x + g.h) + U(x - g.h) - 2.0 * u0) / (g.h * g.h);
        const Complex d4 = (U(x + 2 * g.h) - 4.0 * U(x + g.h) + 6.0 * u0 - 4.0 * U(x - g.h) + U(x - 2 * g.h)) /
                           std::pow(g.h, 4);
        Complex total = -d2 * std::pow(delta, 2.0 - 2.0 * a) / (2.0 - 2.0 * a);
        const double remainder = std::abs(d4) * (std::pow(delta, 4.0 - 2.0 * a) / (12.0 * (4.0 - 2.0 * a)) +
                                                 g.h * g.h / 12.0 * std::pow(delta, 2.0 - 2.0 * a) / (2.0 - 2.0 * a));

        const double reach = std::max(g.x_max - x, x - g.x_min);
        cuts.clear();
        for (double y = delta; y < reach; y += g.h) cuts.push_back(y);
        cuts.push_back(reach);
        for (double edge : {g.x_max - x, x - g.x_min}) {
            if (edge > delta) cuts.push_back(edge);
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end(),
                               [&](double l, double r) { return std::abs(l - r) < 1e-12 * g.h; }),
                   cuts.end());
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            const double lo = cuts[c];
            const double hi = cuts[c + 1];
            const double mid = 0.5 * (lo + hi);
            const double half = 0.5 * (hi - lo);
            Complex s{};
            for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                const double y = mid + half * rule.nodes[q];
                s += rule.weights[q] * (2.0 * u0 - U(x + y) - U(x - y)) * std::pow(y, -1.0 - 2.0 * a);
            }
            total += half * s;
        }
        const Complex tail = 2.0 * u0 * std::pow(reach, -2.0 * a) / (2.0 * a);
        total += tail;
        out.values[p] = k.constant * total;
        out.remainder_bound = std::max(out.remainder_bound, k.constant * remainder);
        out.tail = std::max(out.tail, k.constant * std::abs(tail));
    }
    return out;
}

void pv_integral_unnormalized(const std::function<void(double, std::span<double>)>& eval, std::size_t m,
                              double lo, double hi, std::span<const double> singular_points, double a, double x,
                              std::span<double> out, const GradedPvOptions& opts,
                              const std::function<void(double, std::span<double>)>& second_derivative) {
    if (out.size() != m) throw InvalidArgument("pv_integral_unnormalized: output size mismatch");
    std::vector<double> sing{lo, hi};
    sing.insert(sing.end(), singular_points.begin(), singular_points.end());
    double dist = std::numeric_limits<double>::infinity();
    for (double s : sing) dist = std::min(dist, std::abs(x - s));
    if (!(dist > 0.0)) {
        throw InvalidArgument("apply_pv_integral: evaluation at a singular point");
    }
    const double delta = std::min(opts.near_radius, opts.near_fraction * dist);
    const QuadratureRule rule = gauss_legendre(opts.gauss_points);

    std::vector<double> u0(m), up(m), um(m);
    eval(x, u0);
    const double near_w = std::pow(delta, 2.0 - 2.0 * a) / (2.0 - 2.0 * a);
    if (second_derivative) {
        second_derivative(x, up);
        for (std::size_t i = 0; i < m; ++i) out[i] = -up[i] * near_w;
    } else {
        eval(x + delta, up);
        eval(x - delta, um);
        for (std::size_t i = 0; i < m; ++i) out[i] = -(up[i] + um[i] - 2.0 * u0[i]) / (delta * delta) * near_w;
    }

    const double reach = std::max(hi - x, x - lo);
    std::vector<double> breaks;
    for (double s : sing) {
        const double d = std::abs(x - s);
        if (d > delta && d <= reach) breaks.push_back(d);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    std::vector<Panel> panels;
    {
        const double b0 = breaks.front();
        const double mid = 0.5 * b0;
        auto first = doubling_panels(delta, mid, opts.max_panel_width);
        panels.insert(panels.end(), first.begin(), first.end());
        auto second = graded_panels(mid, b0, false, true, opts.grading_ratio, opts.grading_levels,
                                    opts.max_panel_width);
        panels.insert(panels.end(), second.begin(), second.end());
    }
    for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
        auto p = graded_panels(breaks[b], breaks[b + 1], true, true, opts.grading_ratio, opts.grading_levels,
                               opts.max_panel_width);
        panels.insert(panels.end(), p.begin(), p.end());
    }

    for (const Panel& p : panels) {
        const double mid = 0.5 * (p.lo + p.hi);
        const double half = 0.5 * (p.hi - p.lo);
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double y = mid + half * rule.nodes[q];
            const double w = half * rule.weights[q] * std::pow(y, -1.0 - 2.0 * a);
            eval(x + y, up);
            eval(x - y, um);
            for (std::size_t i = 0; i < m; ++i) out[i] += w * (2.0 * u0[i] - up[i] - um[i]);
        }
    }
    const double tail = 2.0 * std::pow(reach, -2.0 * a) / (2.0 * a);
    for (std::size_t i = 0; i < m; ++i) out[i] += tail * u0[i];
}

std::vector<double> apply_pv_integral(const KernelSpec& k, const SupportedFunction& u,
                                      std::span<const double> x_eval, const GradedPvOptions& opts) {
    const auto eval = [&u](double y, std::span<double> v) {
        v[0] = (y < u.lo || y > u.hi) ? 0.0 : u.f(y);
    };
    std::vector<double> out(x_eval.size());
    std::array<double, 1> buf{};
    for (std::size_t p = 0; p < x_eval.size(); ++p) {
        pv_integral_unnormalized(eval, 1, u.lo, u.hi, u.singular_points, k.a.value(), x_eval[p], buf, opts);
        out[p] = k.constant * buf[0];
    }
    return out;
}

CrossValidationReport cross_validate(FractionalOrder a, const SampledFunction& u, double tol,
                                     const CrossValidationOptions& opts) {
    const auto& g = u.grid();
    const KernelSpec kernel = fractional_laplacian_kernel(a);

    MultiplierOptions mopts;
    mopts.padding = 8;
    mopts.image_extrapolation = true;
    const SampledFunction mult = apply_multiplier(SymbolSpec::riesz(a), u, mopts);

    const double length = g.x_max - g.x_min;
    const double lo = g.x_min + opts.interior_margin * length;
    const double hi = g.x_max - opts.interior_margin * length;
    std::vector<std::size_t> nodes;
    for (std::size_t i = 0; i < opts.points; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(opts.points - 1);
        const std::size_t idx = g.nearest_index(x);
        if (nodes.empty() || nodes.back() != idx) nodes.push_back(idx);
    }
    CrossValidationReport report;
    report.a = a.value();
    report.tolerance = tol;
    for (std::size_t idx : nodes) report.x.push_back(g.x(idx));
    const PvEvaluation pv = apply_pv_integral(kernel, u, report.x);

    double scale = 0.0;
    for (std::size_t idx : nodes) scale = std::max(scale, std::abs(mult[idx]));
    for (std::size_t p = 0; p < nodes.size(); ++p) {
        report.multiplier.push_back(mult[nodes[p]].real());
        report.pv.push_back(pv.values[p].real());
        const double diff = std::abs(mult[nodes[p]] - pv.values[p]);
        report.max_relative_discrepancy = std::max(report.max_relative_discrepancy, scale > 0.0 ? diff / scale : diff);
    }
    report.passed = report.max_relative_discrepancy <= tol;
    return report;
}

}  // namespace fraclab
