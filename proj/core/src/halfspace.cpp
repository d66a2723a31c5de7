#include "fraclab/halfspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fraclab/error.hpp"
#include "fraclab/special.hpp"
#include "fraclab/spectral.hpp"

namespace fraclab {

namespace {

constexpr std::size_t kCollarNodes = 2;

double edge_magnitude(std::span<const Complex> v, double scale) {
    if (scale == 0.0) return 0.0;
    const std::size_t n = v.size();
    double m = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        m = std::max({m, std::abs(v[i]), std::abs(v[n - 1 - i])});
    }
    return m / scale;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Multiplies the periodic sample by a product of reducer symbols.
std::vector<Complex> apply_symbols(std::span<const Complex> values, double h,
                                   std::initializer_list<std::pair<ReducerSign, double>> factors) {
    std::vector<Complex> data(values.begin(), values.end());
    fft_in_place(data, FftDirection::Forward);
    const auto xi = dft_frequencies(data.size(), h);
    const double inv_n = 1.0 / static_cast<double>(data.size());
    for (std::size_t k = 0; k < data.size(); ++k) {
        Complex s = inv_n;
        for (const auto& [sign, t] : factors) s *= reducer_symbol(sign, t, xi[k], h);
        data[k] *= s;
    }
    fft_in_place(data, FftDirection::Backward);
    return data;
}

void check_half_line(const HalfLineFunction& f, const char* who) {
    const auto& g = f.sample.grid();
    origin_index(g);
    const double edge = edge_magnitude(f.sample.values(), f.sample.max_abs());
    if (edge > 1e-10) {
        throw InvalidArgument(std::string(who) + ": insufficient decay at box edge, relative magnitude " +
                              std::to_string(edge));
    }
}

// e+ f with the node at 0 carrying the given fraction of f(0).
std::vector<Complex> extend_by_zero(const HalfLineFunction& f, double origin_weight) {
    const std::size_t i0 = origin_index(f.sample.grid());
    std::vector<Complex> v(f.sample.values().begin(), f.sample.values().end());
    std::fill(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(i0), Complex(0.0));
    v[i0] *= origin_weight;
    return v;
}

double relative_leakage(std::span<const Complex> out, std::size_t i0, ReducerSign sign, double scale) {
    if (scale == 0.0) return 0.0;
    double m = 0.0;
    if (sign == ReducerSign::Plus) {
        for (std::size_t i = 0; i + kCollarNodes < i0; ++i) m = std::max(m, std::abs(out[i]));
    } else {
        for (std::size_t i = i0 + kCollarNodes + 1; i < out.size(); ++i) m = std::max(m, std::abs(out[i]));
    }
    return m / scale;
}

// Samples of v(x_j) = u(x_j) / x_j^p on the ladder x_j = x0 2^{-j}.
std::vector<Complex> ladder(const HalfLineFunction& u, double power, double x0, std::size_t levels) {
    const auto& g = u.sample.grid();
    const std::size_t i0 = origin_index(g);
    const std::size_t step0 = static_cast<std::size_t>(std::llround(x0 / g.h));
    const std::size_t unit = std::size_t{1} << (levels - 1);
    const std::size_t top = std::max<std::size_t>(unit, step0 / unit * unit);
    if (i0 + top >= g.n) throw InvalidArgument("extrapolation ladder leaves the grid");
    std::vector<Complex> out(levels);
    for (std::size_t j = 0; j < levels; ++j) {
        const std::size_t i = i0 + (top >> j);
        out[j] = u.sample[i] / std::pow(g.x(i) - g.x(i0), power);
    }
    return out;
}

struct ComplexLimit {
    Complex value;
    double change = 0.0;
    bool stable = false;
};

ComplexLimit complex_limit(const std::vector<Complex>& v) {
    std::vector<double> re(v.size()), im(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        re[i] = v[i].real();
        im[i] = v[i].imag();
    }
    const auto lr = extrapolate_limit(re);
    double scale_re = 0.0, scale_im = 0.0;
    for (double x : re) scale_re = std::max(scale_re, std::abs(x));
    for (double x : im) scale_im = std::max(scale_im, std::abs(x));
    ComplexLimit out;
    // Rounding-level imaginary parts (from the FFT) carry no limit to extrapolate.
    if (scale_im <= 1e-12 * scale_re) {
        out.value = lr.value;
        out.change = lr.last_change;
        out.stable = lr.stable;
        return out;
    }
    const auto li = extrapolate_limit(im);
    out.value = Complex(lr.value, li.value);
    out.change = std::hypot(lr.last_change, li.last_change);
    out.stable = lr.stable && li.stable;
    return out;
}

}  // namespace

UniformGrid1D half_line_grid(std::size_t log2_points, double cells_per_unit) {
    if (log2_points < 4 || log2_points > 28 || !(cells_per_unit > 0.0)) {
        throw InvalidArgument("half_line_grid: need 4 ≤ log2_points ≤ 28 and a positive resolution");
    }
    const std::size_t n = std::size_t{1} << log2_points;
    const double h = 1.0 / cells_per_unit;
    return UniformGrid1D::periodic(-static_cast<double>(n / 2) * h, static_cast<double>(n) * h, n);
}

std::size_t origin_index(const UniformGrid1D& grid) {
    const double r = -grid.x_min / grid.h;
    const double k = std::round(r);
    if (k < 0.0 || k >= static_cast<double>(grid.n) || std::abs(r - k) > 1e-9 * std::max(1.0, r)) {
        throw InvalidArgument("grid has no node at x = 0");
    }
    return static_cast<std::size_t>(k);
}

HalfLineFunction sample_half_line(const UniformGrid1D& grid, const std::function<double(double)>& f) {
    const std::size_t i0 = origin_index(grid);
    std::vector<Complex> v(grid.n, Complex(0.0));
    for (std::size_t i = i0; i < grid.n; ++i) v[i] = f(static_cast<double>(i - i0) * grid.h);
    return {SampledFunction(grid, std::move(v)), SupportSide::Plus, 0.0};
}

Complex reducer_symbol(ReducerSign sign, double t, double xi, double h) {
    const Complex z = std::polar(1.0, -xi * h);
    Complex d = (3.0 - 4.0 * z + z * z) / (2.0 * h);
    if (sign == ReducerSign::Minus) d = std::conj(d);
    // Re(1 + d) ≥ 1, so the principal power is the analytic branch.
    return std::pow(1.0 + d, t);
}

XiResult xi_apply(ReducerSign sign, double t, const SampledFunction& u, const XiOptions& opts) {
    if (!(std::abs(t) <= 2.0)) throw InvalidArgument("xi_apply: |t| must not exceed 2");
    const auto& g = u.grid();
    if (!is_power_of_two(g.n)) throw InvalidArgument("xi_apply: grid size must be a power of two");
    const std::size_t i0 = origin_index(g);
    const double scale = u.max_abs();
    const double edge = edge_magnitude(u.values(), scale);
    if (edge > opts.edge_tolerance) {
        throw InvalidArgument("xi_apply: insufficient decay at box edge, relative magnitude " +
                              std::to_string(edge));
    }
    auto out = t == 0.0 ? std::vector<Complex>(u.values().begin(), u.values().end())
                        : apply_symbols(u.values(), g.h, {{sign, t}});
    const double leak = relative_leakage(out, i0, sign, scale);
    return {SampledFunction(g, std::move(out)), leak, leak <= opts.leak_tol};
}

HalfLineFunction xi_minus_truncated(double t, const HalfLineFunction& f, const XiOptions& opts) {
    check_half_line(f, "xi_minus_truncated");
    // Ξ- is anti-causal: its values on x ≥ 0 only see f on x ≥ 0, node 0 included.
    const SampledFunction ext(f.sample.grid(), extend_by_zero(f, 1.0));
    auto r = xi_apply(ReducerSign::Minus, t, ext, opts);
    HalfLineFunction g{std::move(r.value), SupportSide::Plus, 0.0};
    std::vector<Complex> v(g.sample.values().begin(), g.sample.values().end());
    const std::size_t i0 = origin_index(g.sample.grid());
    std::fill(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(i0), Complex(0.0));
    g.sample = SampledFunction(g.sample.grid(), std::move(v));
    return g;
}

SampledFunction apply_model_operator(FractionalOrder a, const HalfLineFunction& u) {
    check_half_line(u, "apply_model_operator");
    const auto& g = u.sample.grid();
    const double s = a.value();
    auto v = apply_symbols(extend_by_zero(u, 1.0), g.h, {{ReducerSign::Minus, s}, {ReducerSign::Plus, s}});
    const std::size_t i0 = origin_index(g);
    std::fill(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(i0), Complex(0.0));
    return SampledFunction(g, std::move(v));
}

ModelSolution solve_model_dirichlet(FractionalOrder a, const HalfLineFunction& f, const XiOptions& opts) {
    check_half_line(f, "solve_model_dirichlet");
    const auto& grid = f.sample.grid();
    const std::size_t i0 = origin_index(grid);
    const double s = a.value();

    const HalfLineFunction g = xi_minus_truncated(-s, f, opts);
    // e+ g jumps at 0; the jump node enters the causal sum with half weight
    // (trapezoidal convention), which removes the O(h/x) error near the boundary.
    const SampledFunction eg(grid, extend_by_zero(g, 0.5));
    auto r = xi_apply(ReducerSign::Plus, -s, eg, opts);

    ModelSolution sol{{std::move(r.value), SupportSide::Plus, 0.0}, 0.0, r.leakage};
    sol.u.leak_tol = opts.leak_tol * std::max(sol.u.sample.max_abs(), 1e-300);

    const double fmax = f.sample.max_abs();
    if (fmax > 0.0) {
        const auto pu = apply_model_operator(a, sol.u);
        double res = 0.0;
        for (std::size_t i = i0 + kCollarNodes; i < grid.n; ++i) {
            res = std::max(res, std::abs(pu[i] - f.sample[i]));
        }
        sol.residual = res / fmax;
    }
    return sol;
}

TransmissionDecomposition decompose_transmission(const HalfLineFunction& u, FractionalOrder a,
                                                 const TransmissionOptions& opts) {
    const auto& grid = u.sample.grid();
    const std::size_t i0 = origin_index(grid);
    const double s = a.value();

    std::vector<Complex> w(u.sample.values().begin(), u.sample.values().end());
    TransmissionDecomposition d{{SampledFunction(grid, w), u.support_side, u.leak_tol}, 0.0, a, 0.0, PowerFit{}};
    d.boundary_fit = fit_power_law(u.sample, 0.0, opts.fit_window, Side::Right);
    if (d.boundary_fit.residual > opts.max_fit_residual) {
        throw InvalidArgument("decompose_transmission: boundary behaviour is not of power-law type (residual " +
                              std::to_string(d.boundary_fit.residual) + ")");
    }
    if (d.boundary_fit.exponent < s - opts.regular_gap) {
        throw InvalidArgument("decompose_transmission: u is more singular than x^a at 0");
    }
    if (d.boundary_fit.exponent <= s + opts.regular_gap) {
        const auto v = ladder(u, s, opts.x0, opts.levels);
        const auto lim = complex_limit(v);
        if (!lim.stable) {
            throw ConvergenceError("decompose_transmission: u/x^a does not settle at 0", lim.value.real(),
                                   lim.change);
        }
        d.phi = lim.value.real();
        d.phi_change = lim.change;
    }

    for (std::size_t i = i0 + 1; i < grid.n; ++i) {
        const double x = grid.x(i) - grid.x(i0);
        w[i] -= d.phi * std::pow(x, s) * std::exp(-x);
    }
    d.w = {SampledFunction(grid, std::move(w)), u.support_side, u.leak_tol};

    double umax = u.sample.max_abs();
    double rec = 0.0;
    for (std::size_t i = i0 + 1; i < grid.n; ++i) {
        const double x = grid.x(i) - grid.x(i0);
        rec = std::max(rec, std::abs(d.w.sample[i] + d.phi * std::pow(x, s) * std::exp(-x) - u.sample[i]));
    }
    d.residual = umax > 0.0 ? rec / umax : 0.0;

    // Size of w against the singular part on the fit window.
    double wmax = 0.0, smax = 0.0;
    for (std::size_t i = i0 + 1; i < grid.n; ++i) {
        const double x = grid.x(i) - grid.x(i0);
        if (x < opts.fit_window.lo || x > opts.fit_window.hi) continue;
        wmax = std::max(wmax, std::abs(d.w.sample[i]));
        smax = std::max(smax, std::abs(d.phi) * std::pow(x, s) * std::exp(-x));
    }
    d.regular_relative_size = smax > 0.0 ? wmax / smax : 0.0;
    if (d.phi == 0.0) {
        d.regular_exponent = d.boundary_fit.exponent;
    } else if (d.regular_relative_size <= opts.negligible) {
        d.regular_exponent = std::numeric_limits<double>::infinity();
    } else {
        try {
            const auto fw = fit_power_law(d.w.sample, 0.0, opts.fit_window, Side::Right);
            d.regular_exponent = fw.residual > opts.max_fit_residual ? std::numeric_limits<double>::quiet_NaN()
                                                                      : fw.exponent;
        } catch (const InvalidArgument&) {
            d.regular_exponent = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return d;
}

TraceValues weighted_trace(const HalfLineFunction& u, FractionalOrder a, int M, int k, const TraceOptions& opts) {
    if (M != 0 && M != 1) throw InvalidArgument("weighted_trace: M must be 0 or 1");
    if (k != 0 && k != 1) throw InvalidArgument("weighted_trace: k must be 0 or 1");
    if (opts.levels < 4) throw InvalidArgument("weighted_trace: need at least 4 levels");
    const double p = a.value() - M;
    const auto v = ladder(u, p, opts.x0, opts.levels);

    std::vector<Complex> samples;
    if (k == 0) {
        samples = v;
    } else {
        // (v(2x) - v(x)) / x at x = x_j, j ≥ 1, where x_{j-1} = 2 x_j.
        const auto& g = u.sample.grid();
        const std::size_t unit = std::size_t{1} << (opts.levels - 1);
        const std::size_t step0 = static_cast<std::size_t>(std::llround(opts.x0 / g.h));
        const double top = static_cast<double>(std::max<std::size_t>(unit, step0 / unit * unit)) * g.h;
        for (std::size_t j = 1; j < v.size(); ++j) {
            const double xj = top / static_cast<double>(std::size_t{1} << j);
            samples.push_back((v[j - 1] - v[j]) / xj);
        }
    }
    const auto lim = complex_limit(samples);
    if (!lim.stable) {
        throw ConvergenceError("weighted_trace: extrapolation did not settle", lim.value.real(), lim.change);
    }
    TraceValues tv;
    tv.order_shift = M;
    tv.k = k;
    tv.value = M == 1 ? gamma_fn(a.value() + k) * lim.value : lim.value;
    tv.change = lim.change;
    return tv;
}

}  // namespace fraclab
