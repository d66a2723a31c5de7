#include "fraclab/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fraclab/error.hpp"
#include "fraclab/operators.hpp"
#include "fraclab/spectral.hpp"

namespace fraclab {

Complex eval_symbol(const SymbolSpec& s, double xi) {
    switch (s.kind) {
        case SymbolKind::Riesz:
            return xi == 0.0 ? Complex(0.0) : Complex(std::pow(std::abs(xi), s.order));
        case SymbolKind::Bessel:
            return std::pow(s.anchor * s.anchor + xi * xi, 0.5 * s.order);
        case SymbolKind::PlusReducer:
            return std::pow(Complex(s.anchor, xi), s.order);
        case SymbolKind::MinusReducer:
            return std::pow(Complex(s.anchor, -xi), s.order);
    }
    return {};
}

double KernelSpec::operator()(double y) const {
    return constant * std::pow(std::abs(y), -1.0 - 2.0 * a.value());
}

namespace {

// |ξ|^{2a} applied to e^{-x²} on a padded box, evaluated at arbitrary points by
// direct summation of the inverse series; the periodic image term is extrapolated away.
std::vector<double> gaussian_multiplier(double a, std::span<const double> probes, double half_width,
                                        std::size_t n, std::size_t padding) {
    const auto at_padding = [&](std::size_t pad) {
        const auto grid = UniformGrid1D::make(-half_width, half_width, n);
        const std::size_t total = n * pad;
        const double h = grid.h;
        std::vector<Complex> data(total);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = grid.x(i);
            data[i] = std::exp(-x * x);
        }
        fft_in_place(data, FftDirection::Forward);
        const auto xi = dft_frequencies(total, h);
        std::vector<double> out;
        for (double x : probes) {
            Complex s{};
            for (std::size_t k = 0; k < total; ++k) {
                if (xi[k] == 0.0) continue;
                s += std::pow(std::abs(xi[k]), 2.0 * a) * data[k] * std::polar(1.0, xi[k] * (x - grid.x_min));
            }
            out.push_back(s.real() / static_cast<double>(total));
        }
        return out;
    };
    const auto coarse = at_padding(padding);
    const auto fine = at_padding(2 * padding);
    const double r = std::pow(2.0, 1.0 + 2.0 * a);
    std::vector<double> out(coarse.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (r * fine[i] - coarse[i]) / (r - 1.0);
    return out;
}

}  // namespace

NormalizationEstimate estimate_normalization(FractionalOrder a, const NormalizationOptions& opts) {
    if (opts.probes.empty()) throw InvalidArgument("estimate_normalization: no probe points");
    const double half_width = 12.0;
    const auto gaussian = [](double y, std::span<double> v) { v[0] = std::exp(-y * y); };

    NormalizationEstimate best;
    best.mismatch = std::numeric_limits<double>::infinity();
    for (std::size_t level = 0; level <= opts.max_refinements; ++level) {
        GradedPvOptions pv_opts;
        pv_opts.gauss_points = 12 + 4 * level;
        pv_opts.grading_levels = 14 + 4 * level;
        pv_opts.max_panel_width = 0.25 / static_cast<double>(1u << level);

        NormalizationEstimate est;
        est.probes = opts.probes;
        est.refinements = level;
        for (double x : opts.probes) {
            double v = 0.0;
            pv_integral_unnormalized(gaussian, 1, -half_width, half_width, {}, a.value(), x, std::span(&v, 1), pv_opts);
            est.pv_unnormalized.push_back(v);
        }
        est.multiplier = gaussian_multiplier(a.value(), opts.probes, half_width, 1024u << level, 8u << level);

        double num = 0.0, den = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < est.probes.size(); ++i) {
            num += est.pv_unnormalized[i] * est.multiplier[i];
            den += est.pv_unnormalized[i] * est.pv_unnormalized[i];
            scale = std::max(scale, std::abs(est.multiplier[i]));
        }
        est.constant = num / den;
        est.mismatch = 0.0;
        for (std::size_t i = 0; i < est.probes.size(); ++i) {
            est.mismatch = std::max(est.mismatch,
                                    std::abs(est.constant * est.pv_unnormalized[i] - est.multiplier[i]) / scale);
        }
        if (est.mismatch < best.mismatch) best = est;
        if (est.mismatch <= opts.tolerance) return est;
    }
    throw ConvergenceError("estimate_normalization: mismatch " + std::to_string(best.mismatch) +
                               " above tolerance at finest refinement",
                           best.constant, best.mismatch);
}

KernelSpec fractional_laplacian_kernel(FractionalOrder a) {
    return KernelSpec{a, estimate_normalization(a).constant};
}

}  // namespace fraclab
