#include "fraclab/spectral.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "fraclab/error.hpp"

namespace fraclab {

namespace {

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

void fft_in_place(std::span<Complex> data, FftDirection direction) {
    if (data.empty()) return;
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(data.size()), ptr, ptr,
                                direction == FftDirection::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
}

std::vector<double> dft_frequencies(std::size_t n, double h) {
    std::vector<double> xi(n);
    const double base = 2.0 * std::numbers::pi / (static_cast<double>(n) * h);
    for (std::size_t k = 0; k < n; ++k) {
        const auto kk = static_cast<long long>(k);
        const long long signed_k = (2 * k < n) ? kk : kk - static_cast<long long>(n);
        xi[k] = base * static_cast<double>(signed_k);
    }
    return xi;
}

SpectralFunction dft_forward(const SampledFunction& u) {
    const auto& g = u.grid();
    SpectralFunction out;
    out.frequencies = dft_frequencies(g.n, g.h);
    out.coefficients.assign(u.values().begin(), u.values().end());
    out.origin = g.x_min;
    out.spacing = g.h;
    fft_in_place(out.coefficients, FftDirection::Forward);
    for (std::size_t k = 0; k < g.n; ++k) {
        // e^{-iξ x_j} = e^{-iξ x_min} e^{-2πi jk/n}
        out.coefficients[k] *= g.h * std::polar(1.0, -out.frequencies[k] * g.x_min);
    }
    return out;
}

SampledFunction dft_inverse(const SpectralFunction& spectrum) {
    const std::size_t n = spectrum.coefficients.size();
    if (n != spectrum.frequencies.size()) {
        throw InvalidArgument("spectrum: coefficient and frequency lengths differ");
    }
    if (n < 8 || !(spectrum.spacing > 0.0)) {
        throw InvalidArgument("spectrum: needs at least 8 bins and positive spacing");
    }
    std::vector<Complex> values(n);
    for (std::size_t k = 0; k < n; ++k) {
        values[k] = spectrum.coefficients[k] * std::polar(1.0, spectrum.frequencies[k] * spectrum.origin);
    }
    fft_in_place(values, FftDirection::Backward);
    const double scale = 1.0 / (static_cast<double>(n) * spectrum.spacing);
    for (auto& v : values) v *= scale;
    const auto grid = UniformGrid1D::make(spectrum.origin,
                                          spectrum.origin + spectrum.spacing * static_cast<double>(n - 1), n);
    return SampledFunction(grid, std::move(values));
}

}  // namespace fraclab
