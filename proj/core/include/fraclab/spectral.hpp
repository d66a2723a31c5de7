#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fraclab/grid.hpp"

namespace fraclab {

/// Discrete Fourier data under the convention û(ξ) = ∫ e^{-ixξ} u(x) dx.
///
/// coefficients[k] ≈ û(frequencies[k]) (the sum carries the factor h), and
/// `origin`/`spacing` remember the sampled grid so the inverse lands on it.
struct SpectralFunction {
    std::vector<double> frequencies;
    std::vector<Complex> coefficients;
    double origin = 0.0;
    double spacing = 1.0;
};

/// Bin frequencies 2πk/(n h) in FFT order (negative half after n/2).
std::vector<double> dft_frequencies(std::size_t n, double h);

SpectralFunction dft_forward(const SampledFunction& u);
SampledFunction dft_inverse(const SpectralFunction& spectrum);

enum class FftDirection { Forward, Backward };

/// Unnormalized in-place FFT, forward sign e^{-2πi jk/n}. Thread-safe.
void fft_in_place(std::span<Complex> data, FftDirection direction);

}  // namespace fraclab
