#pragma once

#include <cstddef>
#include <vector>

#include "fraclab/grid.hpp"

namespace fraclab {

/// Fourier-multiplier families.
///  Riesz        |ξ|^order           (order = 2a)
///  Bessel       (1 + ξ²)^{order/2}  (order = 2a)
///  PlusReducer  (1 + iξ)^order      (order = t), analytic in Im ξ < 0
///  MinusReducer (1 - iξ)^order      (order = t), analytic in Im ξ > 0
enum class SymbolKind { Riesz, Bessel, PlusReducer, MinusReducer };

struct SymbolSpec {
    SymbolKind kind = SymbolKind::Riesz;
    double order = 1.0;
    /// ⟨ξ'⟩; the one-dimensional model has no tangential variable, so this stays 1.
    double anchor = 1.0;

    static SymbolSpec riesz(FractionalOrder a) { return {SymbolKind::Riesz, 2.0 * a.value(), 1.0}; }
    static SymbolSpec bessel(FractionalOrder a) { return {SymbolKind::Bessel, 2.0 * a.value(), 1.0}; }
    static SymbolSpec plus(double t) { return {SymbolKind::PlusReducer, t, 1.0}; }
    static SymbolSpec minus(double t) { return {SymbolKind::MinusReducer, t, 1.0}; }
};

/// Principal-branch evaluation of the symbol at real ξ.
Complex eval_symbol(const SymbolSpec& s, double xi);

/// Homogeneous kernel K(y) = constant · |y|^{-1-2a} of the singular-integral form.
struct KernelSpec {
    FractionalOrder a;
    double constant;

    double operator()(double y) const;
};

struct NormalizationOptions {
    /// Probe points where the two operator forms are compared.
    std::vector<double> probes{0.0, 0.5, 1.0};
    double tolerance = 1e-4;
    std::size_t max_refinements = 4;
};

struct NormalizationEstimate {
    double constant = 0.0;
    /// Largest relative mismatch |c·PV − multiplier| / |multiplier| over the probes.
    double mismatch = 0.0;
    std::size_t refinements = 0;
    std::vector<double> probes;
    std::vector<double> pv_unnormalized;
    std::vector<double> multiplier;
};

/// Least-squares constant c making c·PV∫(u(x)-u(x+y))|y|^{-1-2a}dy agree with the
/// |ξ|^{2a} multiplier on the Gaussian e^{-x²}. Throws ConvergenceError (with the best
/// estimate) if the mismatch stays above tolerance at the finest refinement.
NormalizationEstimate estimate_normalization(FractionalOrder a, const NormalizationOptions& opts = {});

/// Kernel of (-Δ)^a with the estimated constant.
KernelSpec fractional_laplacian_kernel(FractionalOrder a);

}  // namespace fraclab
