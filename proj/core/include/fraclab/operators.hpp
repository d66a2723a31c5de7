#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fraclab/grid.hpp"
#include "fraclab/symbols.hpp"

namespace fraclab {

// ---------------------------------------------------------------------------
// Multiplier form: Op(p)u = F^{-1}(p(ξ) F u)
// ---------------------------------------------------------------------------

struct MultiplierOptions {
    /// The sample is zero-padded to padding·n points before transforming.
    std::size_t padding = 4;
    /// Treat the sample as one period of a periodic function (no padding, no edge check).
    bool periodic = false;
    /// For Riesz symbols: evaluate at padding P and 2P and remove the periodic-image
    /// contribution, which decays like L^{-1-2a} in the box length L.
    bool image_extrapolation = false;
    /// Largest admissible edge magnitude, relative to max|u|.
    double edge_tolerance = 1e-10;
};

/// Applies the symbol on the padded periodic box and returns values on u's grid.
/// Throws InvalidArgument if u has not decayed at the box edge (Riesz with a ≥ 1/2).
SampledFunction apply_multiplier(const SymbolSpec& s, const SampledFunction& u,
                                 const MultiplierOptions& opts = {});

/// Same, for an arbitrary symbol p(ξ).
SampledFunction apply_multiplier(const std::function<Complex(double)>& symbol, const SampledFunction& u,
                                 const MultiplierOptions& opts = {});

// ---------------------------------------------------------------------------
// Singular-integral form: c · PV∫ (u(x) - u(x+y)) |y|^{-1-2a} dy
// evaluated as c · ∫_0^∞ (2u(x) - u(x+y) - u(x-y)) y^{-1-2a} dy.
// ---------------------------------------------------------------------------

struct PvOptions {
    /// Radius of the Taylor-treated neighbourhood, in grid cells.
    double near_cells = 2.0;
    std::size_t gauss_points = 6;
};

struct PvEvaluation {
    std::vector<Complex> values;
    /// Bound on the neglected O(δ^{4-2a}) term of the local expansion (max over points).
    double remainder_bound = 0.0;
    /// Analytic far-field tail c·2u(x)R^{-2a}/(2a) that was added (max over points).
    double tail = 0.0;
};

/// Sampled route: u is extended by zero outside its grid and interpolated by local
/// cubics in between nodes. Throws InvalidArgument at points where u jumps.
PvEvaluation apply_pv_integral(const KernelSpec& k, const SampledFunction& u,
                               std::span<const double> x_eval, const PvOptions& opts = {});

/// A real function known pointwise, vanishing outside [lo, hi], smooth apart from
/// the listed singular points (the support ends are always treated as singular).
struct SupportedFunction {
    std::function<double(double)> f;
    double lo = -1.0;
    double hi = 1.0;
    std::vector<double> singular_points;
};

struct GradedPvOptions {
    std::size_t gauss_points = 16;
    double grading_ratio = 0.15;
    std::size_t grading_levels = 22;
    double max_panel_width = 0.125;
    /// δ = min(near_radius, near_fraction · distance to the nearest singular point).
    double near_radius = 1e-3;
    double near_fraction = 1e-3;
};

/// Exact-function route with hp-graded Gauss–Legendre panels.
std::vector<double> apply_pv_integral(const KernelSpec& k, const SupportedFunction& u,
                                      std::span<const double> x_eval, const GradedPvOptions& opts = {});

/// Vector-valued form used by assembly: `eval(y, out)` writes m function values at y
/// (zero outside [lo, hi]); returns the m unnormalized integrals (constant = 1) at x.
/// If `second_derivative` is given, the local term uses it instead of a difference
/// quotient, which keeps the result accurate for very small δ.
void pv_integral_unnormalized(const std::function<void(double, std::span<double>)>& eval, std::size_t m,
                              double lo, double hi, std::span<const double> singular_points, double a,
                              double x, std::span<double> out, const GradedPvOptions& opts = {},
                              const std::function<void(double, std::span<double>)>& second_derivative = {});

// ---------------------------------------------------------------------------

struct CrossValidationOptions {
    /// Interior evaluation points are those at least this far from the grid ends,
    /// as a fraction of the box length.
    double interior_margin = 0.3;
    std::size_t points = 41;
};

struct CrossValidationReport {
    double a = 0.0;
    double tolerance = 0.0;
    double max_relative_discrepancy = 0.0;
    bool passed = false;
    std::vector<double> x;
    std::vector<double> multiplier;
    std::vector<double> pv;
};

/// Compares the Riesz multiplier (with periodic-image extrapolation) against the PV
/// form on interior points; the discrepancy is relative to max|multiplier|.
CrossValidationReport cross_validate(FractionalOrder a, const SampledFunction& u, double tol,
                                     const CrossValidationOptions& opts = {});

}  // namespace fraclab
