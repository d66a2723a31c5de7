#pragma once

#include <cstddef>
#include <functional>

#include "fraclab/grid.hpp"
#include "fraclab/power_fit.hpp"

namespace fraclab {

// Order-reducing operators on the half-line and the model Dirichlet problem
// r+ (1 - d²/dx²)^a u = f on x > 0, u = 0 on x < 0.

enum class ReducerSign { Plus, Minus };
enum class SupportSide { Plus, Free };

/// Sampled function on a grid that has x = 0 as a node.
struct HalfLineFunction {
    SampledFunction sample;
    SupportSide support_side = SupportSide::Free;
    /// Largest |value| on x < 0 tolerated for a Plus-supported function.
    double leak_tol = 0.0;
};

/// Grid with 2^log2_points nodes of spacing 1/cells_per_unit, symmetric about
/// the node x = 0 (which has index 2^(log2_points-1)).
UniformGrid1D half_line_grid(std::size_t log2_points = 21, double cells_per_unit = 32768.0);

/// Index of the node x = 0. Throws if the grid has no node there.
std::size_t origin_index(const UniformGrid1D& grid);

/// Samples f on x ≥ 0 and extends it by zero.
HalfLineFunction sample_half_line(const UniformGrid1D& grid, const std::function<double(double)>& f);

/// Discrete symbol of Ξ±^t on a grid of spacing h. The derivative is replaced by
/// the one-sided second-order difference, so Ξ+ is exactly causal on the grid;
/// as h → 0 the symbol tends to (1 ± iξ)^t.
Complex reducer_symbol(ReducerSign sign, double t, double xi, double h);

struct XiOptions {
    /// Largest admissible edge magnitude, relative to max|u|.
    double edge_tolerance = 1e-10;
    /// Reported leakage above this is flagged.
    double leak_tol = 1e-6;
};

struct XiResult {
    SampledFunction value;
    /// max |value| on the far side (x < -2h for Plus, x > 2h for Minus) over max|u|.
    double leakage = 0.0;
    bool leakage_ok = true;
};

/// Ξ±^t u, |t| ≤ 2. Throws InvalidArgument if u has not decayed at the box edges.
XiResult xi_apply(ReducerSign sign, double t, const SampledFunction& u, const XiOptions& opts = {});

/// r+ Ξ-^t e+ f, returned as a Plus-supported function.
HalfLineFunction xi_minus_truncated(double t, const HalfLineFunction& f, const XiOptions& opts = {});

/// r+ Ξ-^a Ξ+^a u: the discrete model operator r+ (1 - d²/dx²)^a on x ≥ 0.
SampledFunction apply_model_operator(FractionalOrder a, const HalfLineFunction& u);

struct ModelSolution {
    HalfLineFunction u;
    /// max over x ≥ 2h of |r+ P u - f| / max|f|.
    double residual = 0.0;
    /// Leakage of u into x < -2h, relative to max|u|.
    double leakage = 0.0;
};

/// u = Ξ+^{-a} e+ r+ Ξ-^{-a} e+ f.
ModelSolution solve_model_dirichlet(FractionalOrder a, const HalfLineFunction& f,
                                    const XiOptions& opts = {});

struct TransmissionOptions {
    FitWindow fit_window{5e-4, 1e-2};
    /// Boundary fits with residual above this are not of power-law type.
    double max_fit_residual = 0.05;
    /// An exponent above a + regular_gap means there is no x^a component.
    double regular_gap = 0.25;
    /// Largest abscissa of the extrapolation ladder x0 2^{-j}, j = 0..levels-1.
    double x0 = 0.05;
    std::size_t levels = 6;
    /// w below this fraction of the singular part on the fit window counts as zero.
    double negligible = 1e-3;
};

struct TransmissionDecomposition {
    HalfLineFunction w;
    double phi = 0.0;
    FractionalOrder a{0.5};
    /// max |u - (w + x^a phi e^{-x})| / max|u|.
    double residual = 0.0;
    PowerFit boundary_fit;
    /// Exponent of w at 0; +inf when w is negligible, NaN when w has no power-law shape.
    double regular_exponent = 0.0;
    /// max|w| over max|x^a phi e^{-x}| on the fit window (0 when phi = 0).
    double regular_relative_size = 0.0;
    double phi_change = 0.0;
};

/// Splits u = w + x+^a phi e^{-x} with w more regular than x^a at 0.
/// Throws InvalidArgument if u is not of power-law type at 0, ConvergenceError if
/// the limit of u/x^a does not settle.
TransmissionDecomposition decompose_transmission(const HalfLineFunction& u, FractionalOrder a,
                                                 const TransmissionOptions& opts = {});

struct TraceValues {
    int order_shift = 0;
    int k = 0;
    Complex value;
    /// Change between the accepted Richardson level and the one before.
    double change = 0.0;
};

struct TraceOptions {
    double x0 = 0.05;
    std::size_t levels = 7;
};

/// M = 1: Γ(a + k) ∂^k (u / x^{a-1})(0+).  M = 0: ∂^k (u / x^a)(0+), unnormalized.
/// k ∈ {0, 1}. Throws ConvergenceError if the extrapolation is unstable.
TraceValues weighted_trace(const HalfLineFunction& u, FractionalOrder a, int M, int k,
                           const TraceOptions& opts = {});

}  // namespace fraclab
