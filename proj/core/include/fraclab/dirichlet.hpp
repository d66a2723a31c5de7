#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fraclab/grid.hpp"
#include "fraclab/operators.hpp"
#include "fraclab/power_fit.hpp"

namespace fraclab {

// Restricted Dirichlet fractional Laplacian on Ω = (-1, 1), discretized in the
// weighted Jacobi basis ψ_k(x) = (1 - x²)₊^a J_k(x).

/// ψ_k = (1 - x²)₊^a J_k, where J_k is the degree-k Jacobi polynomial with
/// parameters (a, a), scaled to unit norm under the weight (1 - x²)^a.
class WeightedBasis {
public:
    WeightedBasis(FractionalOrder a, std::size_t size);

    FractionalOrder order() const noexcept { return a_; }
    std::size_t size() const noexcept { return scale_.size(); }

    /// J_0(x) .. J_{m-1}(x), m = out.size() ≤ size().
    void polynomials(double x, std::span<double> out) const;
    /// Values and first derivatives of J_k.
    void polynomials_with_derivatives(double x, std::span<double> p, std::span<double> dp) const;
    /// ψ_0(x) .. ψ_{m-1}(x); zero outside (-1, 1).
    void values(double x, std::span<double> out) const;
    /// ψ_k'' at interior x.
    void second_derivatives(double x, std::span<double> out) const;

private:
    FractionalOrder a_;
    std::vector<double> scale_;
};

/// u = Σ c_k ψ_k.
struct BasisExpansion {
    WeightedBasis basis;
    Eigen::VectorXd coefficients;

    /// Σ c_k J_k(x), the smooth factor u / (1 - x²)^a.
    double polynomial(double x) const;
    double operator()(double x) const;
    /// u at distance d ∈ (0, 1] from the endpoint x = +1 (side = +1) or -1 (side = -1),
    /// with the weight computed from d directly.
    double at_distance(double d, int side) const;
    /// u'(x) = (1 - x²)^{a-1} [-2a x p(x) + (1 - x²) p'(x)], interior x.
    double derivative(double x) const;
    /// (1 - x²)^{1-a} u'(x), the smooth factor of the derivative.
    double derivative_factor(double x) const;
    /// γ₀^a u(±1) = lim u / d^a = 2^a p(±1), with d the distance to the endpoint.
    double weighted_boundary_value(int side) const;
    SampledFunction sample(const UniformGrid1D& grid) const;
};

struct AssemblyOptions {
    /// First outer Gauss–Jacobi size; 0 means N + 8. Doubled until converged.
    std::size_t outer_nodes = 0;
    std::size_t max_doublings = 3;
    /// Entry-wise Cauchy tolerance, relative to sqrt(A_jj A_kk).
    double cauchy_tolerance = 1e-8;
    /// Also compute A from the double-integral energy form and compare.
    bool verify_with_form = false;
    double form_tolerance = 1e-6;
    GradedPvOptions pv;
    /// Worker threads for the entry evaluators; 0 means hardware concurrency.
    std::size_t threads = 1;
};

struct AssemblyReport {
    std::size_t outer_nodes = 0;
    double cauchy_difference = 0.0;
    /// max |A_jk - A_kj| / sqrt(A_jj A_kk) before symmetrization.
    double asymmetry = 0.0;
    /// max discrepancy between the two assembly routes (only with verify_with_form).
    std::optional<double> form_discrepancy;
    double kernel_constant = 0.0;
};

struct DirichletSystem {
    WeightedBasis basis;
    /// A_jk = <r+ (-Δ)^a ψ_k, ψ_j>, symmetrized.
    Eigen::MatrixXd stiffness;
    /// M_jk = <ψ_k, ψ_j>.
    Eigen::MatrixXd mass;
    AssemblyReport report;
};

/// Throws InvalidArgument for N outside [1, 200], ConvergenceError if the outer
/// quadrature or the two-route check does not settle.
DirichletSystem assemble(FractionalOrder a, std::size_t N, const AssemblyOptions& opts = {});

/// Energy-form matrix Q0(ψ_k, ψ_j) = (c/2) ∫∫ (ψ_k(x)-ψ_k(y))(ψ_j(x)-ψ_j(y)) |x-y|^{-1-2a},
/// exposed for the assembly self-check.
Eigen::MatrixXd assemble_energy_form(const WeightedBasis& basis, double kernel_constant,
                                     std::size_t gauss_points = 16);

/// (r+ (-Δ)^a u)(x) for u in the basis span, via the singular integral.
std::vector<double> apply_restricted(const BasisExpansion& u, double kernel_constant, std::span<const double> x,
                                     const GradedPvOptions& opts = {});

struct StationarySolution {
    BasisExpansion u;
    /// max over the check points of |r+ (-Δ)^a u - f| / max|f|.
    double residual = 0.0;
    std::vector<double> check_points;
};

struct StationaryOptions {
    /// Check points are spread over [-residual_extent, residual_extent].
    double residual_extent = 0.9;
    std::size_t residual_points = 19;
};

/// Galerkin solution of r+ (-Δ)^a u = f, supp u ⊂ [-1, 1].
StationarySolution solve_stationary(const DirichletSystem& sys, const std::function<double(double)>& f,
                                    const StationaryOptions& opts = {});
/// Same, for f sampled on a grid covering [-1, 1] (linear interpolation).
StationarySolution solve_stationary(const DirichletSystem& sys, const SampledFunction& f,
                                    const StationaryOptions& opts = {});

struct EigenPair {
    double lambda = 0.0;
    Eigen::VectorXd coefficients;
    /// |λ(N) - λ(N_coarse)| / λ(N).
    double refinement_change = 0.0;
    double residual = 0.0;
};

struct EigenSolution {
    std::vector<EigenPair> pairs;
    /// Indices (0-based, ascending order) of requested pairs that failed the refinement test.
    std::vector<std::size_t> unconverged;
    std::size_t coarse_size = 0;
};

struct EigenOptions {
    double refinement_tolerance = 1e-4;
    /// Size difference between the reported and the comparison system.
    std::size_t refinement_step = 20;
};

/// Lowest `count` (≤ N/2) Ritz pairs of (A, M), ascending, unit mass-norm, each
/// checked against the leading (N - refinement_step) block. Unconverged pairs are
/// listed, not returned.
EigenSolution eigen_solve(const DirichletSystem& sys, std::size_t count, const EigenOptions& opts = {});

BasisExpansion expansion(const DirichletSystem& sys, const Eigen::VectorXd& coefficients);

// ---------------------------------------------------------------------------
// Boundary regularity
// ---------------------------------------------------------------------------

struct HolderOptions {
    double eps_max = 1e-1;
    double eps_min = 1e-5;
    std::size_t points = 17;
    /// The detector fires when the log-log slope of the quotient is below -slope_threshold.
    double slope_threshold = 0.02;
};

/// Q(ε) = sup over d ∈ [ε, eps_max] of |g(d)| / d^β, for g vanishing at d = 0.
struct HolderReport {
    double beta = 0.0;
    std::vector<double> eps;
    std::vector<double> quotient;
    double slope = 0.0;
    bool fires = false;
};

HolderReport holder_divergence(const std::function<double(double)>& g, double beta, const HolderOptions& opts = {});

struct BoundaryRegularityOptions {
    FitWindow fit_window{1e-5, 1e-3};
    double delta = 0.1;
    /// Control exponent offset: the detector must stay quiet at a - control_offset.
    double control_offset = 0.05;
    HolderOptions holder;
};

struct BoundaryRegularityReport {
    /// Fits at x = -1 (index 0) and x = +1 (index 1).
    PowerFit fit[2];
    /// Detector at exponent a + delta (must fire) and a - control_offset (must not).
    HolderReport cap[2];
    HolderReport control[2];
    double a = 0.0;
    bool exponent_ok(double tol) const;
    bool cap_fires() const;
    bool control_quiet() const;
};

BoundaryRegularityReport boundary_regularity_probe(const BasisExpansion& u,
                                                   const BoundaryRegularityOptions& opts = {});

// ---------------------------------------------------------------------------
// Integration-by-parts and Green's formula checks
// ---------------------------------------------------------------------------

/// Orientation of ν(±1) in the boundary term.
enum class NormalConvention {
    /// ν(1) = -1, ν(-1) = +1.
    Interior,
    /// ν(1) = +1, ν(-1) = -1.
    Outward,
};

struct IbpPair {
    BasisExpansion u;
    BasisExpansion v;
};

struct IbpPairResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    bool ratio_defined = false;
};

struct IbpReport {
    std::vector<IbpPairResult> pairs;
    double mean_ratio = 0.0;
    /// (max - min) / |mean| over pairs with a defined ratio.
    double spread = 0.0;
};

struct IbpOptions {
    NormalConvention normal = NormalConvention::Interior;
    /// |R| at or below this (relative to the pair's scale) counts as zero.
    double zero_tolerance = 1e-10;
    std::size_t quadrature_nodes = 0;
    GradedPvOptions pv;
};

/// L(u, v) = ∫ ((-Δ)^a u · v' + u' · (-Δ)^a v) dx and
/// R(u, v) = Σ_{±1} ν · γ₀^a u · γ₀^a v for each pair.
/// Throws InvalidArgument if no pair has R ≠ 0.
IbpReport ibp_identity_check(double kernel_constant, std::span<const IbpPair> pairs, const IbpOptions& opts = {});

struct GreensReport {
    double lhs = 0.0;
    double scale = 0.0;
    double relative = 0.0;
    /// max over both functions and ends of |u / d^{a-1}| at d = 1e-8, relative to max|u|.
    double dirichlet_trace = 0.0;
};

/// |∫ (Pu v - u Pv) dx| for u, v in the basis span (zero Dirichlet traces),
/// relative to ‖u‖ ‖v‖ in L2. Throws InvalidArgument if a Dirichlet trace is not zero.
GreensReport greens_reduced_check(double kernel_constant, const BasisExpansion& u, const BasisExpansion& v,
                                  const GradedPvOptions& pv = {});

}  // namespace fraclab
