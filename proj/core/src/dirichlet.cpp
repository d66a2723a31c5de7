#include "fraclab/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include "fraclab/error.hpp"
#include "fraclab/jacobi.hpp"
#include "fraclab/quadrature.hpp"
#include "fraclab/symbols.hpp"

namespace fraclab {

namespace {

constexpr std::size_t kMaxBasisSize = 200;

// Runs body(i) for i in [0, n) on up to `threads` workers, contiguous blocks.
template <class F>
void parallel_for(std::size_t n, std::size_t threads, const F& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::jthread> pool;
    const std::size_t block = (n + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t lo = t * block;
        const std::size_t hi = std::min(n, lo + block);
        pool.emplace_back([&body, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
}

double relative_entry_gap(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Eigen::MatrixXd& ref) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < x.rows(); ++j) {
        for (Eigen::Index k = 0; k < x.cols(); ++k) {
            const double scale = std::sqrt(std::abs(ref(j, j) * ref(k, k)));
            worst = std::max(worst, std::abs(x(j, k) - y(j, k)) / scale);
        }
    }
    return worst;
}

// Stiffness via <r+ P ψ_k, ψ_j> with a Q-point Gauss–Jacobi (a, a) outer rule.
Eigen::MatrixXd stiffness_from_pv(const WeightedBasis& basis, double constant, std::size_t q,
                                  const AssemblyOptions& opts) {
    const std::size_t n = basis.size();
    const double a = basis.order().value();
    const QuadratureRule rule = gauss_jacobi(q, a, a);
    Eigen::MatrixXd pv(q, n), poly(q, n);
    const auto eval = [&basis](double y, std::span<double> out) { basis.values(y, out); };
    const auto d2 = [&basis](double y, std::span<double> out) { basis.second_derivatives(y, out); };
    parallel_for(q, opts.threads, [&](std::size_t i) {
        std::vector<double> row(n);
        pv_integral_unnormalized(eval, n, -1.0, 1.0, {}, a, rule.nodes[i], row, opts.pv, d2);
        for (std::size_t k = 0; k < n; ++k) pv(i, k) = row[k];
        basis.polynomials(rule.nodes[i], row);
        for (std::size_t k = 0; k < n; ++k) poly(i, k) = row[k];
    });
    const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), static_cast<Eigen::Index>(q));
    return constant * (poly.transpose() * w.asDiagonal() * pv);
}

Eigen::MatrixXd mass_matrix(const WeightedBasis& basis) {
    const std::size_t n = basis.size();
    const double a = basis.order().value();
    const QuadratureRule rule = gauss_jacobi(n + 2, 2.0 * a, 2.0 * a);
    Eigen::MatrixXd poly(rule.nodes.size(), n);
    std::vector<double> row(n);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        basis.polynomials(rule.nodes[i], row);
        for (std::size_t k = 0; k < n; ++k) poly(i, k) = row[k];
    }
    const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), static_cast<Eigen::Index>(rule.nodes.size()));
    Eigen::MatrixXd m = poly.transpose() * w.asDiagonal() * poly;
    return 0.5 * (m + m.transpose());
}

double interpolate_linear(const SampledFunction& f, double x) {
    const auto& g = f.grid();
    const double r = (x - g.x_min) / g.h;
    const std::size_t i = std::min<std::size_t>(g.n - 2, static_cast<std::size_t>(std::max(0.0, std::floor(r))));
    const double t = r - static_cast<double>(i);
    return (1.0 - t) * f[i].real() + t * f[i + 1].real();
}

double l2_norm(const BasisExpansion& u) {
    const double a = u.basis.order().value();
    const QuadratureRule rule = gauss_jacobi(u.basis.size() + 2, 2.0 * a, 2.0 * a);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double p = u.polynomial(rule.nodes[q]);
        s += rule.weights[q] * p * p;
    }
    return std::sqrt(s);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Basis
// ---------------------------------------------------------------------------

WeightedBasis::WeightedBasis(FractionalOrder a, std::size_t size) : a_(a), scale_(size) {
    if (size == 0) throw InvalidArgument("WeightedBasis: size must be positive");
    for (std::size_t k = 0; k < size; ++k) {
        scale_[k] = 1.0 / std::sqrt(jacobi_norm_squared(k, a.value(), a.value()));
    }
}

void WeightedBasis::polynomials(double x, std::span<double> out) const {
    if (out.size() > size()) throw InvalidArgument("WeightedBasis: more polynomials than basis size");
    jacobi_values(x, a_.value(), a_.value(), out);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] *= scale_[k];
}

void WeightedBasis::polynomials_with_derivatives(double x, std::span<double> p, std::span<double> dp) const {
    if (p.size() > size()) throw InvalidArgument("WeightedBasis: more polynomials than basis size");
    jacobi_values_and_derivatives(x, a_.value(), a_.value(), p, dp);
    for (std::size_t k = 0; k < p.size(); ++k) {
        p[k] *= scale_[k];
        dp[k] *= scale_[k];
    }
}

void WeightedBasis::values(double x, std::span<double> out) const {
    const double w = (1.0 - x) * (1.0 + x);
    if (!(w > 0.0)) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    polynomials(x, out);
    const double wa = std::pow(w, a_.value());
    for (double& v : out) v *= wa;
}

void WeightedBasis::second_derivatives(double x, std::span<double> out) const {
    const std::size_t m = out.size();
    const double a = a_.value();
    const double w = (1.0 - x) * (1.0 + x);
    if (!(w > 0.0)) throw InvalidArgument("WeightedBasis: second derivative outside (-1, 1)");
    std::vector<double> p(m), dp(m), ddp(m, 0.0);
    polynomials_with_derivatives(x, p, dp);
    // J_k'' = (k + 2a + 1)(k + 2a + 2)/4 · P_{k-2}^{(a+2, a+2)}
    if (m > 2) {
        std::vector<double> shifted(m - 2);
        jacobi_values(x, a + 2.0, a + 2.0, shifted);
        for (std::size_t k = 2; k < m; ++k) {
            const double kk = static_cast<double>(k);
            ddp[k] = 0.25 * (kk + 2.0 * a + 1.0) * (kk + 2.0 * a + 2.0) * shifted[k - 2] * scale_[k];
        }
    }
    const double wa = std::pow(w, a);
    const double d1 = -2.0 * a * x * wa / w;
    const double d2 = -2.0 * a * wa / w + 4.0 * a * (a - 1.0) * x * x * wa / (w * w);
    for (std::size_t k = 0; k < m; ++k) out[k] = d2 * p[k] + 2.0 * d1 * dp[k] + wa * ddp[k];
}

double BasisExpansion::polynomial(double x) const {
    std::vector<double> p(static_cast<std::size_t>(coefficients.size()));
    basis.polynomials(x, p);
    double s = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) s += coefficients[static_cast<Eigen::Index>(k)] * p[k];
    return s;
}

double BasisExpansion::operator()(double x) const {
    const double w = (1.0 - x) * (1.0 + x);
    if (!(w > 0.0)) return 0.0;
    return std::pow(w, basis.order().value()) * polynomial(x);
}

double BasisExpansion::at_distance(double d, int side) const {
    if (!(d > 0.0) || d > 1.0) throw InvalidArgument("at_distance: need 0 < d ≤ 1");
    const double x = side > 0 ? 1.0 - d : -1.0 + d;
    return std::pow(d * (2.0 - d), basis.order().value()) * polynomial(x);
}

double BasisExpansion::derivative_factor(double x) const {
    const std::size_t m = static_cast<std::size_t>(coefficients.size());
    std::vector<double> p(m), dp(m);
    basis.polynomials_with_derivatives(x, p, dp);
    double s = 0.0, ds = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        s += coefficients[static_cast<Eigen::Index>(k)] * p[k];
        ds += coefficients[static_cast<Eigen::Index>(k)] * dp[k];
    }
    const double a = basis.order().value();
    return -2.0 * a * x * s + (1.0 - x) * (1.0 + x) * ds;
}

double BasisExpansion::derivative(double x) const {
    const double w = (1.0 - x) * (1.0 + x);
    if (!(w > 0.0)) throw InvalidArgument("derivative: x must lie in (-1, 1)");
    return std::pow(w, basis.order().value() - 1.0) * derivative_factor(x);
}

double BasisExpansion::weighted_boundary_value(int side) const {
    return std::pow(2.0, basis.order().value()) * polynomial(side > 0 ? 1.0 : -1.0);
}

SampledFunction BasisExpansion::sample(const UniformGrid1D& grid) const {
    return SampledFunction::sample(grid, [this](double x) { return (*this)(x); });
}

BasisExpansion expansion(const DirichletSystem& sys, const Eigen::VectorXd& coefficients) {
    if (static_cast<std::size_t>(coefficients.size()) != sys.basis.size()) {
        throw InvalidArgument("expansion: coefficient count differs from basis size");
    }
    return {sys.basis, coefficients};
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

Eigen::MatrixXd assemble_energy_form(const WeightedBasis& basis, double constant, std::size_t gauss_points) {
    const std::size_t n = basis.size();
    const double a = basis.order().value();
    const QuadratureRule rule = gauss_legendre(gauss_points);
    const auto outer = graded_panels(-1.0, 1.0, true, true, 0.15, 22, 0.125);

    Eigen::MatrixXd diag_part = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Eigen::MatrixXd local_part = diag_part;
    std::vector<double> psi_x(n), psi_y(n), p(n), dp(n);

    for (const Panel& op : outer) {
        const double omid = 0.5 * (op.lo + op.hi), ohalf = 0.5 * (op.hi - op.lo);
        for (std::size_t oq = 0; oq < rule.nodes.size(); ++oq) {
            const double x = omid + ohalf * rule.nodes[oq];
            const double wx = ohalf * rule.weights[oq];
            const double dist = std::min(1.0 - x, 1.0 + x);
            if (!(dist > 0.0)) continue;
            basis.values(x, psi_x);
            const Eigen::Map<const Eigen::VectorXd> px(psi_x.data(), static_cast<Eigen::Index>(n));

            // c ∫ ψψ^T κ, κ(x) = ∫_{|y|>1} |x-y|^{-1-2a} dy
            const double kappa = (std::pow(1.0 - x, -2.0 * a) + std::pow(1.0 + x, -2.0 * a)) / (2.0 * a);
            diag_part.noalias() += (wx * kappa) * px * px.transpose();

            // ∫_{-1}^{1} (ψ(x)-ψ(y))(ψ(x)-ψ(y))^T |x-y|^{-1-2a} dy, split at y = x.
            const double delta = std::min(1e-6, 1e-4 * dist);
            std::vector<double> cols_w;
            std::vector<double> cols;
            for (int side : {+1, -1}) {
                const double reach = side > 0 ? 1.0 - x : 1.0 + x;
                auto panels = doubling_panels(delta, 0.5 * reach, 0.125);
                auto tail = graded_panels(0.5 * reach, reach, false, true, 0.15, 22, 0.125);
                panels.insert(panels.end(), tail.begin(), tail.end());
                for (const Panel& ip : panels) {
                    const double imid = 0.5 * (ip.lo + ip.hi), ihalf = 0.5 * (ip.hi - ip.lo);
                    for (std::size_t iq = 0; iq < rule.nodes.size(); ++iq) {
                        const double s = imid + ihalf * rule.nodes[iq];
                        basis.values(x + side * s, psi_y);
                        cols_w.push_back(ihalf * rule.weights[iq] * std::pow(s, -1.0 - 2.0 * a));
                        for (std::size_t k = 0; k < n; ++k) cols.push_back(psi_x[k] - psi_y[k]);
                    }
                }
            }
            const Eigen::Map<const Eigen::MatrixXd> dmat(cols.data(), static_cast<Eigen::Index>(n),
                                                         static_cast<Eigen::Index>(cols_w.size()));
            const Eigen::Map<const Eigen::VectorXd> dw(cols_w.data(), static_cast<Eigen::Index>(cols_w.size()));
            Eigen::MatrixXd g = dmat * dw.asDiagonal() * dmat.transpose();

            // |y - x| < δ: (ψ'ψ'^T) · 2 δ^{2-2a} / (2 - 2a)
            basis.polynomials_with_derivatives(x, p, dp);
            const double w = (1.0 - x) * (1.0 + x);
            Eigen::VectorXd dpsi(static_cast<Eigen::Index>(n));
            for (std::size_t k = 0; k < n; ++k) {
                dpsi[static_cast<Eigen::Index>(k)] = std::pow(w, a - 1.0) * (-2.0 * a * x * p[k] + w * dp[k]);
            }
            g.noalias() += (2.0 * std::pow(delta, 2.0 - 2.0 * a) / (2.0 - 2.0 * a)) * dpsi * dpsi.transpose();
            local_part.noalias() += wx * g;
        }
    }
    Eigen::MatrixXd q = constant * (0.5 * local_part + diag_part);
    return 0.5 * (q + q.transpose());
}

DirichletSystem assemble(FractionalOrder a, std::size_t N, const AssemblyOptions& opts) {
    if (N == 0 || N > kMaxBasisSize) {
        throw InvalidArgument("assemble: N must lie in [1, " + std::to_string(kMaxBasisSize) + "]");
    }
    WeightedBasis basis(a, N);
    const double constant = estimate_normalization(a).constant;

    AssemblyOptions local = opts;
    // High-degree polynomials need narrower panels; the exact second derivative
    // lets the local Taylor zone shrink far below the node spacing.
    local.pv.max_panel_width = std::min(opts.pv.max_panel_width, 4.0 / static_cast<double>(N + 8));
    local.pv.near_radius = std::min(opts.pv.near_radius, 1e-4);
    local.pv.near_fraction = std::min(opts.pv.near_fraction, 1.5e-4);

    std::size_t q = opts.outer_nodes == 0 ? N + 8 : opts.outer_nodes;
    Eigen::MatrixXd prev = stiffness_from_pv(basis, constant, q, local);
    double gap = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd cur = prev;
    for (std::size_t d = 0; d < opts.max_doublings; ++d) {
        q *= 2;
        cur = stiffness_from_pv(basis, constant, q, local);
        gap = relative_entry_gap(cur, prev, cur);
        if (gap < opts.cauchy_tolerance) break;
        prev = cur;
    }
    if (!(gap < opts.cauchy_tolerance)) {
        throw ConvergenceError("assemble: outer quadrature did not converge", cur(0, 0), gap);
    }

    AssemblyReport report;
    report.outer_nodes = q;
    report.cauchy_difference = gap;
    report.kernel_constant = constant;
    report.asymmetry = relative_entry_gap(cur, cur.transpose(), cur);
    Eigen::MatrixXd stiffness = 0.5 * (cur + cur.transpose());

    if (opts.verify_with_form) {
        const Eigen::MatrixXd form = assemble_energy_form(basis, constant);
        report.form_discrepancy = relative_entry_gap(stiffness, form, stiffness);
        if (*report.form_discrepancy > opts.form_tolerance) {
            throw ConvergenceError("assemble: energy-form and singular-integral routes disagree", stiffness(0, 0),
                                   *report.form_discrepancy);
        }
    }
    return {basis, std::move(stiffness), mass_matrix(basis), report};
}

std::vector<double> apply_restricted(const BasisExpansion& u, double constant, std::span<const double> x,
                                     const GradedPvOptions& opts) {
    const std::size_t n = u.basis.size();
    const double a = u.basis.order().value();
    GradedPvOptions local = opts;
    local.max_panel_width = std::min(opts.max_panel_width, 4.0 / static_cast<double>(n + 8));
    local.near_radius = std::min(opts.near_radius, 1e-4);
    local.near_fraction = std::min(opts.near_fraction, 1.5e-4);
    std::vector<double> buf(n);
    const auto eval = [&](double y, std::span<double> out) {
        out[0] = u(y);
    };
    const auto d2 = [&](double y, std::span<double> out) {
        u.basis.second_derivatives(y, buf);
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += u.coefficients[static_cast<Eigen::Index>(k)] * buf[k];
        out[0] = s;
    };
    std::vector<double> result(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double v = 0.0;
        pv_integral_unnormalized(eval, 1, -1.0, 1.0, {}, a, x[i], std::span(&v, 1), local, d2);
        result[i] = constant * v;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Solves
// ---------------------------------------------------------------------------

StationarySolution solve_stationary(const DirichletSystem& sys, const std::function<double(double)>& f,
                                    const StationaryOptions& opts) {
    const std::size_t n = sys.basis.size();
    const double a = sys.basis.order().value();
    const QuadratureRule rule = gauss_jacobi(std::max<std::size_t>(2 * n + 16, 64), a, a);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    std::vector<double> p(n);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double fx = f(rule.nodes[q]);
        if (!std::isfinite(fx)) throw InvalidArgument("solve_stationary: f is not finite on (-1, 1)");
        sys.basis.polynomials(rule.nodes[q], p);
        for (std::size_t k = 0; k < n; ++k) b[static_cast<Eigen::Index>(k)] += rule.weights[q] * fx * p[k];
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(sys.stiffness);
    if (llt.info() != Eigen::Success) throw Error("solve_stationary: stiffness matrix is not positive definite");

    StationarySolution sol{{sys.basis, llt.solve(b)}, 0.0, {}};
    sol.check_points = linspace(-opts.residual_extent, opts.residual_extent, opts.residual_points);
    const auto pu = apply_restricted(sol.u, sys.report.kernel_constant, sol.check_points);
    double fmax = 0.0, res = 0.0;
    for (std::size_t i = 0; i < pu.size(); ++i) {
        const double fx = f(sol.check_points[i]);
        fmax = std::max(fmax, std::abs(fx));
        res = std::max(res, std::abs(pu[i] - fx));
    }
    sol.residual = fmax > 0.0 ? res / fmax : res;
    return sol;
}

StationarySolution solve_stationary(const DirichletSystem& sys, const SampledFunction& f,
                                    const StationaryOptions& opts) {
    const auto& g = f.grid();
    if (g.x_min > -1.0 || g.x_max < 1.0) throw InvalidArgument("solve_stationary: f must cover [-1, 1]");
    return solve_stationary(sys, [&f](double x) { return interpolate_linear(f, x); }, opts);
}

EigenSolution eigen_solve(const DirichletSystem& sys, std::size_t count, const EigenOptions& opts) {
    const std::size_t n = sys.basis.size();
    if (count == 0 || 2 * count > n) throw InvalidArgument("eigen_solve: need 1 ≤ count ≤ N/2");
    const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> fine(sys.stiffness, sys.mass);
    if (fine.info() != Eigen::Success) throw Error("eigen_solve: eigensolver failed");

    const std::size_t nc = n - std::min(opts.refinement_step, n / 2);
    const auto ncc = static_cast<Eigen::Index>(nc);
    const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> coarse(
        sys.stiffness.topLeftCorner(ncc, ncc), sys.mass.topLeftCorner(ncc, ncc), Eigen::EigenvaluesOnly);

    EigenSolution out;
    out.coarse_size = nc;
    for (std::size_t k = 0; k < count; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        EigenPair pair;
        pair.lambda = fine.eigenvalues()[kk];
        pair.coefficients = fine.eigenvectors().col(kk);
        Eigen::Index big = 0;
        pair.coefficients.cwiseAbs().maxCoeff(&big);
        if (pair.coefficients[big] < 0.0) pair.coefficients = -pair.coefficients;
        pair.refinement_change = k < nc ? std::abs(pair.lambda - coarse.eigenvalues()[kk]) / std::abs(pair.lambda)
                                        : std::numeric_limits<double>::infinity();
        const Eigen::VectorXd r = sys.stiffness * pair.coefficients - pair.lambda * (sys.mass * pair.coefficients);
        pair.residual = r.norm() / (std::abs(pair.lambda) * pair.coefficients.norm());
        if (pair.lambda > 0.0 && pair.refinement_change <= opts.refinement_tolerance) {
            out.pairs.push_back(std::move(pair));
        } else {
            out.unconverged.push_back(k);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Boundary regularity
// ---------------------------------------------------------------------------

HolderReport holder_divergence(const std::function<double(double)>& g, double beta, const HolderOptions& opts) {
    if (opts.points < 3 || !(opts.eps_min > 0.0) || !(opts.eps_max > opts.eps_min)) {
        throw InvalidArgument("holder_divergence: invalid ladder");
    }
    HolderReport r;
    r.beta = beta;
    const double ratio = std::pow(opts.eps_min / opts.eps_max, 1.0 / static_cast<double>(opts.points - 1));
    double eps = opts.eps_max, sup = 0.0;
    for (std::size_t i = 0; i < opts.points; ++i, eps *= ratio) {
        sup = std::max(sup, std::abs(g(eps)) / std::pow(eps, beta));
        r.eps.push_back(eps);
        r.quotient.push_back(sup);
    }
    if (!(sup > 0.0)) return r;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double m = static_cast<double>(opts.points);
    for (std::size_t i = 0; i < opts.points; ++i) {
        const double lx = std::log(r.eps[i]);
        const double ly = std::log(std::max(r.quotient[i], 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    r.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    r.fires = r.slope < -opts.slope_threshold;
    return r;
}

bool BoundaryRegularityReport::exponent_ok(double tol) const {
    return std::abs(fit[0].exponent - a) <= tol && std::abs(fit[1].exponent - a) <= tol;
}

bool BoundaryRegularityReport::cap_fires() const { return cap[0].fires && cap[1].fires; }

bool BoundaryRegularityReport::control_quiet() const { return !control[0].fires && !control[1].fires; }

BoundaryRegularityReport boundary_regularity_probe(const BasisExpansion& u, const BoundaryRegularityOptions& opts) {
    BoundaryRegularityReport r;
    r.a = u.basis.order().value();
    for (int s = 0; s < 2; ++s) {
        const int side = s == 0 ? -1 : 1;
        const auto g = [&u, side](double d) { return u.at_distance(d, side); };
        r.fit[s] = fit_power_law(g, opts.fit_window);
        r.cap[s] = holder_divergence(g, r.a + opts.delta, opts.holder);
        r.control[s] = holder_divergence(g, r.a - opts.control_offset, opts.holder);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Identities
// ---------------------------------------------------------------------------

IbpReport ibp_identity_check(double constant, std::span<const IbpPair> pairs, const IbpOptions& opts) {
    IbpReport report;
    const double nu_plus = opts.normal == NormalConvention::Outward ? 1.0 : -1.0;
    std::vector<double> ratios;
    for (const IbpPair& pr : pairs) {
        const double a = pr.u.basis.order().value();
        const std::size_t n = std::max(pr.u.basis.size(), pr.v.basis.size());
        const std::size_t q = opts.quadrature_nodes == 0 ? std::max<std::size_t>(2 * n + 16, 48) : opts.quadrature_nodes;
        // u' = (1 - x²)^{a-1} · derivative_factor, so the weight (1 - x²)^{a-1} goes into the rule.
        const QuadratureRule rule = gauss_jacobi(q, a - 1.0, a - 1.0);
        const auto pu = apply_restricted(pr.u, constant, rule.nodes, opts.pv);
        const auto pv = apply_restricted(pr.v, constant, rule.nodes, opts.pv);
        IbpPairResult res;
        for (std::size_t i = 0; i < q; ++i) {
            const double x = rule.nodes[i];
            res.lhs += rule.weights[i] * (pu[i] * pr.v.derivative_factor(x) + pr.u.derivative_factor(x) * pv[i]);
        }
        double scale = 0.0;
        for (int side : {-1, 1}) {
            const double gu = pr.u.weighted_boundary_value(side);
            const double gv = pr.v.weighted_boundary_value(side);
            res.rhs += (side > 0 ? nu_plus : -nu_plus) * gu * gv;
            scale = std::max(scale, std::abs(gu) * std::abs(gv));
        }
        res.ratio_defined = std::abs(res.rhs) > opts.zero_tolerance * std::max(scale, 1e-300);
        if (res.ratio_defined) {
            res.ratio = res.lhs / res.rhs;
            ratios.push_back(res.ratio);
        }
        report.pairs.push_back(res);
    }
    if (ratios.empty()) throw InvalidArgument("ibp_identity_check: every pair has R = 0");
    report.mean_ratio = std::accumulate(ratios.begin(), ratios.end(), 0.0) / static_cast<double>(ratios.size());
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    report.spread = (*hi - *lo) / std::abs(report.mean_ratio);
    return report;
}

GreensReport greens_reduced_check(double constant, const BasisExpansion& u, const BasisExpansion& v,
                                  const GradedPvOptions& pv) {
    GreensReport r;
    const double a = u.basis.order().value();
    double umax = 0.0, vmax = 0.0;
    for (double x : linspace(-0.995, 0.995, 201)) {
        umax = std::max(umax, std::abs(u(x)));
        vmax = std::max(vmax, std::abs(v(x)));
    }
    const double d = 1e-8;
    for (int side : {-1, 1}) {
        if (umax > 0.0) r.dirichlet_trace = std::max(r.dirichlet_trace, std::abs(u.at_distance(d, side)) / std::pow(d, a - 1.0) / umax);
        if (vmax > 0.0) r.dirichlet_trace = std::max(r.dirichlet_trace, std::abs(v.at_distance(d, side)) / std::pow(d, a - 1.0) / vmax);
    }
    if (r.dirichlet_trace > 1e-6) {
        throw InvalidArgument("greens_reduced_check: Dirichlet trace is not zero");
    }
    const std::size_t n = std::max(u.basis.size(), v.basis.size());
    const QuadratureRule rule = gauss_jacobi(2 * n + 16, a, a);
    const auto pu = apply_restricted(u, constant, rule.nodes, pv);
    const auto pvv = apply_restricted(v, constant, rule.nodes, pv);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double x = rule.nodes[i];
        s += rule.weights[i] * (pu[i] * v.polynomial(x) - u.polynomial(x) * pvv[i]);
    }
    r.lhs = std::abs(s);
    r.scale = l2_norm(u) * l2_norm(v);
    r.relative = r.scale > 0.0 ? r.lhs / r.scale : r.lhs;
    return r;
}

}  // namespace fraclab
