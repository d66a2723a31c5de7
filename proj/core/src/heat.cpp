#include "fraclab/heat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fraclab/error.hpp"

namespace fraclab {

namespace {

std::size_t step_count(double T, double dt) {
    if (!(T > 0.0) || !(dt > 0.0) || dt > T) throw InvalidArgument("evolve: need 0 < dt ≤ T");
    const double r = T / dt;
    const double n = std::round(r);
    if (std::abs(r - n) > 1e-9 * r) throw InvalidArgument("evolve: T must be an integer multiple of dt");
    return static_cast<std::size_t>(n);
}

double binomial(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

double m_norm(const Eigen::MatrixXd& mass, const Eigen::VectorXd& c) {
    return std::sqrt(std::max(0.0, c.dot(mass * c)));
}

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
using Gauss = boost::math::quadrature::gauss<double, 7>;

// ∫_lo^hi e^{-λ_k (t - s)} g_k(s) ds for all modes at once, by adaptive (7, 15)
// Gauss–Kronrod bisection. The error test is taken against max(|I|, (hi - lo) g_max)
// so modes with vanishing forcing do not force refinement.
void duhamel_piece(const std::function<Eigen::VectorXd(double)>& g, const Eigen::VectorXd& lambda, double t,
                   double lo, double hi, double tol, int depth, Eigen::VectorXd& out) {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    const auto& xk = Kronrod::abscissa();
    const auto& wk = Kronrod::weights();
    const auto& wg = Gauss::weights();
    const auto n = lambda.size();
    Eigen::VectorXd kr = Eigen::VectorXd::Zero(n), ga = Eigen::VectorXd::Zero(n);
    double gmax = 0.0;
    for (std::size_t j = 0; j < xk.size(); ++j) {
        for (int sgn : {1, -1}) {
            if (j == 0 && sgn < 0) continue;
            const double s = mid + sgn * half * xk[j];
            const Eigen::VectorXd gs = g(s);
            gmax = std::max(gmax, gs.cwiseAbs().maxCoeff());
            const Eigen::VectorXd v = (-lambda * (t - s)).array().exp().matrix().cwiseProduct(gs);
            kr += wk[j] * v;
            // Gauss nodes are the even-indexed Kronrod nodes.
            if (j % 2 == 0) ga += wg[j / 2] * v;
        }
    }
    kr *= half;
    ga *= half;
    const double err = (kr - ga).cwiseAbs().maxCoeff();
    const double scale = std::max(kr.cwiseAbs().maxCoeff(), (hi - lo) * gmax);
    if (err <= tol * scale || scale == 0.0) {
        out += kr;
        return;
    }
    if (depth == 0) throw ConvergenceError("evolve: Duhamel quadrature did not converge", tol, err / scale);
    duhamel_piece(g, lambda, t, lo, mid, tol, depth - 1, out);
    duhamel_piece(g, lambda, t, mid, hi, tol, depth - 1, out);
}

}  // namespace

BasisExpansion HeatTrajectory::state(std::size_t i) const { return expansion(*system, states.at(i)); }

double HeatTrajectory::mass_norm(std::size_t i) const { return m_norm(system->mass, states.at(i)); }

ModalBasis modal_basis(const DirichletSystem& sys, const EigenOptions& opts) {
    const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> fine(sys.stiffness, sys.mass);
    if (fine.info() != Eigen::Success) throw Error("modal_basis: eigensolver failed");
    const std::size_t n = sys.basis.size();
    const std::size_t nc = n - std::min(opts.refinement_step, n / 2);
    const auto ncc = static_cast<Eigen::Index>(nc);
    const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> coarse(
        sys.stiffness.topLeftCorner(ncc, ncc), sys.mass.topLeftCorner(ncc, ncc), Eigen::EigenvaluesOnly);

    ModalBasis mb{fine.eigenvalues(), fine.eigenvectors(), std::vector<bool>(n, false)};
    for (std::size_t k = 0; k < nc; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        const double change = std::abs(mb.lambda[kk] - coarse.eigenvalues()[kk]) / std::abs(mb.lambda[kk]);
        mb.converged[k] = mb.lambda[kk] > 0.0 && change <= opts.refinement_tolerance;
    }
    return mb;
}

HeatTrajectory evolve(const HeatConfig& cfg, const Eigen::VectorXd& u0, const HeatForcing& f) {
    if (!cfg.system) throw InvalidArgument("evolve: no spatial system");
    const DirichletSystem& sys = *cfg.system;
    const auto n = static_cast<Eigen::Index>(sys.basis.size());
    if (u0.size() != n) throw InvalidArgument("evolve: initial coefficients do not match the basis size");
    const std::size_t steps = step_count(cfg.T, cfg.dt);

    HeatTrajectory traj{cfg.system, {0.0}, {u0}};
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);

    if (cfg.scheme == HeatScheme::ImplicitEuler) {
        const Eigen::MatrixXd k = sys.mass + cfg.dt * sys.stiffness;
        const Eigen::LLT<Eigen::MatrixXd> llt(k);
        if (llt.info() != Eigen::Success) throw Error("evolve: implicit Euler matrix is not positive definite");
        Eigen::VectorXd c = u0;
        for (std::size_t m = 1; m <= steps; ++m) {
            const double t = cfg.dt * static_cast<double>(m);
            Eigen::VectorXd rhs = sys.mass * c;
            if (f) rhs += cfg.dt * (sys.mass * f(t));
            c = llt.solve(rhs);
            traj.times.push_back(t);
            traj.states.push_back(c);
        }
        return traj;
    }

    const ModalBasis mb = modal_basis(sys, cfg.eigen);
    const Eigen::MatrixXd proj = mb.vectors.transpose() * sys.mass;
    const Eigen::VectorXd m0 = proj * u0;
    double total = m0.squaredNorm(), covered = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (mb.converged[static_cast<std::size_t>(k)]) covered += m0[k] * m0[k];
    }
    if (total > 0.0 && covered < cfg.required_coverage * total) {
        throw InvalidArgument("evolve: converged eigenmodes cover only " + std::to_string(covered / total) +
                              " of the initial data");
    }

    Eigen::VectorXd duhamel = Eigen::VectorXd::Zero(n);
    for (std::size_t m = 1; m <= steps; ++m) {
        const double t = cfg.dt * static_cast<double>(m);
        if (f) {
            const double t_prev = cfg.dt * static_cast<double>(m - 1);
            const auto modal_f = [&](double s) -> Eigen::VectorXd { return proj * f(s); };
            Eigen::VectorXd piece = Eigen::VectorXd::Zero(n);
            duhamel_piece(modal_f, mb.lambda, t, t_prev, t, cfg.quadrature_tolerance, 12, piece);
            duhamel = (-mb.lambda * cfg.dt).array().exp().matrix().cwiseProduct(duhamel) + piece;
        }
        const Eigen::VectorXd modal = (-mb.lambda * t).array().exp().matrix().cwiseProduct(m0) + duhamel;
        traj.times.push_back(t);
        traj.states.push_back(mb.vectors * modal);
    }
    return traj;
}

TimeRegularityReport time_regularity_probe(const HeatTrajectory& traj, int k, const TimeRegularityOptions& opts) {
    if (k < 1 || k > 4) throw InvalidArgument("time_regularity_probe: order must lie in [1, 4]");
    if (opts.strides.empty()) throw InvalidArgument("time_regularity_probe: no strides");
    if (traj.times.size() < 2) throw InvalidArgument("time_regularity_probe: trajectory too short");
    const double dt = traj.times[1] - traj.times[0];
    const double T = traj.times.back();
    const std::size_t last = traj.times.size() - 1;
    const auto i0 = static_cast<std::size_t>(std::ceil(opts.t0_fraction * T / dt - 1e-9));
    const std::size_t widest = *std::max_element(opts.strides.begin(), opts.strides.end());
    if (i0 + static_cast<std::size_t>(k) * widest + 4 * widest > last) {
        throw InvalidArgument("time_regularity_probe: insufficient time resolution for the requested order");
    }
    const Eigen::MatrixXd& mass = traj.system->mass;

    TimeRegularityReport r;
    r.order = k;
    for (std::size_t stride : opts.strides) {
        const double tau = dt * static_cast<double>(stride);
        const double scale = std::pow(tau, -k);
        double worst = 0.0;
        const bool finest = stride == opts.strides.back();
        for (std::size_t i = i0; i + static_cast<std::size_t>(k) * stride <= last; ++i) {
            Eigen::VectorXd diff = Eigen::VectorXd::Zero(traj.states[i].size());
            for (int j = 0; j <= k; ++j) {
                const double sign = ((k - j) % 2 == 0) ? 1.0 : -1.0;
                diff += sign * binomial(k, j) * traj.states[i + static_cast<std::size_t>(j) * stride];
            }
            const double v = m_norm(mass, diff) * scale;
            worst = std::max(worst, v);
            if (finest) {
                r.profile_times.push_back(traj.times[i] + 0.5 * k * tau);
                r.profile_values.push_back(v);
            }
        }
        r.steps.push_back(tau);
        r.max_norm.push_back(worst);
    }
    for (std::size_t l = 1; l < r.max_norm.size(); ++l) {
        r.growth.push_back(r.max_norm[l - 1] > 0.0 ? r.max_norm[l] / r.max_norm[l - 1] : 1.0);
    }
    r.bounded = r.growth.empty() || r.growth.back() <= opts.growth_limit;
    return r;
}

BoundaryInTimeReport boundary_exponent_in_time(const HeatTrajectory& traj, const BoundaryInTimeOptions& opts) {
    if (traj.times.empty() || opts.probes == 0) throw InvalidArgument("boundary_exponent_in_time: nothing to probe");
    const double T = traj.times.back();
    const double t0 = opts.t0_fraction * T;
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        if (traj.times[i] >= t0 - 1e-12 * T && traj.times[i] > 0.0) eligible.push_back(i);
    }
    if (eligible.empty()) throw InvalidArgument("boundary_exponent_in_time: no samples at t ≥ t0");

    BoundaryInTimeReport r;
    const double a = traj.system->basis.order().value();
    const std::size_t count = std::min(opts.probes, eligible.size());
    for (std::size_t p = 0; p < count; ++p) {
        const std::size_t idx =
            count == 1 ? eligible.back()
                       : eligible[p * (eligible.size() - 1) / (count - 1)];
        const BasisExpansion u = traj.state(idx);
        r.times.push_back(traj.times[idx]);
        bool bad = false;
        PowerFit fits[2];
        for (int s = 0; s < 2; ++s) {
            const int side = s == 0 ? -1 : 1;
            try {
                fits[s] = fit_power_law([&u, side](double d) { return u.at_distance(d, side); }, opts.fit_window);
                r.max_deviation = std::max(r.max_deviation, std::abs(fits[s].exponent - a));
            } catch (const InvalidArgument&) {
                bad = true;
            }
        }
        r.left.push_back(fits[0]);
        r.right.push_back(fits[1]);
        r.flagged.push_back(bad);
    }
    return r;
}

SmoothnessCapReport smoothness_cap_demo(FractionalOrder a, const SmoothnessCapOptions& opts) {
    const DirichletSystem sys = assemble(a, opts.basis_size);
    const EigenSolution eig = eigen_solve(sys, 1);
    if (eig.pairs.empty()) {
        throw ConvergenceError("smoothness_cap_demo: principal eigenpair did not converge", 0.0,
                               std::numeric_limits<double>::infinity());
    }
    const EigenPair& p = eig.pairs.front();
    SmoothnessCapReport r;
    r.a = a.value();
    r.lambda1 = p.lambda;
    r.t = opts.t;
    const Eigen::VectorXd coeffs = std::exp(-p.lambda * opts.t) * p.coefficients;
    r.solution = boundary_regularity_probe(expansion(sys, coeffs), opts.probe);
    const double decay = std::exp(-opts.t);
    for (int s = 0; s < 2; ++s) {
        const auto g = [decay](double d) {
            const double w = d * (2.0 - d);
            return decay * w * w;
        };
        r.control[s] = holder_divergence(g, a.value() + opts.probe.delta, opts.probe.holder);
    }
    return r;
}

}  // namespace fraclab
