#include "fraclab/tools/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include <fraclab/dirichlet.hpp>
#include <fraclab/error.hpp>
#include <fraclab/halfspace.hpp>
#include <fraclab/heat.hpp>
#include <fraclab/levy.hpp>
#include <fraclab/operators.hpp>
#include <fraclab/symbols.hpp>

namespace fraclab::tools {

namespace {

using I64 = std::int64_t;

// ---------------------------------------------------------------------------
// Parameter access (values are validated by resolve_params before a run)
// ---------------------------------------------------------------------------

std::vector<double> reals(const Json& p, const char* key) {
    const Json& v = p.at(key);
    if (v.is_array()) return v.get<std::vector<double>>();
    return {v.get<double>()};
}

double real(const Json& p, const char* key) { return p.at(key).get<double>(); }

std::size_t count(const Json& p, const char* key) { return p.at(key).get<std::size_t>(); }

std::vector<std::size_t> counts(const Json& p, const char* key) {
    const Json& v = p.at(key);
    if (v.is_array()) return v.get<std::vector<std::size_t>>();
    return {v.get<std::size_t>()};
}

AssemblyOptions assembly_options(const RunContext& ctx) {
    AssemblyOptions o;
    o.threads = ctx.threads;
    return o;
}

std::shared_ptr<const DirichletSystem> system_for(double a, std::size_t n, const RunContext& ctx) {
    return std::make_shared<const DirichletSystem>(assemble(FractionalOrder(a), n, assembly_options(ctx)));
}

EigenPair principal_pair(const DirichletSystem& sys) {
    const EigenSolution eig = eigen_solve(sys, 1);
    if (eig.pairs.empty()) {
        throw ConvergenceError("principal eigenpair did not converge", 0.0, std::numeric_limits<double>::infinity());
    }
    return eig.pairs.front();
}

StableConfig stable_config(double a, const Json& p, const RunContext& ctx) {
    StableConfig cfg;
    cfg.a = FractionalOrder(a);
    cfg.n_paths = count(p, "paths");
    cfg.seed = ctx.seed;
    cfg.threads = ctx.threads;
    if (p.contains("dt")) cfg.dt = real(p, "dt");
    return cfg;
}

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

ExperimentOutput cross_validate_run(const Json& p, const RunContext&) {
    ExperimentOutput out{Table({"a", "x", "multiplier", "pv", "relative_discrepancy"}), {}};
    const double half = real(p, "half_width");
    const auto grid = UniformGrid1D::make(-half, half, count(p, "points"));
    const auto u = SampledFunction::sample(grid, [](double x) { return std::exp(-x * x); });
    double worst = 0.0;
    for (double a : reals(p, "a")) {
        const CrossValidationReport r = cross_validate(FractionalOrder(a), u, 1.0);
        double scale = 0.0;
        for (double m : r.multiplier) scale = std::max(scale, std::abs(m));
        for (std::size_t i = 0; i < r.x.size(); ++i) {
            out.table.add_row({a, r.x[i], r.multiplier[i], r.pv[i], std::abs(r.multiplier[i] - r.pv[i]) / scale});
        }
        worst = std::max(worst, r.max_relative_discrepancy);
    }
    out.measured["max_relative_discrepancy"] = worst;
    return out;
}

ExperimentOutput normalization_run(const Json& p, const RunContext&) {
    ExperimentOutput out{Table({"a", "constant", "mismatch", "refinements"}), {}};
    double worst = 0.0;
    for (double a : reals(p, "a")) {
        const NormalizationEstimate e = estimate_normalization(FractionalOrder(a));
        out.table.add_row({a, e.constant, e.mismatch, static_cast<I64>(e.refinements)});
        worst = std::max(worst, e.mismatch);
    }
    out.measured["max_mismatch"] = worst;
    return out;
}

// ---------------------------------------------------------------------------
// Half-line model problem
// ---------------------------------------------------------------------------

ExperimentOutput reducer_contract_run(const Json& p, const RunContext&) {
    ExperimentOutput out{Table({"a", "t", "sign", "leakage", "roundtrip_error"}), {}};
    const auto grid = half_line_grid(count(p, "log2_points"), real(p, "cells_per_unit"));
    const std::size_t i0 = origin_index(grid);
    const auto bump = [](double x) { return x * x * std::exp(-x * x); };
    const SampledFunction plus = SampledFunction::sample(grid, [&](double x) { return x >= 0.0 ? bump(x) : 0.0; });
    const SampledFunction minus = SampledFunction::sample(grid, [&](double x) { return x <= 0.0 ? bump(-x) : 0.0; });
    double worst_leak = 0.0, worst_trip = 0.0;
    for (double a : reals(p, "a")) {
        for (double t : {a, -a, a + 1.0, -(a + 1.0)}) {
            for (ReducerSign sign : {ReducerSign::Plus, ReducerSign::Minus}) {
                const SampledFunction& u = sign == ReducerSign::Plus ? plus : minus;
                const XiResult fwd = xi_apply(sign, t, u);
                const XiResult back = xi_apply(sign, -t, fwd.value);
                double err = 0.0;
                for (std::size_t i = 0; i < grid.n; ++i) {
                    if (i + 2 >= i0 && i <= i0 + 2) continue;
                    err = std::max(err, std::abs(back.value[i] - u[i]));
                }
                err /= u.max_abs();
                const double leak = std::max(fwd.leakage, back.leakage);
                out.table.add_row({a, t, std::string(sign == ReducerSign::Plus ? "plus" : "minus"), leak, err});
                worst_leak = std::max(worst_leak, leak);
                worst_trip = std::max(worst_trip, err);
            }
        }
    }
    out.measured["max_leakage"] = worst_leak;
    out.measured["max_roundtrip_error"] = worst_trip;
    return out;
}

ExperimentOutput halfline_solve_run(const Json& p, const RunContext&) {
    ExperimentOutput out{Table({"a", "roundtrip_error", "residual", "leakage", "boundary_exponent", "phi"}), {}};
    const auto grid = half_line_grid(count(p, "log2_points"), real(p, "cells_per_unit"));
    const double cutoff = real(p, "forcing_cutoff");
    double worst_trip = 0.0, worst_res = 0.0, worst_exp = 0.0;
    for (double a : reals(p, "a")) {
        const FractionalOrder order(a);
        const HalfLineFunction u = sample_half_line(grid, [a](double x) { return std::pow(x, a) * std::exp(-x); });
        // The forward image is cut off far from the boundary, where it is below rounding
        // level anyway, so that the periodic seam of the FFT box stays clean.
        const SampledFunction pu = apply_model_operator(order, u);
        std::vector<Complex> fv(pu.values().begin(), pu.values().end());
        for (std::size_t i = 0; i < grid.n; ++i) {
            if (grid.x(i) > cutoff) fv[i] = 0.0;
        }
        const HalfLineFunction f{SampledFunction(grid, std::move(fv)), SupportSide::Plus, 0.0};
        const ModelSolution sol = solve_model_dirichlet(order, f);
        double err = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < grid.n; ++i) {
            const double x = grid.x(i);
            if (x < 0.1 || x > 3.0) continue;
            err = std::max(err, std::abs(sol.u.sample[i] - u.sample[i]));
            scale = std::max(scale, std::abs(u.sample[i]));
        }
        err /= scale;
        const TransmissionDecomposition d = decompose_transmission(sol.u, order);
        out.table.add_row({a, err, sol.residual, sol.leakage, d.boundary_fit.exponent, d.phi});
        worst_trip = std::max(worst_trip, err);
        worst_res = std::max(worst_res, sol.residual);
        worst_exp = std::max(worst_exp, std::abs(d.boundary_fit.exponent - a));
    }
    out.measured["max_roundtrip_error"] = worst_trip;
    out.measured["max_residual"] = worst_res;
    out.measured["max_exponent_deviation"] = worst_exp;
    return out;
}

// ---------------------------------------------------------------------------
// Interval problem
// ---------------------------------------------------------------------------

ExperimentOutput eigenvalues_run(const Json& p, const RunContext& ctx) {
    ExperimentOutput out{Table({"a", "N", "k", "lambda", "refinement_change", "residual"}), {}};
    const std::size_t wanted = count(p, "count");
    double worst_change = 0.0;
    I64 unconverged = 0;
    for (double a : reals(p, "a")) {
        double previous = 0.0;
        for (std::size_t n : counts(p, "sizes")) {
            const auto sys = system_for(a, n, ctx);
            const EigenSolution eig = eigen_solve(*sys, std::min(wanted, n / 2));
            unconverged += static_cast<I64>(eig.unconverged.size());
            for (std::size_t k = 0; k < eig.pairs.size(); ++k) {
                const EigenPair& e = eig.pairs[k];
                out.table.add_row({a, static_cast<I64>(n), static_cast<I64>(k + 1), e.lambda, e.refinement_change,
                                   e.residual});
            }
            if (eig.pairs.empty()) continue;
            const double lam = eig.pairs.front().lambda;
            if (previous > 0.0) worst_change = std::max(worst_change, std::abs(lam - previous) / lam);
            previous = lam;
        }
    }
    out.measured["max_size_change"] = worst_change;
    out.measured["unconverged"] = static_cast<double>(unconverged);
    return out;
}

ExperimentOutput torsion_run(const Json& p, const RunContext& ctx) {
    ExperimentOutput out{Table({"a", "x", "exact", "galerkin", "pv_of_exact"}), {}};
    double worst_pv = 0.0, worst_center = 0.0, worst_res = 0.0;
    for (double a : reals(p, "a")) {
        const FractionalOrder order(a);
        // (1 - x²)^a / Γ(2a + 1) solves r+ (-Δ)^a u = 1 on (-1, 1).
        const double amp = 1.0 / std::tgamma(2.0 * a + 1.0);
        const auto exact = [a, amp](double x) { return std::abs(x) < 1.0 ? amp * std::pow(1.0 - x * x, a) : 0.0; };
        const auto sys = system_for(a, count(p, "N"), ctx);
        const StationarySolution sol = solve_stationary(*sys, [](double) { return 1.0; });
        std::vector<double> xs;
        for (int i = -9; i <= 9; ++i) xs.push_back(0.1 * i);
        const auto pv = apply_pv_integral(fractional_laplacian_kernel(order), SupportedFunction{exact, -1.0, 1.0, {}}, xs);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            out.table.add_row({a, xs[i], exact(xs[i]), sol.u(xs[i]), pv[i]});
            worst_pv = std::max(worst_pv, std::abs(pv[i] - 1.0));
        }
        worst_center = std::max(worst_center, std::abs(sol.u(0.0) - amp) / amp);
        worst_res = std::max(worst_res, sol.residual);
    }
    out.measured["max_pv_error"] = worst_pv;
    out.measured["center_error"] = worst_center;
    out.measured["max_residual"] = worst_res;
    return out;
}

ExperimentOutput boundary_regularity_run(const Json& p, const RunContext& ctx) {
    ExperimentOutput out{
        Table({"a", "k", "lambda", "exponent_left", "exponent_right", "cap_fires", "control_quiet"}), {}};
    double worst = 0.0;
    I64 misses = 0, alarms = 0;
    for (double a : reals(p, "a")) {
        const auto sys = system_for(a, count(p, "N"), ctx);
        const EigenSolution eig = eigen_solve(*sys, count(p, "count"));
        misses += static_cast<I64>(eig.unconverged.size());
        for (std::size_t k = 0; k < eig.pairs.size(); ++k) {
            const auto r = boundary_regularity_probe(expansion(*sys, eig.pairs[k].coefficients));
            out.table.add_row({a, static_cast<I64>(k + 1), eig.pairs[k].lambda, r.fit[0].exponent, r.fit[1].exponent,
                               r.cap_fires(), r.control_quiet()});
            worst = std::max({worst, std::abs(r.fit[0].exponent - a), std::abs(r.fit[1].exponent - a)});
            misses += r.cap_fires() ? 0 : 1;
            alarms += r.control_quiet() ? 0 : 1;
        }
    }
    out.measured["max_exponent_deviation"] = worst;
    out.measured["cap_misses"] = static_cast<double>(misses);
    out.measured["control_alarms"] = static_cast<double>(alarms);
    return out;
}

ExperimentOutput ibp_run(const Json& p, const RunContext& ctx) {
    ExperimentOutput out{Table({"a", "pair", "symmetric", "lhs", "rhs", "ratio"}), {}};
    double spread = 0.0, symmetric = 0.0;
    for (double a : reals(p, "a")) {
        const auto sys = system_for(a, count(p, "N"), ctx);
        const auto solve = [&](const std::function<double(double)>& f) { return solve_stationary(*sys, f).u; };
        const BasisExpansion u1 = solve([](double x) { return 1.0 + x; });
        const BasisExpansion u2 = solve([](double x) { return std::exp(x); });
        const BasisExpansion u3 = solve([](double x) { return (1.0 + x) * (1.0 + x); });
        const BasisExpansion u4 = solve([](double x) { return std::cos(x) + 0.5 * x; });
        const BasisExpansion e1 = solve([](double) { return 1.0; });
        const BasisExpansion e2 = solve([](double x) { return 1.0 + x * x; });
        const std::vector<IbpPair> pairs{{u1, u2}, {u1, u3}, {u2, u4}, {u3, u4}, {u1, u1}, {e1, e2}};
        const IbpReport r = ibp_identity_check(sys->report.kernel_constant, pairs);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const bool sym = i + 1 == pairs.size();
            const auto& q = r.pairs[i];
            out.table.add_row({a, static_cast<I64>(i + 1), sym, q.lhs, q.rhs,
                               q.ratio_defined ? q.ratio : std::numeric_limits<double>::quiet_NaN()});
            if (sym) symmetric = std::max({symmetric, std::abs(q.lhs), std::abs(q.rhs)});
        }
        spread = std::max(spread, r.spread);
    }
    out.measured["ratio_spread"] = spread;
    out.measured["symmetric_residual"] = symmetric;
    return out;
}

ExperimentOutput greens_run(const Json& p, const RunContext& ctx) {
    ExperimentOutput out{Table({"a", "pair", "i", "j", "lhs", "relative"}), {}};
    double worst = 0.0;
    std::mt19937_64 rng(ctx.seed);
    for (double a : reals(p, "a")) {
        const std::size_t n = count(p, "N");
        const auto sys = system_for(a, n, ctx);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t q = 0; q < count(p, "pairs"); ++q) {
            const std::size_t i = pick(rng), j = pick(rng);
            const auto e = [&](std::size_t k) {
                Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
                c[static_cast<Eigen::Index>(k)] = 1.0;
                return expansion(*sys, c);
            };
            const GreensReport r = greens_reduced_check(sys->report.kernel_constant, e(i), e(j));
            out.table.add_row({a, static_cast<I64>(q + 1), static_cast<I64>(i), static_cast<I64>(j), r.lhs, r.relative});
            worst = std::max(worst, r.relative);
        }
    }
    out.measured["max_relative"] = worst;
    return out;
}

// ---------------------------------------------------------------------------
// Heat equation
// ---------------------------------------------------------------------------

HeatConfig heat_config(const std::shared_ptr<const DirichletSystem>& sys, const Json& p) {
    HeatConfig cfg;
    cfg.system = sys;
    cfg.T = real(p, "T");
    cfg.dt = real(p, "dt");
    return cfg;
}

ExperimentOutput heat_decay_run(const Json& p, const RunContext& ctx) {
    ExperimentOutput out{Table({"a", "t", "mass_norm", "exact", "coefficient_error"}), {}};
    double worst = 0.0;
    for (double a : reals(p, "a")) {
        const auto sys = system_for(a, count(p, "N"), ctx);
        const EigenPair e = principal_pair(*sys);
        const HeatTrajectory tr = evolve(heat_config(sys, p), e.coefficients);
        const double cmax = e.coefficients.cwiseAbs().maxCoeff();
        for (std::size_t i = 0; i < tr.times.size(); ++i) {
            const double decay = std::exp(-e.lambda * tr.times[i]);
            const double err = (tr.states[i] - decay * e.coefficients).cwiseAbs().maxCoeff() / cmax;
            out.table.add_row({a, tr.times[i], tr.mass_norm(i), decay, err});
            worst = std::max(worst, err);
        }
    }
    out.measured["max_coefficient_error"] = worst;
    return out;
}

ExperimentOutput heat_convergence_run(const Json& p, const RunContext& ctx) {
    ExperimentOutput out{Table({"a", "dt", "error", "ratio"}), {}};
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double a : reals(p, "a")) {
        const auto sys = system_for(a, count(p, "N"), ctx);
        const Eigen::VectorXd u0 = solve_stationary(*sys, [](double) { return 1.0; }).u.coefficients;
        HeatConfig ref;
        ref.system = sys;
        ref.T = real(p, "T");
        ref.dt = ref.T;
        const Eigen::VectorXd exact = evolve(ref, u0).states.back();
        double previous = 0.0;
        for (double dt : reals(p, "dt")) {
            HeatConfig cfg = ref;
            cfg.dt = dt;
            cfg.scheme = HeatScheme::ImplicitEuler;
            const double err = (evolve(cfg, u0).states.back() - exact).cwiseAbs().maxCoeff();
            const double ratio = previous > 0.0 ? previous / err : std::numeric_limits<double>::quiet_NaN();
            out.table.add_row({a, dt, err, ratio});
            if (previous > 0.0) {
                lo = std::min(lo, ratio);
                hi = std::max(hi, ratio);
            }
            previous = err;
        }
    }
    out.measured["min_ratio"] = lo;
    out.measured["max_ratio"] = hi;
    return out;
}

ExperimentOutput heat_boundary_run(const Json& p, const RunContext& ctx) {
    ExperimentOutput out{Table({"a", "t", "exponent_left", "exponent_right", "flagged"}), {}};
    double worst = 0.0;
    I64 flagged = 0;
    const std::string initial = p.at("initial").get<std::string>();
    for (double a : reals(p, "a")) {
        const auto sys = system_for(a, count(p, "N"), ctx);
        const Eigen::VectorXd u0 = initial == "eigenfunction"
                                       ? principal_pair(*sys).coefficients
                                       : solve_stationary(*sys, [](double) { return 1.0; }).u.coefficients;
        const HeatTrajectory tr = evolve(heat_config(sys, p), u0);
        const BoundaryInTimeReport r = boundary_exponent_in_time(tr);
        for (std::size_t i = 0; i < r.times.size(); ++i) {
            out.table.add_row({a, r.times[i], r.left[i].exponent, r.right[i].exponent, static_cast<bool>(r.flagged[i])});
            flagged += r.flagged[i] ? 1 : 0;
        }
        worst = std::max(worst, r.max_deviation);
    }
    out.measured["max_exponent_deviation"] = worst;
    out.measured["flagged"] = static_cast<double>(flagged);
    return out;
}

ExperimentOutput smoothness_cap_run(const Json& p, const RunContext&) {
    ExperimentOutput out{Table({"a", "lambda1", "t", "exponent_left", "exponent_right", "cap_fires", "control_fires"}),
                         {}};
    I64 misses = 0, alarms = 0;
    for (double a : reals(p, "a")) {
        SmoothnessCapOptions o;
        o.basis_size = count(p, "N");
        o.t = real(p, "t");
        const SmoothnessCapReport r = smoothness_cap_demo(FractionalOrder(a), o);
        out.table.add_row({a, r.lambda1, r.t, r.solution.fit[0].exponent, r.solution.fit[1].exponent, r.cap_fires(),
                           r.control_fires()});
        misses += r.cap_fires() ? 0 : 1;
        alarms += r.control_fires() ? 1 : 0;
    }
    out.measured["cap_misses"] = static_cast<double>(misses);
    out.measured["control_alarms"] = static_cast<double>(alarms);
    return out;
}

ExperimentOutput time_regularity_run(const Json& p, const RunContext& ctx) {
    ExperimentOutput out{Table({"a", "order", "step", "max_norm", "growth"}), {}};
    I64 unbounded = 0;
    for (double a : reals(p, "a")) {
        const auto sys = system_for(a, count(p, "N"), ctx);
        const Eigen::VectorXd phi = principal_pair(*sys).coefficients;
        const HeatForcing f = [&phi](double t) -> Eigen::VectorXd { return phi * (std::pow(t, 4) * std::exp(-t)); };
        const HeatTrajectory tr = evolve(heat_config(sys, p), Eigen::VectorXd::Zero(phi.size()), f);
        TimeRegularityOptions o;
        o.t0_fraction = real(p, "t0_fraction");
        for (std::size_t k = 1; k <= count(p, "max_order"); ++k) {
            const TimeRegularityReport r = time_regularity_probe(tr, static_cast<int>(k), o);
            for (std::size_t l = 0; l < r.steps.size(); ++l) {
                const double g = l == 0 ? std::numeric_limits<double>::quiet_NaN() : r.growth[l - 1];
                out.table.add_row({a, static_cast<I64>(k), r.steps[l], r.max_norm[l], g});
            }
            unbounded += r.bounded ? 0 : 1;
        }
    }
    out.measured["unbounded_orders"] = static_cast<double>(unbounded);
    return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

ExperimentOutput mc_free_run(const Json& p, const RunContext& ctx) {
    ExperimentOutput out{Table({"a", "omega", "t", "x", "mean", "std_error", "exact", "z"}), {}};
    const double x = real(p, "x");
    double worst = 0.0;
    for (double a : reals(p, "a")) {
        const StableConfig cfg = stable_config(a, p, ctx);
        for (double w : reals(p, "omega")) {
            for (double t : reals(p, "t")) {
                const MCEstimate e = feynman_kac_free(cfg, [w](double y) { return std::cos(w * y); }, x, t);
                const double exact = std::exp(-t * std::pow(w, 2.0 * a)) * std::cos(w * x);
                const double z = (e.mean - exact) / e.std_error;
                out.table.add_row({a, w, t, x, e.mean, e.std_error, exact, z});
                worst = std::max(worst, std::abs(z));
            }
        }
    }
    out.measured["max_abs_z"] = worst;
    return out;
}

ExperimentOutput mc_killed_run(const Json& p, const RunContext& ctx) {
    ExperimentOutput out{Table({"a", "estimator", "dt", "mean", "std_error", "spectral", "z"}), {}};
    const double x = real(p, "x"), t = real(p, "t");
    double worst = 0.0;
    for (double a : reals(p, "a")) {
        const auto sys = system_for(a, count(p, "N"), ctx);
        const EigenPair e = principal_pair(*sys);
        const BasisExpansion phi = expansion(*sys, e.coefficients);
        const double spectral = std::exp(-e.lambda * t) * phi(x);
        const StableConfig cfg = stable_config(a, p, ctx);
        const KilledEstimate k = feynman_kac_killed(cfg, [&phi](double y) { return phi(y); }, x, t, count(p, "levels"));
        for (std::size_t l = 0; l < k.levels.size(); ++l) {
            const auto& m = k.levels[l];
            out.table.add_row({a, std::string("level") + std::to_string(l), k.level_dt[l], m.mean, m.std_error, spectral,
                               (m.mean - spectral) / m.std_error});
        }
        const double z = (k.extrapolated.mean - spectral) / k.extrapolated.std_error;
        out.table.add_row({a, std::string("extrapolated"), 0.0, k.extrapolated.mean, k.extrapolated.std_error, spectral, z});
        worst = std::max(worst, std::abs(z));
    }
    out.measured["abs_z"] = worst;
    return out;
}

ExperimentOutput mc_eigenvalue_run(const Json& p, const RunContext& ctx) {
    ExperimentOutput out{Table({"a", "estimator", "lambda", "std_error", "spectral", "z"}), {}};
    double worst = 0.0;
    for (double a : reals(p, "a")) {
        const auto sys = system_for(a, count(p, "N"), ctx);
        const EigenSolution eig = eigen_solve(*sys, 3);
        if (eig.pairs.size() < 3) {
            throw ConvergenceError("mc-eigenvalue: reference eigenvalues did not converge", 0.0,
                                   std::numeric_limits<double>::infinity());
        }
        const double lam = eig.pairs[0].lambda;
        EigenvalueMcOptions o;
        o.gap = eig.pairs[2].lambda - lam;
        const EigenvalueMcReport r =
            principal_eigenvalue_mc(stable_config(a, p, ctx), {real(p, "t1"), real(p, "t2")}, o);
        const auto row = [&](const char* name, const MCEstimate& m) {
            out.table.add_row({a, std::string(name), m.mean, m.std_error, lam, (m.mean - lam) / m.std_error});
        };
        row("fine", r.lambda_fine);
        row("coarse", r.lambda_coarse);
        row("extrapolated", r.lambda);
        worst = std::max(worst, std::abs(r.lambda.mean - lam) / r.lambda.std_error);
    }
    out.measured["abs_z"] = worst;
    return out;
}

// ---------------------------------------------------------------------------

ParamSpec orders(Json def) { return {"a", ParamKind::OrderList, std::move(def), "order parameter(s) a in (0, 1)"}; }
ParamSpec basis(std::size_t n) { return {"N", ParamKind::Count, n, "basis size", {}, 200}; }
ParamSpec paths() { return {"paths", ParamKind::Count, 100000, "Monte Carlo paths", {}, 100000000}; }

std::vector<Experiment> build_registry() {
    using enum ParamKind;
    using enum Comparison;
    std::vector<Experiment> r{
        {"boundary-regularity",
         "boundary exponents and Hölder cap of the leading eigenfunctions",
         {orders({0.25, 0.5, 0.75}), basis(60), {"count", Count, 3, "eigenpairs per order", {}, 100}},
         {{"max_exponent_deviation", 0.02, AtMost, "max |exponent - a|"},
          {"cap_misses", 0, AtMost, "eigenfunctions where the detector at a + 0.1 stays quiet"},
          {"control_alarms", 0, AtMost, "eigenfunctions where the detector fires below a"}},
         boundary_regularity_run},
        {"cross-validate",
         "multiplier form against singular-integral form on a Gaussian",
         {orders({0.1, 0.25, 0.5, 0.75, 0.9}),
          {"half_width", Positive, 8.0, "sample box is [-half_width, half_width]"},
          {"points", Count, 1025, "grid points", {}, 1 << 20}},
         {{"max_relative_discrepancy", 1e-3, AtMost, "relative to max |multiplier|"}},
         cross_validate_run},
        {"eigenvalues",
         "Galerkin eigenvalues and their stability under basis refinement",
         {orders(0.5), {"sizes", CountList, {60, 80}, "basis sizes", {}, 200},
          {"count", Count, 3, "eigenpairs", {}, 100}},
         {{"max_size_change", 1e-4, AtMost, "relative change of λ₁ between successive sizes"},
          {"unconverged", 0, AtMost, "pairs failing the refinement test"}},
         eigenvalues_run},
        {"greens",
         "reduced Green's formula on random pairs of basis functions",
         {orders(0.5), basis(20), {"pairs", Count, 20, "random (i, j) pairs", {}, 10000}},
         {{"max_relative", 1e-5, AtMost, "|∫(Pu v - u Pv)| / (‖u‖ ‖v‖)"}},
         greens_run},
        {"halfline-solve",
         "model Dirichlet problem on the half-line: forward-then-solve round trip of x^a e^{-x}",
         {orders({0.25, 0.5, 0.75}), {"log2_points", Count, 20, "log2 of the grid size", {}, 24},
          {"cells_per_unit", Positive, 16384.0, "grid cells per unit length"},
          {"forcing_cutoff", Positive, 24.0, "forward image is set to 0 beyond this x"}},
         {{"max_roundtrip_error", 1e-4, AtMost, "on [0.1, 3], relative"},
          {"max_residual", 1e-3, AtMost, "solution residual"},
          {"max_exponent_deviation", 0.02, AtMost, "boundary exponent against a"}},
         halfline_solve_run},
        {"heat-boundary",
         "boundary exponent of heat solutions over time",
         {orders(0.5), basis(40), {"T", Positive, 2.0, "final time"}, {"dt", Positive, 0.01, "time step"},
          {"initial", Choice, "eigenfunction", "initial data", {"eigenfunction", "torsion"}}},
         {{"max_exponent_deviation", 0.03, AtMost, "max |exponent - a| over t ≥ T/10"},
          {"flagged", 0, AtMost, "probe times without a power-law fit"}},
         heat_boundary_run},
        {"heat-convergence",
         "implicit Euler against the eigen-exact solution, torsion initial data",
         {orders(0.5), basis(40), {"T", Positive, 1.0, "final time"},
          {"dt", PositiveList, {0.02, 0.01, 0.005, 0.0025, 0.00125}, "time steps, coarse to fine"}},
         {{"min_ratio", 1.8, AtLeast, "smallest error ratio between successive steps"},
          {"max_ratio", 2.2, AtMost, "largest error ratio"}},
         heat_convergence_run},
        {"heat-decay",
         "eigen-exact evolution of the principal eigenfunction",
         {orders(0.5), basis(40), {"T", Positive, 2.0, "final time"}, {"dt", Positive, 0.01, "time step"}},
         {{"max_coefficient_error", 1e-10, AtMost, "against e^{-λ₁ t} φ₁, relative"}},
         heat_decay_run},
        {"ibp",
         "integration-by-parts identity on solution pairs",
         {orders(0.5), basis(20)},
         {{"ratio_spread", 0.02, AtMost, "(max - min) / |mean| of L/R"},
          {"symmetric_residual", 1e-6, AtMost, "max(|L|, |R|) for the even pair"}},
         ibp_run},
        {"mc-eigenvalue",
         "principal eigenvalue from killed-process survival against the spectral value",
         {orders(0.5), basis(60), paths(), {"dt", Positive, 1e-3, "step"}, {"t1", Positive, 2.0, "window start"},
          {"t2", Positive, 4.0, "window end"}},
         {{"abs_z", 3.0, AtMost, "|λ_MC - λ₁| / σ"}},
         mc_eigenvalue_run},
        {"mc-free",
         "free-space Feynman–Kac on cos(ωx) against e^{-t|ω|^{2a}} cos(ωx)",
         {orders({0.25, 0.5, 0.75}), {"omega", PositiveList, {1.0, 2.0}, "frequencies"},
          {"t", PositiveList, {0.25, 1.0}, "times"}, {"x", Real, 0.0, "evaluation point"}, paths()},
         {{"max_abs_z", 3.0, AtMost, "max |mean - exact| / σ"}},
         mc_free_run},
        {"mc-killed",
         "killed Feynman–Kac on φ₁ against the spectral heat solution",
         {orders(0.5), basis(60), paths(), {"dt", Positive, 1e-3, "finest step"}, {"x", Real, 0.0, "start point"},
          {"t", Positive, 1.0, "time"}, {"levels", Count, 2, "monitoring levels", {}, 8}},
         {{"abs_z", 3.0, AtMost, "|extrapolated - spectral| / σ"}},
         mc_killed_run},
        {"normalization",
         "kernel constant fitted so that both operator forms agree",
         {orders({0.25, 0.5, 0.75})},
         {{"max_mismatch", 1e-4, AtMost, "relative mismatch at the probes"}},
         normalization_run},
        {"reducer-contract",
         "support preservation and inverse-pair round trips of the order reducers",
         {orders({0.25, 0.5, 0.75}), {"log2_points", Count, 18, "log2 of the grid size", {}, 24},
          {"cells_per_unit", Positive, 4096.0, "grid cells per unit length"}},
         {{"max_leakage", 1e-6, AtMost, "relative mass on the wrong side"},
          {"max_roundtrip_error", 1e-6, AtMost, "outside a 2h collar, relative"}},
         reducer_contract_run},
        {"smoothness-cap",
         "Hölder cap of e^{-λ₁ t} φ₁ at the boundary, with a smooth control",
         {orders({0.25, 0.5}), basis(60), {"t", Positive, 1.0, "time"}},
         {{"cap_misses", 0, AtMost, "orders where the detector stays quiet"},
          {"control_alarms", 0, AtMost, "orders where the control fires"}},
         smoothness_cap_run},
        {"time-regularity",
         "divided differences in time for smooth forcing φ₁ t⁴ e^{-t}",
         {orders(0.5), basis(40), {"T", Positive, 2.0, "final time"}, {"dt", Positive, 1e-3, "time step"},
          {"t0_fraction", Positive, 0.25, "probes start at t0_fraction · T"},
          {"max_order", Count, 4, "highest order", {}, 4}},
         {{"unbounded_orders", 0, AtMost, "orders that grow under refinement"}},
         time_regularity_run},
        {"torsion",
         "torsion problem: singular integral of the exact solution and the Galerkin solution",
         {orders(0.5), basis(40)},
         {{"max_pv_error", 1e-3, AtMost, "max |PV((-Δ)^a u_exact) - 1| on [-0.9, 0.9]"},
          {"center_error", 2e-3, AtMost, "relative error of the Galerkin u(0)"},
          {"max_residual", 1e-3, AtMost, "Galerkin residual"}},
         torsion_run},
    };
    std::sort(r.begin(), r.end(), [](const Experiment& x, const Experiment& y) { return x.name < y.name; });
    return r;
}

std::string kind_error(const ParamSpec& s) {
    switch (s.kind) {
        case ParamKind::Order:
        case ParamKind::OrderList: return "must be a number in (0, 1)";
        case ParamKind::Positive:
        case ParamKind::PositiveList: return "must be a positive number";
        case ParamKind::Real: return "must be a finite number";
        case ParamKind::Count:
        case ParamKind::CountList: return "must be an integer in [1, " + std::to_string(s.max_count) + "]";
        case ParamKind::Choice: {
            std::string m = "must be one of";
            for (const auto& c : s.choices) m += " '" + c + "'";
            return m;
        }
    }
    return "is invalid";
}

bool scalar_ok(const ParamSpec& s, const Json& v) {
    switch (s.kind) {
        case ParamKind::Order:
        case ParamKind::OrderList:
            return v.is_number() && v.get<double>() > 0.0 && v.get<double>() < 1.0;
        case ParamKind::Positive:
        case ParamKind::PositiveList:
            return v.is_number() && std::isfinite(v.get<double>()) && v.get<double>() > 0.0;
        case ParamKind::Real: return v.is_number() && std::isfinite(v.get<double>());
        case ParamKind::Count:
        case ParamKind::CountList:
            return v.is_number_integer() && v.get<I64>() >= 1 && v.get<I64>() <= s.max_count;
        case ParamKind::Choice:
            return v.is_string() && std::find(s.choices.begin(), s.choices.end(), v.get<std::string>()) != s.choices.end();
    }
    return false;
}

bool is_list(ParamKind k) { return k == ParamKind::OrderList || k == ParamKind::PositiveList || k == ParamKind::CountList; }

}  // namespace

const std::vector<Experiment>& registry() {
    static const std::vector<Experiment> r = build_registry();
    return r;
}

const Experiment* find_experiment(const std::string& name) {
    for (const auto& e : registry()) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

Json resolve_params(const Experiment& e, const Json& params) {
    if (!params.is_null() && !params.is_object()) throw ConfigError(e.name + ": params must be an object");
    Json out = Json::object();
    if (params.is_object()) {
        for (const auto& [key, value] : params.items()) {
            const auto it = std::find_if(e.params.begin(), e.params.end(), [&](const ParamSpec& s) { return s.name == key; });
            if (it == e.params.end()) throw ConfigError(e.name + ": unknown parameter '" + key + "'");
            const bool ok = is_list(it->kind) && value.is_array()
                                ? !value.empty() && std::all_of(value.begin(), value.end(),
                                                               [&](const Json& v) { return scalar_ok(*it, v); })
                                : scalar_ok(*it, value);
            if (!ok) throw ConfigError(e.name + ": parameter '" + key + "' " + kind_error(*it));
            out[key] = value;
        }
    }
    for (const auto& s : e.params) {
        if (!out.contains(s.name)) out[s.name] = s.default_value;
    }
    return out;
}

std::map<std::string, double> resolve_gates(const Experiment& e, const Json& acceptance) {
    if (!acceptance.is_null() && !acceptance.is_object()) throw ConfigError(e.name + ": acceptance must be an object");
    std::map<std::string, double> out;
    for (const auto& g : e.gates) out[g.name] = g.threshold;
    if (acceptance.is_object()) {
        for (const auto& [key, value] : acceptance.items()) {
            if (!out.contains(key)) throw ConfigError(e.name + ": unknown acceptance gate '" + key + "'");
            if (!value.is_number() || !std::isfinite(value.get<double>())) {
                throw ConfigError(e.name + ": acceptance gate '" + key + "' must be a finite number");
            }
            out[key] = value.get<double>();
        }
    }
    return out;
}

bool gate_passes(Comparison c, double measured, double threshold) {
    if (std::isnan(measured)) return false;
    return c == Comparison::AtMost ? measured <= threshold : measured >= threshold;
}

}  // namespace fraclab::tools
