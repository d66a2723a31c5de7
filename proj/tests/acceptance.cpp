// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only if all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <fraclab/dirichlet.hpp>
#include <fraclab/halfspace.hpp>
#include <fraclab/heat.hpp>
#include <fraclab/levy.hpp>
#include <fraclab/operators.hpp>
#include <fraclab/symbols.hpp>

using namespace fraclab;

namespace {

struct Outcome {
    bool passed = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        passed = passed && ok;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [x]");
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::size_t threads() { return std::max(1u, std::thread::hardware_concurrency()); }

AssemblyOptions assembly() {
    AssemblyOptions o;
    o.threads = threads();
    return o;
}

std::shared_ptr<const DirichletSystem> system(double a, std::size_t n) {
    return std::make_shared<const DirichletSystem>(assemble(FractionalOrder(a), n, assembly()));
}

StableConfig stable(double a) {
    StableConfig c;
    c.a = FractionalOrder(a);
    c.n_paths = 100000;
    c.dt = 1e-3;
    c.seed = 1;
    c.threads = threads();
    return c;
}

int failures = 0;

void criterion(int id, const char* title, double budget_seconds, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.passed = false;
        o.detail += std::string(o.detail.empty() ? "" : "; ") + "exception: " + e.what();
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(s < budget_seconds, fmt("%.1f s", s) + fmt(" (budget %.0f s)", budget_seconds));
    if (!o.passed) ++failures;
    std::printf("%s  criterion %2d  %s: %s\n", o.passed ? "PASS" : "FAIL", id, title, o.detail.c_str());
    std::fflush(stdout);
}

}  // namespace

int main() {
    criterion(1, "multiplier-kernel equivalence", 10.0, [](Outcome& o) {
        const auto grid = UniformGrid1D::make(-8.0, 8.0, 1025);
        const auto u = SampledFunction::sample(grid, [](double x) { return std::exp(-x * x); });
        double worst = 0.0;
        bool all = true;
        for (double a : {0.1, 0.25, 0.5, 0.75, 0.9}) {
            const auto r = cross_validate(FractionalOrder(a), u, 1e-3);
            all = all && r.passed;
            worst = std::max(worst, r.max_relative_discrepancy);
        }
        o.require(all && worst <= 1e-3, fmt("max discrepancy %.2e <= 1e-3", worst));
    });

    criterion(2, "normalization constant", 5.0, [](Outcome& o) {
        const double c = estimate_normalization(FractionalOrder(0.5)).constant;
        o.require(c >= 0.3181 && c <= 0.3185, fmt("c(0.5) = %.10f in [0.3181, 0.3185]", c));
    });

    criterion(3, "order-reducer contract", 10.0, [](Outcome& o) {
        const auto grid = half_line_grid(18, 4096.0);
        const std::size_t i0 = origin_index(grid);
        const auto bump = [](double x) { return x * x * std::exp(-x * x); };
        const auto plus = SampledFunction::sample(grid, [&](double x) { return x >= 0.0 ? bump(x) : 0.0; });
        const auto minus = SampledFunction::sample(grid, [&](double x) { return x <= 0.0 ? bump(-x) : 0.0; });
        double leak = 0.0, trip = 0.0;
        for (double a : {0.25, 0.5, 0.75}) {
            for (double t : {a, -a, a + 1.0, -(a + 1.0)}) {
                for (auto sign : {ReducerSign::Plus, ReducerSign::Minus}) {
                    const auto& u = sign == ReducerSign::Plus ? plus : minus;
                    const auto fwd = xi_apply(sign, t, u);
                    const auto back = xi_apply(sign, -t, fwd.value);
                    double err = 0.0;
                    for (std::size_t i = 0; i < grid.n; ++i) {
                        if (i + 2 >= i0 && i <= i0 + 2) continue;
                        err = std::max(err, std::abs(back.value[i] - u[i]));
                    }
                    leak = std::max({leak, fwd.leakage, back.leakage});
                    trip = std::max(trip, err / u.max_abs());
                }
            }
        }
        o.require(leak <= 1e-6, fmt("leakage %.2e <= 1e-6", leak));
        o.require(trip <= 1e-6, fmt("round trip %.2e <= 1e-6", trip));
    });

    criterion(4, "model Dirichlet solver", 10.0, [](Outcome& o) {
        const auto grid = half_line_grid(20, 16384.0);
        double trip = 0.0, res = 0.0, dev = 0.0;
        for (double a : {0.25, 0.5, 0.75}) {
            const FractionalOrder order(a);
            const auto u = sample_half_line(grid, [a](double x) { return std::pow(x, a) * std::exp(-x); });
            const auto pu = apply_model_operator(order, u);
            std::vector<Complex> fv(pu.values().begin(), pu.values().end());
            for (std::size_t i = 0; i < grid.n; ++i) {
                if (grid.x(i) > 24.0) fv[i] = 0.0;
            }
            const auto sol = solve_model_dirichlet(order, HalfLineFunction{SampledFunction(grid, std::move(fv)), SupportSide::Plus, 0.0});
            double err = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < grid.n; ++i) {
                const double x = grid.x(i);
                if (x < 0.1 || x > 3.0) continue;
                err = std::max(err, std::abs(sol.u.sample[i] - u.sample[i]));
                scale = std::max(scale, std::abs(u.sample[i]));
            }
            trip = std::max(trip, err / scale);
            res = std::max(res, sol.residual);
            dev = std::max(dev, std::abs(decompose_transmission(sol.u, order).boundary_fit.exponent - a));
        }
        o.require(trip <= 1e-4, fmt("round trip %.2e <= 1e-4", trip));
        o.require(res <= 1e-3, fmt("residual %.2e <= 1e-3", res));
        o.require(dev <= 0.02, fmt("exponent deviation %.4f <= 0.02", dev));
    });

    criterion(5, "torsion identity", 30.0, [](Outcome& o) {
        std::vector<double> xs;
        for (int i = -36; i <= 36; ++i) xs.push_back(0.025 * i);
        const auto pv = apply_pv_integral(fractional_laplacian_kernel(FractionalOrder(0.5)),
                                          SupportedFunction{[](double x) { return std::sqrt(1.0 - x * x); }, -1, 1, {}}, xs);
        double worst = 0.0;
        for (double v : pv) worst = std::max(worst, std::abs(v - 1.0));
        o.require(worst <= 1e-3, fmt("max |PV - 1| %.2e <= 1e-3", worst));
        const auto sol = solve_stationary(*system(0.5, 40), [](double) { return 1.0; });
        o.require(std::abs(sol.u(0.0) - 1.0) <= 2e-3, fmt("u(0) = %.8f", sol.u(0.0)));
    });

    criterion(6, "eigenvalue stability and Monte Carlo", 180.0, [](Outcome& o) {
        const auto s60 = system(0.5, 60);
        const auto e60 = eigen_solve(*s60, 3);
        const double l60 = e60.pairs.at(0).lambda;
        const double l80 = eigen_solve(*system(0.5, 80), 1).pairs.at(0).lambda;
        const double change = std::abs(l60 - l80) / l80;
        o.require(change <= 1e-4, fmt("lambda1 = %.10f", l80) + fmt(", N 60->80 change %.2e <= 1e-4", change));
        EigenvalueMcOptions opts;
        opts.gap = e60.pairs.at(2).lambda - l60;
        const auto t0 = std::chrono::steady_clock::now();
        const auto mc = principal_eigenvalue_mc(stable(0.5), {2.0, 4.0}, opts);
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double z = (mc.lambda.mean - l80) / mc.lambda.std_error;
        o.require(std::abs(z) <= 3.0, fmt("MC %.5f", mc.lambda.mean) + fmt(" +- %.5f", mc.lambda.std_error) + fmt(", z = %.2f", z));
        o.require(s < 120.0, fmt("MC %.1f s < 120 s", s));
    });

    criterion(7, "boundary regularity of eigenfunctions", 60.0, [](Outcome& o) {
        double dev = 0.0;
        int misses = 0, alarms = 0, checked = 0;
        for (double a : {0.25, 0.5, 0.75}) {
            const auto sys = system(a, 60);
            for (const auto& p : eigen_solve(*sys, 3).pairs) {
                const auto r = boundary_regularity_probe(expansion(*sys, p.coefficients));
                dev = std::max({dev, std::abs(r.fit[0].exponent - a), std::abs(r.fit[1].exponent - a)});
                misses += r.cap_fires() ? 0 : 1;
                alarms += r.control_quiet() ? 0 : 1;
                ++checked;
            }
        }
        o.require(checked >= 3, std::to_string(checked) + " eigenfunctions");
        o.require(dev <= 0.02, fmt("exponent deviation %.4f <= 0.02", dev));
        o.require(misses == 0, "cap detector fired on all (" + std::to_string(misses) + " misses)");
        o.require(alarms == 0, "control quiet (" + std::to_string(alarms) + " alarms)");
    });

    criterion(8, "integration-by-parts structure", 60.0, [](Outcome& o) {
        double spread = 0.0, sym = 0.0;
        for (double a : {0.25, 0.5, 0.75}) {
            const auto sys = system(a, 24);
            const auto solve = [&](const std::function<double(double)>& f) { return solve_stationary(*sys, f).u; };
            const auto u1 = solve([](double x) { return 1.0 + x; });
            const auto u2 = solve([](double x) { return std::exp(x); });
            const auto u3 = solve([](double x) { return (1.0 + x) * (1.0 + x); });
            const auto u4 = solve([](double x) { return std::cos(x) + 0.5 * x; });
            const auto even = solve([](double) { return 1.0; });
            const auto odd = solve([](double x) { return x; });
            const std::vector<IbpPair> pairs{{u1, u2}, {u1, u3}, {u2, u4}, {u3, u4}, {even, odd}, {even, even}};
            const auto r = ibp_identity_check(sys->report.kernel_constant, pairs);
            spread = std::max(spread, r.spread);
            sym = std::max({sym, std::abs(r.pairs.back().lhs), std::abs(r.pairs.back().rhs)});
        }
        o.require(spread <= 0.02, fmt("ratio spread %.2e <= 0.02", spread));
        o.require(sym <= 1e-6, fmt("symmetric pair |L|, |R| %.2e <= 1e-6", sym));
    });

    criterion(9, "reduced Green's formula", 30.0, [](Outcome& o) {
        const std::size_t n = 40;
        const auto sys = system(0.5, n);
        std::mt19937_64 rng(2024);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        double worst = 0.0;
        for (int q = 0; q < 20; ++q) {
            Eigen::VectorXd cu = Eigen::VectorXd::Zero(n), cv = Eigen::VectorXd::Zero(n);
            cu[static_cast<Eigen::Index>(pick(rng))] = 1.0;
            cv[static_cast<Eigen::Index>(pick(rng))] = 1.0;
            worst = std::max(worst, greens_reduced_check(sys->report.kernel_constant, expansion(*sys, cu), expansion(*sys, cv)).relative);
        }
        o.require(worst <= 1e-5, fmt("max relative %.2e <= 1e-5", worst));
    });

    criterion(10, "heat solvability and regularity", 120.0, [](Outcome& o) {
        const auto sys = system(0.5, 40);
        const auto p = eigen_solve(*sys, 1).pairs.at(0);
        HeatConfig cfg;
        cfg.system = sys;
        cfg.T = 2.0;
        cfg.dt = 0.01;
        const auto tr = evolve(cfg, p.coefficients);
        double err = 0.0;
        for (std::size_t i = 0; i < tr.times.size(); ++i) {
            const Eigen::VectorXd exact = std::exp(-p.lambda * tr.times[i]) * p.coefficients;
            err = std::max(err, (tr.states[i] - exact).cwiseAbs().maxCoeff() / p.coefficients.cwiseAbs().maxCoeff());
        }
        o.require(err <= 1e-10, fmt("eigen trajectory %.2e <= 1e-10", err));

        const Eigen::VectorXd torsion = solve_stationary(*sys, [](double) { return 1.0; }).u.coefficients;
        HeatConfig ref = cfg;
        ref.T = 1.0;
        ref.dt = 1.0;
        const Eigen::VectorXd exact = evolve(ref, torsion).states.back();
        double previous = 0.0, lo = 1e300, hi = 0.0;
        for (double dt : {0.02, 0.01, 0.005, 0.0025, 0.00125}) {
            HeatConfig ie = ref;
            ie.dt = dt;
            ie.scheme = HeatScheme::ImplicitEuler;
            const double e = (evolve(ie, torsion).states.back() - exact).cwiseAbs().maxCoeff();
            if (previous > 0.0) {
                lo = std::min(lo, previous / e);
                hi = std::max(hi, previous / e);
            }
            previous = e;
        }
        o.require(lo >= 1.8 && hi <= 2.2, fmt("Euler ratios [%.3f", lo) + fmt(", %.3f] in [1.8, 2.2]", hi));

        double dev = 0.0;
        for (double a : {0.25, 0.5}) {
            const auto s = system(a, 60);
            HeatConfig hc;
            hc.system = s;
            hc.T = 2.0;
            hc.dt = 0.1;
            const Eigen::VectorXd u0 = a == 0.5 ? eigen_solve(*s, 1).pairs.at(0).coefficients
                                                : solve_stationary(*s, [](double) { return 1.0; }).u.coefficients;
            const auto r = boundary_exponent_in_time(evolve(hc, u0));
            bool flagged = false;
            for (bool f : r.flagged) flagged = flagged || f;
            dev = std::max(dev, flagged ? 1.0 : r.max_deviation);
        }
        o.require(dev <= 0.03, fmt("boundary exponent deviation in time %.4f <= 0.03", dev));

        bool caps = true;
        for (double a : {0.25, 0.5}) {
            const auto r = smoothness_cap_demo(FractionalOrder(a));
            caps = caps && r.cap_fires() && !r.control_fires();
        }
        o.require(caps, "smoothness cap fires for a = 0.25, 0.5, control quiet");

        HeatConfig fc = cfg;
        fc.dt = 1e-3;
        const Eigen::VectorXd phi = p.coefficients;
        const auto forced = evolve(fc, Eigen::VectorXd::Zero(phi.size()),
                                   [&phi](double t) -> Eigen::VectorXd { return phi * (std::pow(t, 4) * std::exp(-t)); });
        TimeRegularityOptions to;
        to.t0_fraction = 0.25;
        int bounded = 0;
        for (int k = 1; k <= 4; ++k) bounded += time_regularity_probe(forced, k, to).bounded ? 1 : 0;
        o.require(bounded == 4, "time differences bounded for orders 1-4 (" + std::to_string(bounded) + "/4)");
    });

    criterion(11, "Feynman-Kac agreement", 180.0, [](Outcome& o) {
        const auto sys = system(0.5, 60);
        const auto p = eigen_solve(*sys, 1).pairs.at(0);
        const BasisExpansion phi = expansion(*sys, p.coefficients);
        const double spectral = std::exp(-p.lambda) * phi(0.0);
        const auto k = feynman_kac_killed(stable(0.5), [&phi](double y) { return phi(y); }, 0.0, 1.0, 2);
        const double z = (k.extrapolated.mean - spectral) / k.extrapolated.std_error;
        o.require(std::abs(z) <= 3.0, fmt("killed %.5f", k.extrapolated.mean) + fmt(" vs spectral %.5f", spectral) +
                                          fmt(", z = %.2f", z));
        double worst = 0.0;
        for (double a : {0.25, 0.5, 0.75}) {
            for (double w : {1.0, 2.0}) {
                for (double t : {0.25, 1.0}) {
                    const auto m = feynman_kac_free(stable(a), [w](double y) { return std::cos(w * y); }, 0.0, t);
                    worst = std::max(worst, std::abs(m.mean - std::exp(-t * std::pow(w, 2 * a))) / m.std_error);
                }
            }
        }
        o.require(worst <= 3.0, fmt("free-space max |z| %.2f <= 3", worst));
    });

    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
