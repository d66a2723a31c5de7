#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>

#include <fraclab/dirichlet.hpp>
#include <fraclab/error.hpp>
#include <fraclab/levy.hpp>

using namespace fraclab;

namespace {

std::vector<double> draws(double a, double dt, std::size_t n, std::uint64_t seed) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        CounterRng rng(seed, i);
        v[i] = sample_increment(FractionalOrder(a), dt, rng);
    }
    return v;
}

// Two-sample Kolmogorov–Smirnov statistic.
double ks_statistic(std::vector<double> x, std::vector<double> y) {
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] <= v) ++i;
        while (j < y.size() && y[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / x.size() - static_cast<double>(j) / y.size()));
    }
    return d;
}

StableConfig config(double a, std::size_t paths, double dt = 1e-3, std::uint64_t seed = 1) {
    StableConfig c;
    c.a = FractionalOrder(a);
    c.n_paths = paths;
    c.dt = dt;
    c.seed = seed;
    return c;
}

struct Reference {
    std::shared_ptr<DirichletSystem> sys;
    std::vector<EigenPair> pairs;
};

const Reference& reference(double a) {
    static std::map<double, Reference> cache;
    auto& r = cache[a];
    if (!r.sys) {
        r.sys = std::make_shared<DirichletSystem>(assemble(FractionalOrder(a), 60));
        r.pairs = eigen_solve(*r.sys, 3).pairs;
    }
    return r;
}

}  // namespace

TEST_CASE("counter generator") {
    CounterRng a(5, 7), b(5, 7), c(5, 8), d(6, 7);
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        CHECK(x == b());
        CHECK(x != c());
        CHECK(x != d());
    }
    CounterRng u(1, 0);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = u.uniform_open0();
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        sum += x;
    }
    CHECK(lo > 0.0);
    CHECK(hi <= 1.0);
    CHECK(std::abs(sum / n - 0.5) <= 3.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("stable increments: symmetry, characteristic function and self-similarity") {
    SUBCASE("median is zero") {
        const auto v = draws(0.5, 0.1, 1000000, 3);
        const auto pos = static_cast<double>(std::count_if(v.begin(), v.end(), [](double x) { return x > 0.0; }));
        // The sign count is binomial(n, 1/2) under symmetry.
        CHECK(std::abs(pos - 500000.0) <= 3.0 * std::sqrt(1000000.0) / 2.0);
    }
    SUBCASE("characteristic function") {
        for (double a : {0.25, 0.5, 0.75}) {
            const auto v = draws(a, 0.1, 200000, 9);
            for (double theta : {0.5, 1.0, 2.0}) {
                std::vector<double> c(v.size());
                for (std::size_t i = 0; i < v.size(); ++i) c[i] = std::cos(theta * v[i]);
                double m = 0.0, q = 0.0;
                for (double x : c) m += x;
                m /= c.size();
                for (double x : c) q += (x - m) * (x - m);
                const double se = std::sqrt(q / (c.size() - 1) / c.size());
                CHECK(std::abs(m - std::exp(-0.1 * std::pow(theta, 2 * a))) <= 3.0 * se);
            }
        }
    }
    SUBCASE("X_dt has the law of dt^{1/(2a)} X_1") {
        for (double a : {0.25, 0.5, 0.75}) {
            const std::size_t n = 20000;
            auto x = draws(a, 0.1, n, 21);
            auto y = draws(a, 1.0, n, 22);
            for (double& v : y) v *= std::pow(0.1, 1.0 / (2 * a));
            // Critical value at the 1% level.
            CHECK(ks_statistic(x, y) <= 1.628 * std::sqrt(2.0 / n));
        }
    }
}

TEST_CASE("free-space Feynman–Kac") {
    CHECK(feynman_kac_free(config(0.5, 1000), [](double y) { return std::cos(y); }, 0.3, 0.0).mean == std::cos(0.3));
    const auto one = feynman_kac_free(config(0.5, 1000), [](double) { return 1.0; }, 0.0, 1.0);
    CHECK(one.mean == 1.0);
    CHECK(one.std_error == 0.0);
    const auto e = feynman_kac_free(config(0.5, 100000), [](double y) { return std::cos(2 * y); }, 0.0, 0.5);
    CHECK(e.agrees_with(std::exp(-1.0)));
    CHECK(e.n_effective == 100000);
    for (double a : {0.25, 0.5, 0.75}) {
        for (double w : {1.0, 2.0}) {
            for (double t : {0.25, 1.0}) {
                const auto m = feynman_kac_free(config(a, 50000, 1e-3, 4), [w](double y) { return std::cos(w * y); }, 0.4, t);
                CHECK(m.agrees_with(std::exp(-t * std::pow(w, 2 * a)) * std::cos(0.4 * w)));
            }
        }
    }
    CHECK_THROWS_AS(feynman_kac_free(config(0.5, 999), [](double) { return 1.0; }, 0.0, 1.0), InvalidArgument);
}

TEST_CASE("results do not depend on the thread count") {
    auto c1 = config(0.5, 4000, 5e-3, 17), c4 = c1;
    c4.threads = 4;
    const auto f = [](double y) { return std::exp(-y * y); };
    const auto a1 = feynman_kac_free(c1, f, 0.1, 0.5), a4 = feynman_kac_free(c4, f, 0.1, 0.5);
    CHECK(a1.mean == a4.mean);
    CHECK(a1.std_error == a4.std_error);
    const auto k1 = feynman_kac_killed(c1, f, 0.1, 0.5, 3), k4 = feynman_kac_killed(c4, f, 0.1, 0.5, 3);
    CHECK(k1.extrapolated.mean == k4.extrapolated.mean);
    for (std::size_t l = 0; l < 3; ++l) CHECK(k1.levels[l].mean == k4.levels[l].mean);
    const auto e1 = principal_eigenvalue_mc(c1, {0.5, 1.0}), e4 = principal_eigenvalue_mc(c4, {0.5, 1.0});
    CHECK(e1.lambda.mean == e4.lambda.mean);
    CHECK(e1.survival_curve == e4.survival_curve);
}

TEST_CASE("killed Feynman–Kac") {
    const auto f = [](double y) { return std::abs(y) < 1.0 ? 1.0 - y * y : 0.0; };
    SUBCASE("t = 0 returns the data") {
        const auto k = feynman_kac_killed(config(0.5, 1000), f, 0.2, 0.0);
        CHECK(k.extrapolated.mean == f(0.2));
        CHECK(k.extrapolated.std_error == 0.0);
    }
    SUBCASE("killed does not exceed free") {
        for (double x : {-0.5, 0.0, 0.7}) {
            const auto cfg = config(0.5, 20000, 2e-3, 5);
            const auto k = feynman_kac_killed(cfg, f, x, 0.5);
            const auto fr = feynman_kac_free(cfg, f, x, 0.5);
            for (const auto& l : k.levels) CHECK(l.mean <= fr.mean + 3.0 * fr.std_error);
        }
    }
    SUBCASE("the estimate vanishes at the boundary") {
        const auto cfg = config(0.5, 20000, 2e-3, 6);
        double previous = 1.0;
        for (double x : {0.9, 0.99, 0.999}) {
            const double m = feynman_kac_killed(cfg, [](double) { return 1.0; }, x, 0.2).levels[0].mean;
            CHECK(m < previous);
            previous = m;
        }
        CHECK(previous < 0.1);
    }
    SUBCASE("agreement with the spectral heat solution") {
        const auto& ref = reference(0.5);
        const auto& p = ref.pairs.front();
        const BasisExpansion phi = expansion(*ref.sys, p.coefficients);
        const double spectral = std::exp(-p.lambda) * phi(0.0);
        const auto k = feynman_kac_killed(config(0.5, 40000, 1e-3, 8), [&](double y) { return phi(y); }, 0.0, 1.0, 3);
        CHECK(k.extrapolated.agrees_with(spectral));
        CHECK(k.bias_estimate > 0.0);
        CHECK(k.level_dt[2] == doctest::Approx(4e-3));
    }
    SUBCASE("rejections") {
        CHECK_THROWS_AS(feynman_kac_killed(config(0.5, 1000, 0.02), f, 0.0, 1.0), InvalidArgument);
        CHECK_THROWS_AS(feynman_kac_killed(config(0.5, 1000), f, 1.0, 1.0), InvalidArgument);
        CHECK_THROWS_AS(feynman_kac_killed(config(0.5, 1000), f, 0.0, 1.0, 1), InvalidArgument);
        CHECK_THROWS_AS(feynman_kac_killed(config(0.5, 1000), f, 0.0, 0.0015), InvalidArgument);
    }
}

TEST_CASE("principal eigenvalue from survival") {
    for (double a : {0.25, 0.5}) {
        CAPTURE(a);
        const auto& ref = reference(a);
        REQUIRE(ref.pairs.size() == 3);
        EigenvalueMcOptions o;
        o.gap = ref.pairs[2].lambda - ref.pairs[0].lambda;
        const auto r = principal_eigenvalue_mc(config(a, 50000, 2e-3, 12), {2.0, 4.0}, o);
        CHECK(r.lambda.agrees_with(ref.pairs[0].lambda));
        CHECK(r.survival_t1.mean > r.survival_t2.mean);
        for (std::size_t i = 1; i < r.survival_curve.size(); ++i) CHECK(r.survival_curve[i] <= r.survival_curve[i - 1]);
        CHECK(r.survival_curve_times.back() == doctest::Approx(4.0));
    }
    const auto cfg = config(0.5, 1000, 1e-2);
    CHECK_THROWS_AS(principal_eigenvalue_mc(cfg, {1.0, 1.5}), InvalidArgument);
    EigenvalueMcOptions gap;
    gap.gap = 1.0;
    CHECK_THROWS_AS(principal_eigenvalue_mc(cfg, {0.5, 1.0}, gap), InvalidArgument);
    CHECK_THROWS_AS(principal_eigenvalue_mc(cfg, {5.0, 10.0}), ConvergenceError);
}
