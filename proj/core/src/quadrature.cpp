#include "fraclab/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/gamma.hpp>

#include "fraclab/error.hpp"

namespace fraclab {

namespace {

// Newton polish of a Gauss–Jacobi node on the three-term recurrence; returns
// (P_n(x), P_n'(x)) for weight parameters (alpha, beta).
std::pair<double, double> jacobi_pn(std::size_t n, double alpha, double beta, double x) {
    double p0 = 1.0;
    double p1 = 0.5 * (alpha - beta + (alpha + beta + 2.0) * x);
    if (n == 0) return {1.0, 0.0};
    for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double s = 2.0 * kk + alpha + beta;
        const double c1 = 2.0 * kk * (kk + alpha + beta) * (s - 2.0);
        const double c2 = (s - 1.0) * (s * (s - 2.0) * x + alpha * alpha - beta * beta);
        const double c3 = 2.0 * (kk + alpha - 1.0) * (kk + beta - 1.0) * s;
        const double p2 = (c2 * p1 - c3 * p0) / c1;
        p0 = p1;
        p1 = p2;
    }
    // P_n' via (2n+a+b)(1-x^2) P_n' = n[(a-b) - (2n+a+b)x] P_n + 2(n+a)(n+b) P_{n-1}
    const double nn = static_cast<double>(n);
    const double s = 2.0 * nn + alpha + beta;
    const double dp = (nn * ((alpha - beta) - s * x) * p1 + 2.0 * (nn + alpha) * (nn + beta) * p0) /
                      (s * (1.0 - x * x));
    return {p1, dp};
}

}  // namespace

QuadratureRule gauss_jacobi(std::size_t n, double alpha, double beta) {
    if (n == 0) throw InvalidArgument("gauss_jacobi: n must be positive");
    if (!(alpha > -1.0) || !(beta > -1.0)) {
        throw InvalidArgument("gauss_jacobi: requires alpha, beta > -1");
    }
    // Golub–Welsch on the symmetric Jacobi matrix of the monic recurrence.
    Eigen::VectorXd diag(n), sub(n > 1 ? n - 1 : 1);
    const double ab = alpha + beta;
    for (std::size_t k = 0; k < n; ++k) {
        const double kk = static_cast<double>(k);
        const double s = 2.0 * kk + ab;
        diag(k) = (k == 0 && std::abs(ab + 2.0) > 0.0) ? (beta - alpha) / (ab + 2.0)
                                                       : (beta * beta - alpha * alpha) / (s * (s + 2.0));
        if (k + 1 < n) {
            const double k1 = kk + 1.0;
            const double s1 = 2.0 * k1 + ab;
            double ratio_sq;
            if (k == 0) {
                // first entry with the (1 + ab) factor cancelled; ab = -1 is admissible
                ratio_sq = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
            } else {
                const double num = 4.0 * k1 * (k1 + alpha) * (k1 + beta) * (k1 + ab);
                const double den = s1 * s1 * (s1 + 1.0) * (s1 - 1.0);
                ratio_sq = num / den;
            }
            sub(k) = std::sqrt(ratio_sq);
        }
    }
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + boost::math::lgamma(alpha + 1.0) +
                                boost::math::lgamma(beta + 1.0) - boost::math::lgamma(ab + 2.0));
    if (n == 1) {
        rule.nodes[0] = diag(0);
        rule.weights[0] = mu0;
        return rule;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
    for (std::size_t k = 0; k < n; ++k) {
        double x = solver.eigenvalues()(static_cast<Eigen::Index>(k));
        for (int it = 0; it < 3; ++it) {
            const auto [p, dp] = jacobi_pn(n, alpha, beta, x);
            if (dp == 0.0) break;
            const double step = p / dp;
            x -= step;
            if (std::abs(step) < 1e-16) break;
        }
        rule.nodes[k] = x;
        const double v = solver.eigenvectors()(0, static_cast<Eigen::Index>(k));
        rule.weights[k] = mu0 * v * v;
    }
    // weights from the derivative formula, stable for large n
    const double nn = static_cast<double>(n);
    const double log_c = (ab + 1.0) * std::log(2.0) + boost::math::lgamma(nn + alpha + 1.0) +
                         boost::math::lgamma(nn + beta + 1.0) - boost::math::lgamma(nn + 1.0) -
                         boost::math::lgamma(nn + ab + 1.0);
    const double c = std::exp(log_c);
    bool ok = true;
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = rule.nodes[k];
        const auto [p, dp] = jacobi_pn(n, alpha, beta, x);
        (void)p;
        w[k] = c / ((1.0 - x * x) * dp * dp);
        if (!std::isfinite(w[k]) || w[k] <= 0.0) ok = false;
    }
    if (ok) rule.weights = std::move(w);
    return rule;
}

QuadratureRule gauss_legendre(std::size_t n) { return gauss_jacobi(n, 0.0, 0.0); }

std::vector<Panel> graded_panels(double lo, double hi, bool grade_lo, bool grade_hi,
                                 double ratio, std::size_t levels, double max_width) {
    std::vector<Panel> raw;
    if (!(hi > lo)) return raw;
    auto graded_toward_hi = [&](double a, double b, std::vector<Panel>& out) {
        // b - (b-a) r^k, k = 0..levels, then the remaining sliver
        double left = a;
        double len = b - a;
        for (std::size_t k = 1; k <= levels; ++k) {
            const double right = b - len * std::pow(ratio, static_cast<double>(k));
            out.push_back({left, right});
            left = right;
        }
        out.push_back({left, b});
    };
    auto graded_toward_lo = [&](double a, double b, std::vector<Panel>& out) {
        std::vector<Panel> tmp;
        const double len = b - a;
        double right = b;
        for (std::size_t k = 1; k <= levels; ++k) {
            const double left = a + len * std::pow(ratio, static_cast<double>(k));
            tmp.push_back({left, right});
            right = left;
        }
        tmp.push_back({a, right});
        out.insert(out.end(), tmp.rbegin(), tmp.rend());
    };
    if (grade_lo && grade_hi) {
        const double mid = 0.5 * (lo + hi);
        graded_toward_lo(lo, mid, raw);
        graded_toward_hi(mid, hi, raw);
    } else if (grade_lo) {
        graded_toward_lo(lo, hi, raw);
    } else if (grade_hi) {
        graded_toward_hi(lo, hi, raw);
    } else {
        raw.push_back({lo, hi});
    }
    std::vector<Panel> out;
    out.reserve(raw.size());
    for (const Panel& p : raw) {
        const double w = p.hi - p.lo;
        if (!(w > 0.0)) continue;
        const auto pieces = static_cast<std::size_t>(std::ceil(w / max_width));
        if (pieces <= 1) {
            out.push_back(p);
            continue;
        }
        for (std::size_t i = 0; i < pieces; ++i) {
            const double a = p.lo + w * static_cast<double>(i) / static_cast<double>(pieces);
            const double b = (i + 1 == pieces) ? p.hi : p.lo + w * static_cast<double>(i + 1) / static_cast<double>(pieces);
            out.push_back({a, b});
        }
    }
    return out;
}

std::vector<Panel> doubling_panels(double lo, double hi, double max_width) {
    std::vector<Panel> out;
    double a = lo;
    while (a < hi) {
        const double step = std::min(a, max_width);
        const double b = std::min(hi, a + step);
        // avoid a sliver at the end
        out.push_back({a, (hi - b < 0.25 * step) ? hi : b});
        a = out.back().hi;
    }
    return out;
}

}  // namespace fraclab
