#pragma once

#include <cstddef>
#include <vector>

namespace fraclab {

/// Nodes and weights on [-1, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss–Legendre rule.
QuadratureRule gauss_legendre(std::size_t n);

/// n-point Gauss–Jacobi rule for the weight (1 - x)^alpha (1 + x)^beta, alpha, beta > -1.
QuadratureRule gauss_jacobi(std::size_t n, double alpha, double beta);

struct Panel {
    double lo;
    double hi;
};

/// Panel layout for [lo, hi] with geometric grading toward the flagged ends
/// (ratio `ratio`, `levels` panels per graded end) and no panel wider than max_width.
std::vector<Panel> graded_panels(double lo, double hi, bool grade_lo, bool grade_hi,
                                 double ratio, std::size_t levels, double max_width);

/// Panels [lo, 2lo], [2lo, 4lo], ... up to hi (lo > 0), for integrands that
/// vary like a power of the abscissa.
std::vector<Panel> doubling_panels(double lo, double hi, double max_width);

/// Sum of rule-mapped integrals of f over panels.
template <class F>
double integrate(const F& f, const std::vector<Panel>& panels, const QuadratureRule& rule) {
    double total = 0.0;
    for (const Panel& p : panels) {
        const double mid = 0.5 * (p.lo + p.hi);
        const double half = 0.5 * (p.hi - p.lo);
        double s = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            s += rule.weights[q] * f(mid + half * rule.nodes[q]);
        }
        total += half * s;
    }
    return total;
}

}  // namespace fraclab
