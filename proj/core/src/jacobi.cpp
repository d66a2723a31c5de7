#include "fraclab/jacobi.hpp"

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "fraclab/error.hpp"

namespace fraclab {

void jacobi_values(double x, double alpha, double beta, std::span<double> out) {
    const std::size_t m = out.size();
    if (m == 0) return;
    out[0] = 1.0;
    if (m == 1) return;
    out[1] = 0.5 * (alpha - beta + (alpha + beta + 2.0) * x);
    const double ab = alpha + beta;
    const double ab2 = alpha * alpha - beta * beta;
    for (std::size_t k = 2; k < m; ++k) {
        const double kk = static_cast<double>(k);
        const double s = 2.0 * kk + ab;
        const double c1 = 2.0 * kk * (kk + ab) * (s - 2.0);
        const double c2 = (s - 1.0) * (s * (s - 2.0) * x + ab2);
        const double c3 = 2.0 * (kk + alpha - 1.0) * (kk + beta - 1.0) * s;
        out[k] = (c2 * out[k - 1] - c3 * out[k - 2]) / c1;
    }
}

void jacobi_values_and_derivatives(double x, double alpha, double beta,
                                   std::span<double> values, std::span<double> derivatives) {
    if (values.size() != derivatives.size()) {
        throw InvalidArgument("jacobi_values_and_derivatives: span sizes differ");
    }
    const std::size_t m = values.size();
    jacobi_values(x, alpha, beta, values);
    if (m == 0) return;
    // d/dx P_k^{(a,b)} = (k + a + b + 1)/2 · P_{k-1}^{(a+1,b+1)}
    derivatives[0] = 0.0;
    if (m == 1) return;
    jacobi_values(x, alpha + 1.0, beta + 1.0, derivatives.subspan(0, m - 1));
    for (std::size_t k = m - 1; k >= 1; --k) {
        derivatives[k] = 0.5 * (static_cast<double>(k) + alpha + beta + 1.0) * derivatives[k - 1];
    }
    derivatives[0] = 0.0;
}

double jacobi_norm_squared(std::size_t k, double alpha, double beta) {
    const double kk = static_cast<double>(k);
    const double ab = alpha + beta;
    using boost::math::lgamma;
    if (k == 0) {
        return std::exp((ab + 1.0) * std::log(2.0) + lgamma(alpha + 1.0) + lgamma(beta + 1.0) -
                        lgamma(ab + 2.0));
    }
    const double log_h = (ab + 1.0) * std::log(2.0) - std::log(2.0 * kk + ab + 1.0) +
                         lgamma(kk + alpha + 1.0) + lgamma(kk + beta + 1.0) -
                         lgamma(kk + ab + 1.0) - lgamma(kk + 1.0);
    return std::exp(log_h);
}

}  // namespace fraclab
