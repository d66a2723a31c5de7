#pragma once

#include <cstddef>
#include <span>

namespace fraclab {

/// Writes P_0^{(alpha,beta)}(x) .. P_{m-1}^{(alpha,beta)}(x) into out (m = out.size()).
void jacobi_values(double x, double alpha, double beta, std::span<double> out);

/// Values and first derivatives of P_k^{(alpha,beta)}, k < out.size().
void jacobi_values_and_derivatives(double x, double alpha, double beta,
                                   std::span<double> values, std::span<double> derivatives);

/// ∫_{-1}^{1} (1-x)^alpha (1+x)^beta P_k(x)^2 dx.
double jacobi_norm_squared(std::size_t k, double alpha, double beta);

}  // namespace fraclab
