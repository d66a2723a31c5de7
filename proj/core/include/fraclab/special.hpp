#pragma once

namespace fraclab {

/// Euler Gamma function. Rejects poles (non-positive integers) and non-finite input.
double gamma_fn(double z);

}  // namespace fraclab
