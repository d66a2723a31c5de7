#include "fraclab/special.hpp"

#include <cmath>
#include <string>

#include "fraclab/error.hpp"

namespace fraclab {

double gamma_fn(double z) {
    if (!std::isfinite(z)) {
        throw InvalidArgument("gamma_fn: non-finite argument");
    }
    if (z <= 0.0 && std::floor(z) == z) {
        throw InvalidArgument("gamma_fn: pole at " + std::to_string(z));
    }
    return std::tgamma(z);
}

}  // namespace fraclab
