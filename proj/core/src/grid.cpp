#include "fraclab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fraclab/error.hpp"

namespace fraclab {

FractionalOrder::FractionalOrder(double a) : a_(a) {
    if (!(a > 0.0 && a < 1.0)) {
        throw InvalidArgument("fractional order must satisfy 0 < a < 1, got " + std::to_string(a));
    }
}

FractionalOrder FractionalOrder::positive(double a) {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw InvalidArgument("fractional order must be positive, got " + std::to_string(a));
    }
    return FractionalOrder(a, Unchecked{});
}

UniformGrid1D UniformGrid1D::make(double x_min, double x_max, std::size_t n) {
    if (n < 8) {
        throw InvalidArgument("grid needs at least 8 points");
    }
    if (!(x_min < x_max) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
        throw InvalidArgument("grid requires finite x_min < x_max");
    }
    return UniformGrid1D{x_min, x_max, n, (x_max - x_min) / static_cast<double>(n - 1)};
}

UniformGrid1D UniformGrid1D::periodic(double x_min, double period, std::size_t n) {
    if (!(period > 0.0)) {
        throw InvalidArgument("period must be positive");
    }
    const double h = period / static_cast<double>(n);
    return make(x_min, x_min + period - h, n);
}

std::vector<double> UniformGrid1D::abscissae() const {
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = x(i);
    return xs;
}

std::size_t UniformGrid1D::nearest_index(double xq) const noexcept {
    const double s = std::round((xq - x_min) / h);
    if (!(s > 0.0)) return 0;
    return std::min(n - 1, static_cast<std::size_t>(s));
}

SampledFunction::SampledFunction(UniformGrid1D grid, std::vector<Complex> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.n) {
        throw InvalidArgument("sample count does not match grid size");
    }
    for (const Complex& v : values_) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw InvalidArgument("sampled function contains non-finite values");
        }
    }
}

SampledFunction SampledFunction::zeros(const UniformGrid1D& grid) {
    return SampledFunction(grid, std::vector<Complex>(grid.n));
}

double SampledFunction::max_abs() const noexcept {
    double m = 0.0;
    for (const Complex& v : values_) m = std::max(m, std::abs(v));
    return m;
}

std::vector<double> SampledFunction::real_part() const {
    std::vector<double> r(values_.size());
    std::transform(values_.begin(), values_.end(), r.begin(), [](Complex v) { return v.real(); });
    return r;
}

SampledFunction linear_combination(Complex alpha, const SampledFunction& u,
                                   Complex beta, const SampledFunction& v) {
    if (u.size() != v.size() || u.grid().x_min != v.grid().x_min || u.grid().h != v.grid().h) {
        throw InvalidArgument("linear_combination requires a shared grid");
    }
    std::vector<Complex> out(u.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = alpha * u[i] + beta * v[i];
    return SampledFunction(u.grid(), std::move(out));
}

}  // namespace fraclab
