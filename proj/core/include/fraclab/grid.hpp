#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

namespace fraclab {

using Complex = std::complex<double>;

/// Order parameter a of an operator of order 2a. Construction checks 0 < a < 1;
/// `positive` admits any a > 0 for the few operations that allow it.
class FractionalOrder {
public:
    explicit FractionalOrder(double a);
    static FractionalOrder positive(double a);

    double value() const noexcept { return a_; }
    /// Stable index 2a of the associated Lévy process.
    double stable_index() const noexcept { return 2.0 * a_; }

private:
    struct Unchecked {};
    FractionalOrder(double a, Unchecked) noexcept : a_(a) {}
    double a_;
};

/// Uniform grid x_i = x_min + i h, i = 0..n-1, h = (x_max - x_min)/(n - 1).
struct UniformGrid1D {
    double x_min = 0.0;
    double x_max = 1.0;
    std::size_t n = 0;
    double h = 0.0;

    static UniformGrid1D make(double x_min, double x_max, std::size_t n);
    /// Grid of n points with spacing period/n, so that x_max + h = x_min + period.
    static UniformGrid1D periodic(double x_min, double period, std::size_t n);

    double x(std::size_t i) const noexcept { return x_min + h * static_cast<double>(i); }
    std::vector<double> abscissae() const;
    /// Index of the node closest to x, clamped to the grid.
    std::size_t nearest_index(double x) const noexcept;
    bool contains(double x) const noexcept { return x >= x_min && x <= x_max; }
};

/// Values of a function on a UniformGrid1D. All values are finite.
class SampledFunction {
public:
    SampledFunction(UniformGrid1D grid, std::vector<Complex> values);

    template <class F>
    static SampledFunction sample(const UniformGrid1D& grid, F&& f) {
        std::vector<Complex> values(grid.n);
        for (std::size_t i = 0; i < grid.n; ++i) {
            values[i] = Complex(f(grid.x(i)));
        }
        return SampledFunction(grid, std::move(values));
    }

    static SampledFunction zeros(const UniformGrid1D& grid);

    const UniformGrid1D& grid() const noexcept { return grid_; }
    std::span<const Complex> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    Complex operator[](std::size_t i) const noexcept { return values_[i]; }

    double max_abs() const noexcept;
    std::vector<double> real_part() const;

private:
    UniformGrid1D grid_;
    std::vector<Complex> values_;
};

/// alpha*u + beta*v on a shared grid.
SampledFunction linear_combination(Complex alpha, const SampledFunction& u,
                                   Complex beta, const SampledFunction& v);

}  // namespace fraclab
