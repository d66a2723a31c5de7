#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fraclab/grid.hpp"

namespace fraclab {

/// Interval of distances to the anchor over which a fit is made.
struct FitWindow {
    double lo = 0.0;
    double hi = 0.0;
};

/// |u| ≈ amplitude · distance^exponent on fit_window.
/// `residual` is the largest relative deviation of the data from the fit.
struct PowerFit {
    double exponent = 0.0;
    double amplitude = 0.0;
    double residual = 0.0;
    FitWindow fit_window;
    std::size_t points = 0;
};

enum class Side { Left, Right };

/// Least-squares fit of log|u| against log(distance to anchor) using grid nodes
/// on one side of the anchor, picked at (approximately) geometric spacing.
PowerFit fit_power_law(const SampledFunction& samples, double anchor, FitWindow window,
                       Side side = Side::Right, std::size_t target_points = 40);

/// Same fit for a function of the distance, sampled at exactly geometric abscissae.
PowerFit fit_power_law(const std::function<double(double)>& of_distance, FitWindow window,
                       std::size_t points = 40);

/// Result of extrapolating samples f(x0 2^{-j}) to x -> 0.
struct LimitEstimate {
    double value = 0.0;
    /// |difference| between the accepted diagonal entry and the one before it.
    double last_change = 0.0;
    /// Diagonal level accepted: the last one before the changes start to grow.
    std::size_t level = 0;
    /// At least two successive levels with decreasing change.
    bool stable = false;
    std::vector<double> diagonal;
};

/// Richardson extrapolation for f(x) = f0 + c1 x + c2 x^2 + ..., given samples
/// at x_j = x0 2^{-j}, j = 0..m-1 (at least 3).
LimitEstimate extrapolate_limit(std::span<const double> samples);

}  // namespace fraclab
