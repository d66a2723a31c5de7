#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "fraclab/dirichlet.hpp"

namespace fraclab {

// u_t + r+ (-Δ)^a u = f on (-1, 1) × (0, T], u = 0 outside (-1, 1), u(0) = u0,
// with u and f expanded in the weighted basis of a DirichletSystem.

enum class HeatScheme { EigenExact, ImplicitEuler };

struct HeatConfig {
    std::shared_ptr<const DirichletSystem> system;
    double T = 1.0;
    double dt = 1e-2;
    HeatScheme scheme = HeatScheme::EigenExact;
    /// EigenExact: mass-norm share of u0 that must lie in converged eigenmodes.
    double required_coverage = 0.999;
    /// Duhamel integrals: relative tolerance of the adaptive Gauss–Kronrod rule.
    double quadrature_tolerance = 1e-12;
    EigenOptions eigen;
};

/// f(t) as basis coefficients; an empty function means f = 0.
using HeatForcing = std::function<Eigen::VectorXd(double)>;

struct HeatTrajectory {
    std::shared_ptr<const DirichletSystem> system;
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;

    BasisExpansion state(std::size_t i) const;
    double mass_norm(std::size_t i) const;
};

/// Generalized eigenbasis of (A, M): A V = M V Λ, V^T M V = I, with the refinement
/// test of eigen_solve applied to every mode.
struct ModalBasis {
    Eigen::VectorXd lambda;
    Eigen::MatrixXd vectors;
    std::vector<bool> converged;
};

ModalBasis modal_basis(const DirichletSystem& sys, const EigenOptions& opts = {});

/// Throws InvalidArgument on inconsistent configuration and, for EigenExact,
/// when the converged modes do not cover the initial data.
HeatTrajectory evolve(const HeatConfig& cfg, const Eigen::VectorXd& u0, const HeatForcing& f = {});

struct TimeRegularityOptions {
    /// Probes start at t0 = t0_fraction · T.
    double t0_fraction = 0.1;
    /// Sampling steps dt·stride for these strides, coarse to fine.
    std::vector<std::size_t> strides{8, 4, 2, 1};
    /// Bounded when the last refinement changes the maximum by at most this factor.
    double growth_limit = 1.25;
};

struct TimeRegularityReport {
    int order = 0;
    std::vector<double> steps;
    /// max over t ≥ t0 of ‖Δ_τ^k u(t)‖_M / τ^k, one entry per step.
    std::vector<double> max_norm;
    std::vector<double> growth;
    bool bounded = false;
    /// Finest level: (t + kτ/2, ‖Δ_τ^k u(t)‖_M / τ^k).
    std::vector<double> profile_times;
    std::vector<double> profile_values;
};

/// k-th divided differences in time (k ≤ 4). Throws InvalidArgument when the
/// trajectory is too short for the coarsest stride.
TimeRegularityReport time_regularity_probe(const HeatTrajectory& traj, int k, const TimeRegularityOptions& opts = {});

struct BoundaryInTimeOptions {
    double t0_fraction = 0.1;
    std::size_t probes = 10;
    FitWindow fit_window{1e-5, 1e-3};
};

struct BoundaryInTimeReport {
    std::vector<double> times;
    /// Per probe time: fits at x = -1 and x = +1.
    std::vector<PowerFit> left;
    std::vector<PowerFit> right;
    std::vector<bool> flagged;
    /// max |exponent - a| over all unflagged fits.
    double max_deviation = 0.0;
};

BoundaryInTimeReport boundary_exponent_in_time(const HeatTrajectory& traj, const BoundaryInTimeOptions& opts = {});

struct SmoothnessCapOptions {
    std::size_t basis_size = 60;
    double t = 1.0;
    BoundaryRegularityOptions probe;
};

struct SmoothnessCapReport {
    double a = 0.0;
    double lambda1 = 0.0;
    double t = 0.0;
    /// Probe of e^{-λ₁ t} φ₁.
    BoundaryRegularityReport solution;
    /// Probe of the smooth non-solution e^{-t} (1 - x²)².
    HolderReport control[2];
    bool cap_fires() const { return solution.cap_fires(); }
    bool control_fires() const { return control[0].fires || control[1].fires; }
};

SmoothnessCapReport smoothness_cap_demo(FractionalOrder a, const SmoothnessCapOptions& opts = {});

}  // namespace fraclab
