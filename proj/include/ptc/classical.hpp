// classical.hpp: thermodynamic-limit model of the phonon amplitude.
//
// The reduced master equation factorizes into a driven Van der Pol equation
// for alpha = <a>:
//
//   alpha' = (g/2 + i*Delta - kappa*|alpha|^2) alpha - i*epsilon
//
// This module integrates it, locates the Hopf threshold of the drive, and
// classifies the long-time attractor.  All rates are angular (rad/ms).

#pragma once

#include <complex>
#include <span>
#include <vector>

#include "ptc/ode.hpp"

namespace ptc {

struct ClassicalParams {
    double g = 0.0;     // linear gain
    double kappa = 0.0; // nonlinear damping
    double delta = 0.0; // drive detuning
    std::complex<double> epsilon{0.0, 0.0};

    void validate() const; // g, kappa >= 0
};

struct ClassicalTrajectory {
    std::vector<double> times; // ms, strictly increasing
    std::vector<std::complex<double>> alphas;
};

std::complex<double> vdp_rhs(std::complex<double> alpha, const ClassicalParams& params);

// Adaptive integration through the given grid; deterministic for fixed
// options.  Throws std::runtime_error on step underflow.
ClassicalTrajectory integrate_classical(std::complex<double> alpha0, const ClassicalParams& params,
                                        std::span<const double> t_grid,
                                        const OdeOptions& options = {});

// Hopf bifurcation point of the rescaled drive strength: drives with
// |epsilon|*sqrt(kappa) below the returned value leave the limit cycle
// intact, stronger drives lock the amplitude to a fixed point.  Valid in the
// small-kappa regime.  Units: rate^(3/2).
double hopf_threshold(double g, double delta);

enum class Regime {
    FixedPoint,
    LimitCycle,
};

struct RegimeOptions {
    double fixed_point_rtol = 1e-6;  // |alpha'| < rtol*|eps| + atol
    double fixed_point_atol = 1e-9;
    double peak_variation_tol = 1e-2; // relative spread of tail |alpha| peaks
    int samples = 4000;
};

// Integrates from alpha0 = 0 and from a perturbed start and inspects the
// tail window (last 20% of the horizon).  FixedPoint requires both runs to
// come to rest at the same point; LimitCycle requires settled radius peaks
// with oscillating Re alpha.  Throws std::runtime_error (Indeterminate) when
// neither criterion is met; a longer horizon usually resolves it.
Regime classify_regime(const ClassicalParams& params, double horizon,
                       const RegimeOptions& options = {});

} // namespace ptc
