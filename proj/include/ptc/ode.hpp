// ode.hpp: embedded Dormand-Prince 5(4) integrator on complex state vectors.
//
// Deterministic for fixed options: step-size control is a pure function of
// the local error estimate, and the integrator lands exactly on every
// requested stop time.  No renormalization or projection of the state is
// performed here.

#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ptc {

using OdeState = Eigen::VectorXcd;
using OdeRhs = std::function<void(double t, const OdeState& y, OdeState& dydt)>;
using OdeObserver = std::function<void(double t, const OdeState& y)>;

struct OdeOptions {
    double rtol = 1e-8;
    double atol = 1e-12;
    double max_step = 0.0;     // 0 = unlimited
    double initial_step = 0.0; // 0 = choose automatically
    double safety = 0.9;
    double min_factor = 0.2;
    double max_factor = 5.0;
    long max_steps = 50'000'000;
};

struct OdeStats {
    long steps_accepted = 0;
    long steps_rejected = 0;
    long rhs_evaluations = 0;
};

// Integrates y' = rhs(t, y) from t0 through the strictly increasing stop
// times.  on_stop fires at every stop time (including t0 when it equals
// stops.front()); on_step, when provided, fires after every accepted step.
// Throws std::runtime_error on step-size underflow or step-count overflow.
OdeStats integrate_dopri54(const OdeRhs& rhs, OdeState& y, double t0,
                           std::span<const double> stops, const OdeOptions& options,
                           const OdeObserver& on_stop, const OdeObserver& on_step = {});

} // namespace ptc
