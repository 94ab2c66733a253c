#include "ptc/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ptc {

namespace {

// Dormand-Prince coefficients; the fifth-order weights are the last stage
// row (FSAL), the embedded fourth-order weights give the error estimate.
constexpr double kC[7] = {0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5.0},
    {3.0 / 40.0, 9.0 / 40.0},
    {44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0},
    {19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0},
    {9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0},
    {35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0},
};
constexpr double kE[7] = {
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
};

double error_norm(const OdeState& err, const OdeState& y0, const OdeState& y1,
                  double atol, double rtol) {
    const auto n = err.size();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double scale = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double r = std::abs(err[i]) / scale;
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(n));
}

double initial_step_guess(const OdeRhs& rhs, double t0, const OdeState& y0,
                          const OdeState& f0, double span, OdeStats& stats) {
    // Hairer-style heuristic, clipped to the integration span.
    const double d0 = y0.norm();
    const double d1 = f0.norm();
    double h0 = (d0 < 1e-10 || d1 < 1e-10) ? 1e-6 * span : 0.01 * d0 / d1;
    h0 = std::min(h0, 0.1 * span);

    OdeState y1 = y0 + h0 * f0;
    OdeState f1(y0.size());
    rhs(t0 + h0, y1, f1);
    ++stats.rhs_evaluations;
    const double d2 = (f1 - f0).norm() / h0;
    double h1;
    if (std::max(d1, d2) <= 1e-15)
        h1 = std::max(1e-6 * span, h0 * 1e-3);
    else
        h1 = std::pow(0.01 / std::max(d1, d2), 0.2);
    return std::min({100.0 * h0, h1, span});
}

} // namespace

OdeStats integrate_dopri54(const OdeRhs& rhs, OdeState& y, double t0,
                           std::span<const double> stops, const OdeOptions& options,
                           const OdeObserver& on_stop, const OdeObserver& on_step) {
    OdeStats stats;
    if (stops.empty())
        return stats;
    for (size_t i = 0; i + 1 < stops.size(); ++i)
        if (stops[i + 1] <= stops[i])
            throw std::runtime_error("integrate_dopri54: stop times must be strictly increasing");
    if (stops.front() < t0)
        throw std::runtime_error("integrate_dopri54: first stop precedes t0");

    double t = t0;
    size_t next_stop = 0;
    if (stops.front() == t0) {
        if (on_stop)
            on_stop(t, y);
        ++next_stop;
    }
    if (next_stop == stops.size())
        return stats;

    const double t_end = stops.back();
    const double span = t_end - t0;
    const Eigen::Index n = y.size();

    std::vector<OdeState> k(7, OdeState(n));
    rhs(t, y, k[0]);
    ++stats.rhs_evaluations;

    double h = options.initial_step > 0.0
                   ? options.initial_step
                   : initial_step_guess(rhs, t, y, k[0], span, stats);
    if (options.max_step > 0.0)
        h = std::min(h, options.max_step);

    const double min_step = 1e-14 * std::max(std::abs(t0), std::abs(t_end)) + 1e-300;
    OdeState y_stage(n), y_new(n), err(n);
    bool last_rejected = false;

    while (next_stop < stops.size()) {
        if (stats.steps_accepted + stats.steps_rejected >= options.max_steps)
            throw std::runtime_error("integrate_dopri54: step budget exhausted");

        // Clamp the executed step onto the next stop time without letting the
        // clamped length feed back into the controller's proposal h.
        double h_exec = h;
        bool hit_stop = false;
        if (t + h_exec >= stops[next_stop]) {
            h_exec = stops[next_stop] - t;
            hit_stop = true;
        }
        if (h_exec <= min_step && !hit_stop) {
            std::ostringstream oss;
            oss << "integrate_dopri54: step size underflow at t = " << t;
            throw std::runtime_error(oss.str());
        }

        for (int s = 1; s < 7; ++s) {
            y_stage = y;
            for (int j = 0; j < s; ++j)
                if (kA[s][j] != 0.0)
                    y_stage.noalias() += (h_exec * kA[s][j]) * k[j];
            rhs(t + kC[s] * h_exec, y_stage, k[s]);
            ++stats.rhs_evaluations;
        }
        // The last stage input is the fifth-order solution itself (FSAL), so
        // y_new equals the s = 6 stage state and k[6] = f(t + h, y_new).
        y_new = y;
        for (int j = 0; j < 6; ++j)
            if (kA[6][j] != 0.0)
                y_new.noalias() += (h_exec * kA[6][j]) * k[j];
        err.setZero();
        for (int j = 0; j < 7; ++j)
            if (kE[j] != 0.0)
                err.noalias() += (h_exec * kE[j]) * k[j];

        const double norm = error_norm(err, y, y_new, options.atol, options.rtol);
        double factor = norm == 0.0 ? options.max_factor
                                    : options.safety * std::pow(norm, -0.2);
        if (norm <= 1.0) {
            t = hit_stop ? stops[next_stop] : t + h_exec;
            y.swap(y_new);
            k[0].swap(k[6]); // FSAL
            ++stats.steps_accepted;
            if (on_step)
                on_step(t, y);
            if (hit_stop) {
                if (on_stop)
                    on_stop(t, y);
                ++next_stop;
            }
            factor = std::clamp(factor, options.min_factor, options.max_factor);
            if (last_rejected)
                factor = std::min(factor, 1.0);
            if (!hit_stop || factor < 1.0)
                h = h_exec * factor;
            if (options.max_step > 0.0)
                h = std::min(h, options.max_step);
            last_rejected = false;
        } else {
            ++stats.steps_rejected;
            h = h_exec * std::clamp(factor, options.min_factor, 1.0);
            if (h <= min_step) {
                std::ostringstream oss;
                oss << "integrate_dopri54: step size underflow at t = " << t
                    << " (error norm " << norm << ")";
                throw std::runtime_error(oss.str());
            }
            last_rejected = true;
        }
    }
    return stats;
}

} // namespace ptc
