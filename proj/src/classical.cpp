#include "ptc/classical.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ptc {

void ClassicalParams::validate() const {
    if (g < 0.0)
        throw std::domain_error("ClassicalParams: g must be nonnegative");
    if (kappa < 0.0)
        throw std::domain_error("ClassicalParams: kappa must be nonnegative");
}

std::complex<double> vdp_rhs(std::complex<double> alpha, const ClassicalParams& params) {
    const std::complex<double> coeff(0.5 * params.g - params.kappa * std::norm(alpha),
                                     params.delta);
    return coeff * alpha - std::complex<double>(0.0, 1.0) * params.epsilon;
}

ClassicalTrajectory integrate_classical(std::complex<double> alpha0,
                                        const ClassicalParams& params,
                                        std::span<const double> t_grid,
                                        const OdeOptions& options) {
    params.validate();
    ClassicalTrajectory traj;
    traj.times.reserve(t_grid.size());
    traj.alphas.reserve(t_grid.size());

    OdeState y(1);
    y(0) = alpha0;
    const OdeRhs rhs = [&params](double, const OdeState& state, OdeState& dydt) {
        dydt(0) = vdp_rhs(state(0), params);
    };
    const double t0 = t_grid.empty() ? 0.0 : std::min(0.0, t_grid.front());
    integrate_dopri54(rhs, y, t0, t_grid, options, [&traj](double t, const OdeState& state) {
        traj.times.push_back(t);
        traj.alphas.push_back(state(0));
    });
    return traj;
}

double hopf_threshold(double g, double delta) {
    if (g < 0.0)
        throw std::domain_error("hopf_threshold: g must be nonnegative");
    return std::sqrt(g * (g * g + 4.0 * delta * delta)) / 4.0;
}

namespace {

struct TailStats {
    std::vector<double> radius_peaks; // local maxima of |alpha| in the window
    int re_sign_changes = 0;          // of Re alpha - mean(Re alpha)
    double mean_radius = 0.0;
};

TailStats tail_stats(const ClassicalTrajectory& traj, double window_start) {
    TailStats stats;
    std::vector<double> radius;
    std::vector<double> re;
    for (size_t i = 0; i < traj.times.size(); ++i) {
        if (traj.times[i] < window_start)
            continue;
        radius.push_back(std::abs(traj.alphas[i]));
        re.push_back(traj.alphas[i].real());
    }
    if (radius.size() < 3)
        return stats;
    for (size_t i = 1; i + 1 < radius.size(); ++i)
        if (radius[i] >= radius[i - 1] && radius[i] > radius[i + 1])
            stats.radius_peaks.push_back(radius[i]);
    double re_mean = 0.0;
    for (double v : re)
        re_mean += v;
    re_mean /= static_cast<double>(re.size());
    for (size_t i = 1; i < re.size(); ++i) {
        const double a = re[i - 1] - re_mean;
        const double b = re[i] - re_mean;
        if (a * b < 0.0)
            ++stats.re_sign_changes;
    }
    double acc = 0.0;
    for (double r : radius)
        acc += r;
    stats.mean_radius = acc / static_cast<double>(radius.size());
    return stats;
}

} // namespace

Regime classify_regime(const ClassicalParams& params, double horizon,
                       const RegimeOptions& options) {
    params.validate();
    if (horizon <= 0.0)
        throw std::domain_error("classify_regime: horizon must be positive");

    std::vector<double> grid(options.samples);
    for (int i = 0; i < options.samples; ++i)
        grid[i] = horizon * (i + 1) / static_cast<double>(options.samples);

    const double seed_radius = params.kappa > 0.0
                                   ? 0.1 * std::sqrt(std::max(params.g, 1e-12) / (2.0 * params.kappa))
                                   : 0.1;
    const std::complex<double> perturbed(seed_radius, 0.3 * seed_radius);

    const ClassicalTrajectory from_zero = integrate_classical(0.0, params, grid);
    const ClassicalTrajectory from_seed = integrate_classical(perturbed, params, grid);

    const double rest_tol = options.fixed_point_rtol * std::abs(params.epsilon) +
                            options.fixed_point_atol;
    const bool zero_rests = std::abs(vdp_rhs(from_zero.alphas.back(), params)) < rest_tol;
    const bool seed_rests = std::abs(vdp_rhs(from_seed.alphas.back(), params)) < rest_tol;
    if (zero_rests && seed_rests &&
        std::abs(from_zero.alphas.back() - from_seed.alphas.back()) <
            1e-3 * (1.0 + std::abs(from_seed.alphas.back())))
        return Regime::FixedPoint;

    const double window_start = horizon * 0.8;
    for (const auto* traj : {&from_seed, &from_zero}) {
        const TailStats stats = tail_stats(*traj, window_start);
        if (stats.radius_peaks.size() < 3 || stats.re_sign_changes < 4)
            continue;
        const auto [lo, hi] =
            std::minmax_element(stats.radius_peaks.begin(), stats.radius_peaks.end());
        if (*lo <= 0.0)
            continue;
        if ((*hi - *lo) / stats.mean_radius < options.peak_variation_tol)
            return Regime::LimitCycle;
    }

    std::ostringstream oss;
    oss << "classify_regime: indeterminate at horizon " << horizon
        << " ms; rerun with a longer horizon";
    throw std::runtime_error(oss.str());
}

} // namespace ptc
