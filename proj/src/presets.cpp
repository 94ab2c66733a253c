#include "ptc/presets.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ptc/units.hpp"

namespace ptc {

namespace {

std::string format_label_number(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%g", value);
    return buffer;
}

} // namespace

std::string sweep_label_omega2(double omega2_khz) {
    return "omega2_" + format_label_number(omega2_khz) + "khz";
}

std::string sweep_label_nbar(double n_bar0) {
    return "nbar0_" + format_label_number(n_bar0);
}

namespace {

// Reference working point: gamma/2pi = 22.4 MHz, Omega_e/2pi = 1.34 MHz,
// Omega_1/2pi = 100 kHz, Omega_2/2pi = 300 kHz, omega_r/2pi = 1 MHz,
// Delta/2pi = 5 kHz, eta = 0.07 with working values eta1~ = 0.066 and
// eta2~ = 0.0018.
ExperimentParams reference_params() {
    ExperimentParams p;
    p.gamma = angular_from_khz(22400.0);
    p.omega_e_rabi = angular_from_khz(1340.0);
    p.omega1_rabi = angular_from_khz(100.0);
    p.omega2_rabi = angular_from_khz(300.0);
    p.eta = 0.07;
    p.omega_r = angular_from_khz(1000.0);
    p.omega_e_drive = angular_from_khz(1005.0);
    p.phi1 = 0.0;
    p.phi2 = 0.5 * std::numbers::pi;
    p.delta1 = p.omega_e_drive;        // first sideband pairing
    p.delta2 = -2.0 * p.omega_e_drive; // second sideband pairing
    p.eta1_tilde_override = 0.066;
    p.eta2_tilde_override = 0.0018;
    return p;
}

// Rescaled drive strength |epsilon| sqrt(kappa) of the driven scenarios, in
// angular units (rad/ms)^(3/2).  The constant admits two unit
// readings; the angular one keeps the working point below the Hopf
// threshold (ratio 0.49), which is the limit-cycle regime the scenarios
// reproduce.  Run manifests record both readings.
constexpr double kEpsilonSqrtKappa = 14.27;

// Cutoff sized so the breathing of the driven limit cycle (classical peak
// |alpha|^2 ~ 111 plus quantum spread) keeps p_{d-1} below 1e-8 over the
// whole run; measured max edge population 3.5e-9 at 192 (5.2e-7 at 176).
constexpr int kDrivenCutoff = 192;

Scenario driven_base(const std::string& name) {
    Scenario s;
    s.name = name;
    s.params = reference_params();
    s.cutoff = kDrivenCutoff;
    s.t_end_ms = 5.0;
    s.samples = 500;
    s.epsilon_sqrt_kappa = kEpsilonSqrtKappa;
    s.epsilon_phase = 0.0;
    return s;
}

Scenario make_fig2() {
    Scenario s = driven_base("fig2");
    s.outputs = {"trajectory", "classical", "validation"};
    for (double nu : {300.0, 500.0, 700.0}) {
        SweepMember m;
        m.label = sweep_label_omega2(nu);
        m.omega2_rabi = angular_from_khz(nu);
        s.sweep.push_back(m);
    }
    return s;
}

Scenario make_fig3() {
    Scenario s = driven_base("fig3");
    s.outputs = {"trajectory", "classical", "husimi", "validation"};
    s.husimi_at_ms = {0.0, 5.0};
    return s;
}

Scenario make_fig4() {
    Scenario s = driven_base("fig4");
    s.outputs = {"trajectory", "classical", "validation"};
    for (double n_bar : {1.0, 5.0, 10.0}) {
        SweepMember m;
        m.label = sweep_label_nbar(n_bar);
        m.n_bar0 = n_bar;
        s.sweep.push_back(m);
    }
    return s;
}

Scenario make_fig5() {
    Scenario s = driven_base("fig5");
    s.outputs = {"trajectory", "divisions", "validation"};
    s.thermal = ThermalSpec{5.0};
    s.t_end_ms = 4.0;
    s.samples = 400; // 10 us grid; the division points land on it exactly
    s.populations_max = 31;
    for (int k = 0; k < 6; ++k)
        s.division_times_ms.push_back(2.5 + 0.05 * k);
    return s;
}

} // namespace

Scenario oracle_scenario(double chain_ratio) {
    if (chain_ratio <= 1.0)
        throw std::domain_error("oracle_scenario: chain ratio must exceed 1");
    const double Gamma = angular_from_khz(80.0);
    const double g = Gamma / (chain_ratio * chain_ratio);

    Scenario s;
    s.name = "oracle-small";
    ExperimentParams& p = s.params;
    p.gamma = chain_ratio * chain_ratio * Gamma;
    p.omega_e_rabi = chain_ratio * Gamma;
    p.omega_r = chain_ratio * Gamma;
    p.omega1_rabi = Gamma;
    p.omega2_rabi = Gamma;
    p.eta = 0.07; // recorded; the overrides below are what the run uses
    p.eta1_tilde_override = 1.0 / chain_ratio;
    p.eta2_tilde_override = 1.0 / chain_ratio;
    p.omega_e_drive = p.omega_r + g; // Delta = g
    p.delta1 = p.omega_e_drive;
    p.delta2 = -2.0 * p.omega_e_drive;
    p.epsilon = Cplx(0.5 * g, 0.0);

    s.cutoff = 6;
    s.t_end_ms = 8.0 / g;
    s.samples = 200;
    s.outputs = {"trajectory"};
    return s;
}

std::vector<std::string> preset_names() {
    return {"fig2", "fig3", "fig4", "fig5", "oracle-small"};
}

Scenario preset(const std::string& name) {
    if (name == "fig2")
        return make_fig2();
    if (name == "fig3")
        return make_fig3();
    if (name == "fig4")
        return make_fig4();
    if (name == "fig5")
        return make_fig5();
    if (name == "oracle-small")
        return oracle_scenario(10.0);
    std::ostringstream oss;
    oss << "preset: unknown name '" << name << "'; valid names:";
    for (const auto& known : preset_names())
        oss << " " << known;
    throw std::domain_error(oss.str());
}

} // namespace ptc
