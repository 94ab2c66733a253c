// presets.hpp: named scenario presets around the reference working point,
// plus the scaled-down set used to validate the adiabatic elimination.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ptc/fock.hpp"
#include "ptc/params.hpp"

namespace ptc {

// One member of a parameter sweep; fields override the base scenario.
struct SweepMember {
    std::string label;
    std::optional<double> omega2_rabi; // angular
    std::optional<double> n_bar0;      // thermal initial state
};

// Direct effective-rate specification bypassing the laser parameters
// (angular rates).  Used by custom runs; presets always carry lasers.
struct DirectRates {
    double g = 0.0;
    double kappa = 0.0;
    double delta = 0.0;
    Cplx epsilon{0.0, 0.0};
};

struct Scenario {
    std::string name;
    ExperimentParams params;
    std::optional<DirectRates> direct_rates; // exactly one of params/direct_rates drives a run
    std::optional<ThermalSpec> thermal;      // vacuum initial state when absent
    int cutoff = 128;
    double t_end_ms = 5.0;
    int samples = 500;
    std::vector<std::string> outputs; // trajectory, classical, husimi, validation, divisions

    std::vector<double> husimi_at_ms;
    std::vector<double> division_times_ms; // extra sampled rows emitted separately
    int populations_max = -1;              // p_0..p_K columns when K >= 0
    std::vector<SweepMember> sweep;        // empty = single member

    // Drive-strength rule: when set, |epsilon| = epsilon_sqrt_kappa / sqrt(kappa)
    // in angular units (the reading consistent with the limit-cycle phase);
    // otherwise params.epsilon / direct rates are taken as given.
    std::optional<double> epsilon_sqrt_kappa; // (rad/ms)^(3/2)
    double epsilon_phase = 0.0;

    // Series evaluation point for the effective Lamb-Dicke parameters when
    // no overrides are present.
    double eta_series_n_bar = 0.0;
};

// Known presets: fig2, fig3, fig4, fig5, oracle-small.  Throws
// std::domain_error listing the valid names for anything else.
Scenario preset(const std::string& name);
std::vector<std::string> preset_names();

// Canonical sweep-member labels (shared by the presets and the config parser).
std::string sweep_label_omega2(double omega2_khz);
std::string sweep_label_nbar(double n_bar0);

// Scaled two-qubit (x) phonon oracle set: every link of the rate hierarchy
// sits at the given ratio, and g = kappa so the attractor fits in a cutoff
// of 6.  preset("oracle-small") is oracle_scenario(10).
Scenario oracle_scenario(double chain_ratio);

} // namespace ptc
