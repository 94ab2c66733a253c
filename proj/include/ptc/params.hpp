// params.hpp: experimental parameter bookkeeping, effective Lamb-Dicke
// series, and the rate-hierarchy validator that guards the adiabatic
// approximations.
//
// All rates here are angular (rad/ms); see units.hpp for the kHz convention
// used at the configuration boundary.

#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "ptc/units.hpp"

namespace ptc {

// Laser, trap and drive parameters of the two-ion scheme.
struct ExperimentParams {
    double gamma = 0.0;         // excited-state decay rate
    double omega_e_rabi = 0.0;  // dissipation-laser Rabi rate
    double omega1_rabi = 0.0;   // gain-laser Rabi rate
    double omega2_rabi = 0.0;   // damping-laser Rabi rate
    double eta = 0.0;           // Lamb-Dicke parameter (dimensionless)
    double omega_r = 0.0;       // vibrational mode frequency
    double omega_e_drive = 0.0; // electric-field drive frequency
    std::complex<double> epsilon{0.0, 0.0}; // drive strength, phase absorbed
    double phi1 = 0.0;          // laser phases (rad)
    double phi2 = 0.0;
    double delta1 = 0.0;        // laser detunings
    double delta2 = 0.0;

    // Optional fixed working values for the effective Lamb-Dicke parameters.
    // When absent, derive_rates evaluates the series at the requested mean
    // phonon number.
    std::optional<double> eta1_tilde_override;
    std::optional<double> eta2_tilde_override;

    double delta() const { return omega_e_drive - omega_r; } // drive detuning

    // Throws std::domain_error when a nonnegativity invariant is violated.
    void validate() const;
};

// Rates of the reduced phonon model, all angular.
struct EffectiveRates {
    double Gamma = 0.0;      // engineered spin decay rate
    double eta1_tilde = 0.0; // effective first-order Lamb-Dicke parameter
    double eta2_tilde = 0.0; // effective second-order Lamb-Dicke parameter
    double g = 0.0;          // linear gain rate
    double kappa = 0.0;      // two-phonon damping rate
};

// Mean phonon number of a thermal initial state.
struct ThermalSpec {
    double n_bar0 = 0.0;

    void validate() const;
};

// Effective Lamb-Dicke series.
//
//   eta1_tilde(eta, n) = sum_{k>=0} (-n)^k eta^(2k+1) / (k! (k+1)!)
//   eta2_tilde(eta, n) = sum_{k>=1} (-n)^(k-1) eta^(2k) / ((k-1)! (k+1)!)
//
// eta2_tilde is quoted with the positive sign convention (its square is the
// only thing that enters the rates).  Terms are summed until
// |term| < tol * |partial sum|.  Throws std::domain_error when eta <= 0 or
// n_bar * eta^2 >= 1 (outside the validity regime of the expansion).
double eta_tilde_1(double eta, double n_bar, double tol = 1e-12);
double eta_tilde_2(double eta, double n_bar, double tol = 1e-12);

// Lamb-Dicke parameter vs trap frequency, anchored to the single-ion value
// 0.1 at omega_t = 2pi * 1 MHz and scaled by 1/sqrt(num_ions) for collective
// modes.  Warns outside the accessible interval 2pi*[0.1, 10] MHz; throws
// std::domain_error for nonpositive frequency.
double lamb_dicke(double omega_t, int num_ions);
double lamb_dicke_two_ion(double omega_t);

// Gamma = Omega_e^2 / gamma, g = (eta1~ Omega_1)^2 / Gamma,
// kappa = (eta2~ Omega_2)^2 / Gamma.  The series evaluation point n_bar is
// ignored for the overridden eta~ values.  Throws when gamma == 0.
EffectiveRates derive_rates(const ExperimentParams& params, double n_bar = 0.0);

// Same arithmetic from explicitly supplied working values.
EffectiveRates rates_from_eta_tilde(double Gamma, double eta1_tilde, double omega1_rabi,
                                    double eta2_tilde, double omega2_rabi);

// One ">>" link of the rate hierarchy.
struct ChainLink {
    std::string name;
    double lhs = 0.0;   // fast side (angular)
    double rhs = 0.0;   // slow side (angular)
    double ratio = 0.0; // lhs / rhs, +inf when rhs == 0
    bool pass = false;
};

struct ValidationReport {
    double threshold = 10.0;
    std::vector<ChainLink> links;
    bool pass = false; // every link's ratio >= threshold

    const ChainLink* binding_link() const; // smallest ratio, null when empty
};

// Checks the hierarchy that underwrites both eliminations:
//
//   gamma >> Omega_e,  Omega_e >> Gamma,  omega_r >> Gamma,
//   Gamma >> eta_k~ Omega_k,  eta_k~ Omega_k >> own effective rate.
//
// The drive-strength comparisons (eta_k~ Omega_k vs |epsilon|) and the
// cross-channel one (eta2~ Omega_2 vs g) are not part of the pass/fail
// chain: the reference parameter point itself sits at or below ratio 1 on
// them, and the reduced model remains the object under study there.  Run
// manifests record those ratios separately.
ValidationReport validate_chain(const ExperimentParams& params, const EffectiveRates& rates,
                                double ratio_threshold = 10.0);

} // namespace ptc
