#include "ptc/params.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ptc/warnings.hpp"

namespace ptc {

void ExperimentParams::validate() const {
    const struct { const char* name; double value; } nonneg[] = {
        {"gamma", gamma},
        {"omega_e_rabi", omega_e_rabi},
        {"omega1_rabi", omega1_rabi},
        {"omega2_rabi", omega2_rabi},
        {"omega_r", omega_r},
    };
    for (const auto& field : nonneg)
        if (field.value < 0.0)
            throw std::domain_error(std::string("ExperimentParams: ") + field.name +
                                    " must be nonnegative");
    if (eta < 0.0)
        throw std::domain_error("ExperimentParams: eta must be nonnegative");
}

void ThermalSpec::validate() const {
    if (n_bar0 < 0.0)
        throw std::domain_error("ThermalSpec: n_bar0 must be nonnegative");
}

namespace {

void check_series_domain(const char* fn, double eta, double n_bar) {
    if (eta <= 0.0)
        throw std::domain_error(std::string(fn) + ": eta must be positive");
    if (n_bar < 0.0)
        throw std::domain_error(std::string(fn) + ": n_bar must be nonnegative");
    if (n_bar * eta * eta >= 1.0) {
        std::ostringstream oss;
        oss << fn << ": n_bar * eta^2 = " << n_bar * eta * eta
            << " >= 1, outside the validity regime of the expansion";
        throw std::domain_error(oss.str());
    }
}

} // namespace

double eta_tilde_1(double eta, double n_bar, double tol) {
    check_series_domain("eta_tilde_1", eta, n_bar);
    // term_k = (-n_bar)^k eta^(2k+1) / (k! (k+1)!)
    double term = eta;
    double sum = term;
    for (int k = 1; k < 200; ++k) {
        term *= -n_bar * eta * eta / (static_cast<double>(k) * (k + 1));
        sum += term;
        if (std::abs(term) < tol * std::abs(sum))
            return sum;
    }
    return sum;
}

double eta_tilde_2(double eta, double n_bar, double tol) {
    check_series_domain("eta_tilde_2", eta, n_bar);
    // term_k = (-n_bar)^(k-1) eta^(2k) / ((k-1)! (k+1)!), k >= 1
    double term = eta * eta / 2.0;
    double sum = term;
    for (int k = 2; k < 200; ++k) {
        term *= -n_bar * eta * eta / (static_cast<double>(k - 1) * (k + 1));
        sum += term;
        if (std::abs(term) < tol * std::abs(sum))
            return sum;
    }
    return sum;
}

double lamb_dicke(double omega_t, int num_ions) {
    if (omega_t <= 0.0)
        throw std::domain_error("lamb_dicke: trap frequency must be positive");
    if (num_ions < 1)
        throw std::domain_error("lamb_dicke: num_ions must be at least 1");
    const double lo = angular_from_khz(100.0);    // 2pi * 0.1 MHz
    const double hi = angular_from_khz(10000.0);  // 2pi * 10 MHz
    if (omega_t < lo || omega_t > hi) {
        std::ostringstream oss;
        oss << "lamb_dicke: omega_t/2pi = " << khz_from_angular(omega_t)
            << " kHz is outside the accessible interval [100, 10000] kHz";
        warn(oss.str());
    }
    const double reference = angular_from_khz(1000.0); // 2pi * 1 MHz anchor
    return 0.1 * std::sqrt(reference / omega_t) / std::sqrt(static_cast<double>(num_ions));
}

double lamb_dicke_two_ion(double omega_t) {
    return lamb_dicke(omega_t, 2);
}

EffectiveRates rates_from_eta_tilde(double Gamma, double eta1_tilde, double omega1_rabi,
                                    double eta2_tilde, double omega2_rabi) {
    if (Gamma <= 0.0)
        throw std::domain_error("rates_from_eta_tilde: Gamma must be positive");
    EffectiveRates rates;
    rates.Gamma = Gamma;
    rates.eta1_tilde = eta1_tilde;
    rates.eta2_tilde = eta2_tilde;
    rates.g = eta1_tilde * eta1_tilde * omega1_rabi * omega1_rabi / Gamma;
    rates.kappa = eta2_tilde * eta2_tilde * omega2_rabi * omega2_rabi / Gamma;
    return rates;
}

EffectiveRates derive_rates(const ExperimentParams& params, double n_bar) {
    params.validate();
    if (params.gamma == 0.0)
        throw std::domain_error("derive_rates: gamma must be nonzero");
    const double Gamma = params.omega_e_rabi * params.omega_e_rabi / params.gamma;
    const double eta1 = params.eta1_tilde_override
                            ? *params.eta1_tilde_override
                            : eta_tilde_1(params.eta, n_bar);
    const double eta2 = params.eta2_tilde_override
                            ? *params.eta2_tilde_override
                            : eta_tilde_2(params.eta, n_bar);
    return rates_from_eta_tilde(Gamma, eta1, params.omega1_rabi, eta2, params.omega2_rabi);
}

const ChainLink* ValidationReport::binding_link() const {
    const ChainLink* binding = nullptr;
    for (const auto& link : links)
        if (!binding || link.ratio < binding->ratio)
            binding = &link;
    return binding;
}

namespace {

ChainLink make_link(const std::string& name, double lhs, double rhs, double threshold) {
    ChainLink link;
    link.name = name;
    link.lhs = lhs;
    link.rhs = rhs;
    link.ratio = rhs == 0.0 ? std::numeric_limits<double>::infinity() : lhs / rhs;
    link.pass = link.ratio >= threshold;
    return link;
}

} // namespace

ValidationReport validate_chain(const ExperimentParams& params, const EffectiveRates& rates,
                                double ratio_threshold) {
    if (ratio_threshold <= 1.0)
        throw std::domain_error("validate_chain: ratio threshold must exceed 1");

    const double eta1_omega1 = rates.eta1_tilde * params.omega1_rabi;
    const double eta2_omega2 = rates.eta2_tilde * params.omega2_rabi;

    ValidationReport report;
    report.threshold = ratio_threshold;
    report.links = {
        make_link("gamma_over_omega_e", params.gamma, params.omega_e_rabi, ratio_threshold),
        make_link("omega_e_over_Gamma", params.omega_e_rabi, rates.Gamma, ratio_threshold),
        make_link("omega_r_over_Gamma", params.omega_r, rates.Gamma, ratio_threshold),
        make_link("Gamma_over_eta1_omega1", rates.Gamma, eta1_omega1, ratio_threshold),
        make_link("Gamma_over_eta2_omega2", rates.Gamma, eta2_omega2, ratio_threshold),
        make_link("eta1_omega1_over_g", eta1_omega1, rates.g, ratio_threshold),
        make_link("eta1_omega1_over_kappa", eta1_omega1, rates.kappa, ratio_threshold),
        make_link("eta2_omega2_over_kappa", eta2_omega2, rates.kappa, ratio_threshold),
    };
    report.pass = true;
    for (const auto& link : report.links)
        report.pass = report.pass && link.pass;
    return report;
}

} // namespace ptc
