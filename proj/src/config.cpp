#include "ptc/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ptc/io.hpp"
#include "ptc/units.hpp"

namespace ptc {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos)
        return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void parse_fail(int line, const std::string& message) {
    std::ostringstream oss;
    oss << "config: line " << line << ": " << message;
    throw std::domain_error(oss.str());
}

double parse_number(const std::string& value, int line) {
    char* end = nullptr;
    const double parsed = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
        parse_fail(line, "expected a number, got '" + value + "'");
    return parsed;
}

int parse_int(const std::string& value, int line) {
    const double parsed = parse_number(value, line);
    const int as_int = static_cast<int>(parsed);
    if (static_cast<double>(as_int) != parsed)
        parse_fail(line, "expected an integer, got '" + value + "'");
    return as_int;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::string current;
    std::istringstream in(value);
    while (std::getline(in, current, ','))
        items.push_back(trim(current));
    return items;
}

} // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig config;
    Scenario& s = config.scenario;
    s.cutoff = 0; // required fields tracked below
    s.samples = 0;
    s.t_end_ms = 0.0;

    bool have_lasers = false;
    bool have_rates = false;
    bool thermal_initial = false;
    double n_bar0 = 0.0;
    DirectRates rates;
    Cplx epsilon{0.0, 0.0};
    bool have_epsilon = false;
    std::optional<double> eps_sqrt_kappa;
    double eps_phase = 0.0;
    std::vector<double> sweep_omega2;
    std::vector<double> sweep_nbar;

    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos)
            raw.erase(hash);
        const std::string stripped = trim(raw);
        if (stripped.empty())
            continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']')
                parse_fail(line, "malformed section header");
            section = stripped.substr(1, stripped.size() - 2);
            if (section != "run" && section != "lasers" && section != "rates" &&
                section != "initial" && section != "sweep" && section != "integrator")
                parse_fail(line, "unknown section [" + section + "]");
            if (section == "lasers")
                have_lasers = true;
            if (section == "rates")
                have_rates = true;
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            parse_fail(line, "expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (section.empty())
            parse_fail(line, "key outside any section");

        if (section == "run") {
            if (key == "name")
                s.name = value;
            else if (key == "cutoff")
                s.cutoff = parse_int(value, line);
            else if (key == "t_end_ms")
                s.t_end_ms = parse_number(value, line);
            else if (key == "samples")
                s.samples = parse_int(value, line);
            else if (key == "populations_max")
                s.populations_max = parse_int(value, line);
            else if (key == "outputs") {
                s.outputs.clear();
                for (const auto& item : split_list(value))
                    s.outputs.push_back(item);
            } else if (key == "husimi_at_ms") {
                s.husimi_at_ms.clear();
                for (const auto& item : split_list(value))
                    s.husimi_at_ms.push_back(parse_number(item, line));
            } else if (key == "division_times_ms") {
                s.division_times_ms.clear();
                for (const auto& item : split_list(value))
                    s.division_times_ms.push_back(parse_number(item, line));
            } else
                parse_fail(line, "unknown key '" + key + "' in [run]");
        } else if (section == "lasers") {
            ExperimentParams& p = s.params;
            if (key == "gamma_khz")
                p.gamma = angular_from_khz(parse_number(value, line));
            else if (key == "omega_e_rabi_khz")
                p.omega_e_rabi = angular_from_khz(parse_number(value, line));
            else if (key == "omega1_rabi_khz")
                p.omega1_rabi = angular_from_khz(parse_number(value, line));
            else if (key == "omega2_rabi_khz")
                p.omega2_rabi = angular_from_khz(parse_number(value, line));
            else if (key == "omega_r_khz")
                p.omega_r = angular_from_khz(parse_number(value, line));
            else if (key == "omega_e_drive_khz")
                p.omega_e_drive = angular_from_khz(parse_number(value, line));
            else if (key == "eta")
                p.eta = parse_number(value, line);
            else if (key == "eta1_tilde")
                p.eta1_tilde_override = parse_number(value, line);
            else if (key == "eta2_tilde")
                p.eta2_tilde_override = parse_number(value, line);
            else if (key == "eta_series_n_bar")
                s.eta_series_n_bar = parse_number(value, line);
            else if (key == "phi1_rad")
                p.phi1 = parse_number(value, line);
            else if (key == "phi2_rad")
                p.phi2 = parse_number(value, line);
            else if (key == "delta1_khz")
                p.delta1 = angular_from_khz(parse_number(value, line));
            else if (key == "delta2_khz")
                p.delta2 = angular_from_khz(parse_number(value, line));
            else if (key == "epsilon_re_khz") {
                epsilon.real(angular_from_khz(parse_number(value, line)));
                have_epsilon = true;
            } else if (key == "epsilon_im_khz") {
                epsilon.imag(angular_from_khz(parse_number(value, line)));
                have_epsilon = true;
            } else if (key == "epsilon_sqrt_kappa")
                eps_sqrt_kappa = parse_number(value, line);
            else if (key == "epsilon_phase_rad")
                eps_phase = parse_number(value, line);
            else
                parse_fail(line, "unknown key '" + key + "' in [lasers]");
        } else if (section == "rates") {
            if (key == "g_khz")
                rates.g = angular_from_khz(parse_number(value, line));
            else if (key == "kappa_khz")
                rates.kappa = angular_from_khz(parse_number(value, line));
            else if (key == "delta_khz")
                rates.delta = angular_from_khz(parse_number(value, line));
            else if (key == "epsilon_re_khz") {
                epsilon.real(angular_from_khz(parse_number(value, line)));
                have_epsilon = true;
            } else if (key == "epsilon_im_khz") {
                epsilon.imag(angular_from_khz(parse_number(value, line)));
                have_epsilon = true;
            } else if (key == "epsilon_sqrt_kappa")
                eps_sqrt_kappa = parse_number(value, line);
            else if (key == "epsilon_phase_rad")
                eps_phase = parse_number(value, line);
            else
                parse_fail(line, "unknown key '" + key + "' in [rates]");
        } else if (section == "initial") {
            if (key == "kind") {
                if (value == "vacuum")
                    thermal_initial = false;
                else if (value == "thermal")
                    thermal_initial = true;
                else
                    parse_fail(line, "initial kind must be vacuum or thermal");
            } else if (key == "n_bar0")
                n_bar0 = parse_number(value, line);
            else
                parse_fail(line, "unknown key '" + key + "' in [initial]");
        } else if (section == "sweep") {
            if (key == "omega2_rabi_khz") {
                for (const auto& item : split_list(value))
                    sweep_omega2.push_back(parse_number(item, line));
            } else if (key == "n_bar0") {
                for (const auto& item : split_list(value))
                    sweep_nbar.push_back(parse_number(item, line));
            } else
                parse_fail(line, "unknown key '" + key + "' in [sweep]");
        } else if (section == "integrator") {
            IntegratorConfig& ic = config.integrator;
            if (key == "rtol")
                ic.rtol = parse_number(value, line);
            else if (key == "atol")
                ic.atol = parse_number(value, line);
            else if (key == "max_trace_drift")
                ic.max_trace_drift = parse_number(value, line);
            else if (key == "max_hermiticity")
                ic.max_hermiticity = parse_number(value, line);
            else if (key == "min_eigenvalue")
                ic.min_eigenvalue = parse_number(value, line);
            else if (key == "eigenvalue_stride")
                ic.eigenvalue_stride = parse_int(value, line);
            else
                parse_fail(line, "unknown key '" + key + "' in [integrator]");
        }
    }

    if (have_lasers == have_rates)
        throw std::domain_error(
            "config: exactly one of [lasers] or [rates] must be present");
    if (s.cutoff < 2)
        throw std::domain_error("config: [run] cutoff must be at least 2");
    if (s.samples < 2)
        throw std::domain_error("config: [run] samples must be at least 2");
    if (s.t_end_ms <= 0.0)
        throw std::domain_error("config: [run] t_end_ms must be positive");
    if (!sweep_omega2.empty() && !sweep_nbar.empty())
        throw std::domain_error("config: sweep over omega2 and n_bar0 at once is not supported");

    if (have_rates)
        s.direct_rates = rates;
    if (thermal_initial)
        s.thermal = ThermalSpec{n_bar0};
    if (have_epsilon) {
        if (have_rates)
            s.direct_rates->epsilon = epsilon;
        else
            s.params.epsilon = epsilon;
    }
    s.epsilon_sqrt_kappa = eps_sqrt_kappa;
    s.epsilon_phase = eps_phase;
    for (double nu : sweep_omega2) {
        SweepMember m;
        m.label = sweep_label_omega2(nu);
        m.omega2_rabi = angular_from_khz(nu);
        s.sweep.push_back(m);
    }
    for (double nb : sweep_nbar) {
        SweepMember m;
        m.label = sweep_label_nbar(nb);
        m.n_bar0 = nb;
        s.sweep.push_back(m);
    }
    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("config: cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

namespace {

void emit_kv(std::ostream& out, const char* key, const std::string& value) {
    out << key << " = " << value << '\n';
}

void emit_kv(std::ostream& out, const char* key, double value) {
    out << key << " = " << format_double(value) << '\n';
}

void emit_list(std::ostream& out, const char* key, const std::vector<double>& values) {
    out << key << " = ";
    for (size_t i = 0; i < values.size(); ++i) {
        if (i)
            out << ", ";
        out << format_double(values[i]);
    }
    out << '\n';
}

} // namespace

std::string emit_config(const RunConfig& config) {
    const Scenario& s = config.scenario;
    std::ostringstream out;
    out << "# ptcsim run configuration\n";
    out << "[run]\n";
    emit_kv(out, "name", s.name);
    out << "cutoff = " << s.cutoff << '\n';
    emit_kv(out, "t_end_ms", s.t_end_ms);
    out << "samples = " << s.samples << '\n';
    if (s.populations_max >= 0)
        out << "populations_max = " << s.populations_max << '\n';
    if (!s.outputs.empty()) {
        out << "outputs = ";
        for (size_t i = 0; i < s.outputs.size(); ++i)
            out << (i ? ", " : "") << s.outputs[i];
        out << '\n';
    }
    if (!s.husimi_at_ms.empty())
        emit_list(out, "husimi_at_ms", s.husimi_at_ms);
    if (!s.division_times_ms.empty())
        emit_list(out, "division_times_ms", s.division_times_ms);

    if (s.direct_rates) {
        out << "\n[rates]\n";
        emit_kv(out, "g_khz", khz_from_angular(s.direct_rates->g));
        emit_kv(out, "kappa_khz", khz_from_angular(s.direct_rates->kappa));
        emit_kv(out, "delta_khz", khz_from_angular(s.direct_rates->delta));
        if (s.epsilon_sqrt_kappa) {
            emit_kv(out, "epsilon_sqrt_kappa", *s.epsilon_sqrt_kappa);
            emit_kv(out, "epsilon_phase_rad", s.epsilon_phase);
        } else if (s.direct_rates->epsilon != Cplx(0.0, 0.0)) {
            emit_kv(out, "epsilon_re_khz", khz_from_angular(s.direct_rates->epsilon.real()));
            emit_kv(out, "epsilon_im_khz", khz_from_angular(s.direct_rates->epsilon.imag()));
        }
    } else {
        const ExperimentParams& p = s.params;
        out << "\n[lasers]\n";
        emit_kv(out, "gamma_khz", khz_from_angular(p.gamma));
        emit_kv(out, "omega_e_rabi_khz", khz_from_angular(p.omega_e_rabi));
        emit_kv(out, "omega1_rabi_khz", khz_from_angular(p.omega1_rabi));
        emit_kv(out, "omega2_rabi_khz", khz_from_angular(p.omega2_rabi));
        emit_kv(out, "omega_r_khz", khz_from_angular(p.omega_r));
        emit_kv(out, "omega_e_drive_khz", khz_from_angular(p.omega_e_drive));
        emit_kv(out, "eta", p.eta);
        if (p.eta1_tilde_override)
            emit_kv(out, "eta1_tilde", *p.eta1_tilde_override);
        if (p.eta2_tilde_override)
            emit_kv(out, "eta2_tilde", *p.eta2_tilde_override);
        if (s.eta_series_n_bar != 0.0)
            emit_kv(out, "eta_series_n_bar", s.eta_series_n_bar);
        emit_kv(out, "phi1_rad", p.phi1);
        emit_kv(out, "phi2_rad", p.phi2);
        emit_kv(out, "delta1_khz", khz_from_angular(p.delta1));
        emit_kv(out, "delta2_khz", khz_from_angular(p.delta2));
        if (s.epsilon_sqrt_kappa) {
            emit_kv(out, "epsilon_sqrt_kappa", *s.epsilon_sqrt_kappa);
            emit_kv(out, "epsilon_phase_rad", s.epsilon_phase);
        } else if (p.epsilon != Cplx(0.0, 0.0)) {
            emit_kv(out, "epsilon_re_khz", khz_from_angular(p.epsilon.real()));
            emit_kv(out, "epsilon_im_khz", khz_from_angular(p.epsilon.imag()));
        }
    }

    out << "\n[initial]\n";
    if (s.thermal) {
        emit_kv(out, "kind", std::string("thermal"));
        emit_kv(out, "n_bar0", s.thermal->n_bar0);
    } else {
        emit_kv(out, "kind", std::string("vacuum"));
    }

    std::vector<double> sweep_omega2;
    std::vector<double> sweep_nbar;
    for (const auto& member : s.sweep) {
        if (member.omega2_rabi)
            sweep_omega2.push_back(khz_from_angular(*member.omega2_rabi));
        if (member.n_bar0)
            sweep_nbar.push_back(*member.n_bar0);
    }
    if (!sweep_omega2.empty() || !sweep_nbar.empty()) {
        out << "\n[sweep]\n";
        if (!sweep_omega2.empty())
            emit_list(out, "omega2_rabi_khz", sweep_omega2);
        if (!sweep_nbar.empty())
            emit_list(out, "n_bar0", sweep_nbar);
    }

    const IntegratorConfig& ic = config.integrator;
    out << "\n[integrator]\n";
    emit_kv(out, "rtol", ic.rtol);
    emit_kv(out, "atol", ic.atol);
    emit_kv(out, "max_trace_drift", ic.max_trace_drift);
    emit_kv(out, "max_hermiticity", ic.max_hermiticity);
    emit_kv(out, "min_eigenvalue", ic.min_eigenvalue);
    out << "eigenvalue_stride = " << ic.eigenvalue_stride << '\n';
    return out.str();
}

RunConfig config_for_preset(const std::string& name) {
    RunConfig raw;
    raw.scenario = preset(name);
    // Canonicalize through the text form once: one emit/parse round reaches
    // the fixed point of the kHz <-> angular conversion, so preset runs and
    // runs from a dumped config are bitwise the same run.
    return parse_config(emit_config(raw));
}

} // namespace ptc
