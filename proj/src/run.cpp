#include "ptc/run.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "ptc/io.hpp"
#include "ptc/units.hpp"

namespace ptc {

namespace {

struct ResolvedMember {
    std::string label;
    double g = 0.0;
    double kappa = 0.0;
    double delta = 0.0;
    double Gamma = 0.0;
    double eta1_tilde = 0.0;
    double eta2_tilde = 0.0;
    Cplx epsilon{0.0, 0.0};
    bool thermal = false;
    double n_bar0 = 0.0;
    double rescale_factor = 1.0;
    std::optional<ValidationReport> validation;
    std::optional<double> omega2_khz;
};

ResolvedMember resolve_member(const Scenario& scenario, const SweepMember* member,
                              double validation_threshold) {
    ResolvedMember r;
    if (member)
        r.label = member->label;

    if (scenario.thermal) {
        r.thermal = true;
        r.n_bar0 = scenario.thermal->n_bar0;
    }
    if (member && member->n_bar0) {
        r.thermal = true;
        r.n_bar0 = *member->n_bar0;
    }

    if (scenario.direct_rates) {
        const DirectRates& dr = *scenario.direct_rates;
        r.g = dr.g;
        r.kappa = dr.kappa;
        r.delta = dr.delta;
        r.epsilon = dr.epsilon;
    } else {
        ExperimentParams params = scenario.params;
        if (member && member->omega2_rabi)
            params.omega2_rabi = *member->omega2_rabi;
        const EffectiveRates rates = derive_rates(params, scenario.eta_series_n_bar);
        r.g = rates.g;
        r.kappa = rates.kappa;
        r.Gamma = rates.Gamma;
        r.eta1_tilde = rates.eta1_tilde;
        r.eta2_tilde = rates.eta2_tilde;
        r.delta = params.delta();
        r.epsilon = params.epsilon;
        const double omega2_khz = khz_from_angular(params.omega2_rabi);
        r.omega2_khz = omega2_khz;
        r.rescale_factor = omega2_khz * omega2_khz;
        r.validation = validate_chain(params, rates, validation_threshold);
    }

    if (scenario.epsilon_sqrt_kappa) {
        if (r.kappa <= 0.0)
            throw std::domain_error("run: epsilon_sqrt_kappa rule needs kappa > 0");
        const double magnitude = *scenario.epsilon_sqrt_kappa / std::sqrt(r.kappa);
        r.epsilon = std::polar(magnitude, scenario.epsilon_phase);
    }
    return r;
}

std::vector<double> build_grid(const Scenario& scenario) {
    std::vector<double> grid;
    grid.reserve(scenario.samples + 1);
    for (int i = 0; i <= scenario.samples; ++i)
        grid.push_back(scenario.t_end_ms * i / scenario.samples);
    auto add_times = [&grid, &scenario](const std::vector<double>& times) {
        for (double t : times) {
            if (t < 0.0 || t > scenario.t_end_ms)
                throw std::domain_error("run: requested time outside [0, t_end]");
            grid.push_back(t);
        }
    };
    add_times(scenario.husimi_at_ms);
    add_times(scenario.division_times_ms);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               grid.end());
    return grid;
}

bool wants_output(const Scenario& scenario, const std::string& name) {
    if (scenario.outputs.empty())
        return name == "trajectory"; // default output set
    return std::find(scenario.outputs.begin(), scenario.outputs.end(), name) !=
           scenario.outputs.end();
}

MemberResult run_member(const RunConfig& config, const ResolvedMember& resolved) {
    const Scenario& scenario = config.scenario;
    const auto started = std::chrono::steady_clock::now();

    MemberResult result;
    result.label = resolved.label;
    result.rates.Gamma = resolved.Gamma;
    result.rates.g = resolved.g;
    result.rates.kappa = resolved.kappa;
    result.rates.eta1_tilde = resolved.eta1_tilde;
    result.rates.eta2_tilde = resolved.eta2_tilde;
    result.delta = resolved.delta;
    result.epsilon = resolved.epsilon;
    result.thermal = resolved.thermal;
    result.n_bar0 = resolved.n_bar0;
    result.omega2_khz = resolved.omega2_khz;
    result.rescale_factor = resolved.rescale_factor;
    if (resolved.kappa > 0.0)
        result.classical_radius = std::sqrt(resolved.g / (2.0 * resolved.kappa));

    const FockSpace space(scenario.cutoff);
    const DensityMatrix rho0 = resolved.thermal ? thermal_state(space, resolved.n_bar0)
                                                : fock_state(space, 0);
    const PhononModel model =
        make_phonon_model(resolved.delta, resolved.epsilon, resolved.g, resolved.kappa, space);

    const std::vector<double> grid = build_grid(scenario);

    IntegrateOptions options;
    options.ode.rtol = config.integrator.rtol;
    options.ode.atol = config.integrator.atol;
    options.budget.max_trace_drift = config.integrator.max_trace_drift;
    options.budget.max_hermiticity = config.integrator.max_hermiticity;
    options.budget.min_eigenvalue = config.integrator.min_eigenvalue;
    options.eigenvalue_stride = config.integrator.eigenvalue_stride;
    options.populations_max = scenario.populations_max;
    options.snapshot_times = scenario.husimi_at_ms;

    result.trajectory = integrate(model, rho0, grid, options, &result.invariants);

    if (wants_output(scenario, "husimi")) {
        double radius = result.classical_radius;
        if (radius <= 0.0) {
            double na_max = 1.0;
            for (double v : result.trajectory.series("Na")->values)
                na_max = std::max(na_max, v);
            radius = std::sqrt(na_max) + 2.0;
        }
        const HusimiGridSpec spec = HusimiGridSpec::centered(radius);
        for (const auto& state : result.trajectory.states)
            result.husimi.push_back(husimi_q(state, spec));
    }

    if (wants_output(scenario, "classical")) {
        const ClassicalParams cp{resolved.g, resolved.kappa, resolved.delta, resolved.epsilon};
        result.classical = integrate_classical(0.0, cp, grid);
    }

    result.wall_seconds = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - started)
                              .count();
    return result;
}

} // namespace

RunResult run_scenario(const RunConfig& config, const RunOptions& options) {
    const auto started = std::chrono::steady_clock::now();
    const Scenario& scenario = config.scenario;

    std::vector<ResolvedMember> resolved;
    if (scenario.sweep.empty())
        resolved.push_back(resolve_member(scenario, nullptr, options.validation_threshold));
    else
        for (const auto& member : scenario.sweep)
            resolved.push_back(resolve_member(scenario, &member, options.validation_threshold));

    RunResult result;
    result.config = config;
    if (!scenario.direct_rates) {
        const EffectiveRates base_rates =
            derive_rates(scenario.params, scenario.eta_series_n_bar);
        result.validation =
            validate_chain(scenario.params, base_rates, options.validation_threshold);
    }

    if (!options.force) {
        for (const auto& member : resolved) {
            if (!member.validation)
                continue;
            for (const auto& link : member.validation->links) {
                if (link.ratio < options.hard_ratio) {
                    std::ostringstream oss;
                    oss << "rate hierarchy fails hard on link " << link.name << " (ratio "
                        << link.ratio << " < " << options.hard_ratio
                        << "); rerun with force to proceed";
                    throw ValidationFailure(oss.str());
                }
            }
        }
    }

    result.members.resize(resolved.size());
    const int degree =
        std::max(1, std::min<int>(options.parallel, static_cast<int>(resolved.size())));
    if (degree == 1) {
        for (size_t i = 0; i < resolved.size(); ++i)
            result.members[i] = run_member(config, resolved[i]);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::exception_ptr> errors(resolved.size());
        std::vector<std::thread> workers;
        for (int w = 0; w < degree; ++w) {
            workers.emplace_back([&]() {
                for (size_t i = next.fetch_add(1); i < resolved.size(); i = next.fetch_add(1)) {
                    try {
                        result.members[i] = run_member(config, resolved[i]);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
        for (auto& worker : workers)
            worker.join();
        for (const auto& error : errors)
            if (error)
                std::rethrow_exception(error);
    }

    for (size_t i = 0; i < resolved.size(); ++i)
        result.members[i].validation = resolved[i].validation;

    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

namespace {

nlohmann::ordered_json rate_json(double angular) {
    nlohmann::ordered_json out;
    out["khz"] = khz_from_angular(angular);
    out["rad_per_ms"] = angular;
    return out;
}

nlohmann::ordered_json invariants_json(const InvariantSummary& inv) {
    nlohmann::ordered_json out;
    out["max_trace_drift"] = inv.max_trace_drift;
    out["max_hermiticity"] = inv.max_hermiticity;
    out["min_eigenvalue"] = inv.min_eigenvalue;
    out["purity_min"] = inv.purity_min;
    out["purity_max"] = inv.purity_max;
    out["max_edge_population"] = inv.max_edge_population;
    out["final_edge_population"] = inv.final_edge_population;
    out["eigenvalue_checkpoints"] = inv.eigenvalue_checkpoints;
    out["steps_accepted"] = inv.ode.steps_accepted;
    out["steps_rejected"] = inv.ode.steps_rejected;
    out["rhs_evaluations"] = inv.ode.rhs_evaluations;
    return out;
}

} // namespace

nlohmann::ordered_json manifest_json(const RunResult& result) {
    const Scenario& s = result.config.scenario;
    nlohmann::ordered_json out;

    nlohmann::ordered_json run;
    run["name"] = s.name;
    run["cutoff"] = s.cutoff;
    run["t_end_ms"] = s.t_end_ms;
    run["samples"] = s.samples;
    run["outputs"] = s.outputs;
    if (s.populations_max >= 0)
        run["populations_max"] = s.populations_max;
    if (!s.husimi_at_ms.empty())
        run["husimi_at_ms"] = s.husimi_at_ms;
    if (!s.division_times_ms.empty())
        run["division_times_ms"] = s.division_times_ms;
    out["run"] = run;

    nlohmann::ordered_json params;
    if (s.direct_rates) {
        params["kind"] = "direct_rates";
        params["g"] = rate_json(s.direct_rates->g);
        params["kappa"] = rate_json(s.direct_rates->kappa);
        params["delta"] = rate_json(s.direct_rates->delta);
    } else {
        const ExperimentParams& p = s.params;
        params["kind"] = "lasers";
        params["gamma"] = rate_json(p.gamma);
        params["omega_e_rabi"] = rate_json(p.omega_e_rabi);
        params["omega1_rabi"] = rate_json(p.omega1_rabi);
        params["omega2_rabi"] = rate_json(p.omega2_rabi);
        params["omega_r"] = rate_json(p.omega_r);
        params["omega_e_drive"] = rate_json(p.omega_e_drive);
        params["delta1"] = rate_json(p.delta1);
        params["delta2"] = rate_json(p.delta2);
        params["phi1_rad"] = p.phi1;
        params["phi2_rad"] = p.phi2;
        params["eta"] = p.eta;
        nlohmann::ordered_json eta_tilde;
        eta_tilde["series_n_bar"] = s.eta_series_n_bar;
        eta_tilde["series_eta1"] = eta_tilde_1(p.eta, s.eta_series_n_bar);
        eta_tilde["series_eta2"] = eta_tilde_2(p.eta, s.eta_series_n_bar);
        if (p.eta1_tilde_override)
            eta_tilde["eta1_override"] = *p.eta1_tilde_override;
        if (p.eta2_tilde_override)
            eta_tilde["eta2_override"] = *p.eta2_tilde_override;
        params["eta_tilde"] = eta_tilde;
    }
    if (s.epsilon_sqrt_kappa) {
        nlohmann::ordered_json rule;
        rule["epsilon_sqrt_kappa"] = *s.epsilon_sqrt_kappa;
        rule["phase_rad"] = s.epsilon_phase;
        rule["reading"] = "angular";
        params["epsilon_rule"] = rule;
    }
    out["parameters"] = params;

    if (result.validation)
        out["validation"] = validation_report_json(*result.validation);

    out["members"] = nlohmann::ordered_json::array();
    for (const auto& member : result.members) {
        nlohmann::ordered_json m;
        m["label"] = member.label;
        m["initial_state"] = member.thermal ? "thermal" : "vacuum";
        if (member.thermal)
            m["n_bar0"] = member.n_bar0;
        if (member.omega2_khz)
            m["omega2_rabi_khz"] = *member.omega2_khz;
        nlohmann::ordered_json rates;
        if (member.rates.Gamma > 0.0) {
            rates["Gamma"] = rate_json(member.rates.Gamma);
            rates["eta1_tilde"] = member.rates.eta1_tilde;
            rates["eta2_tilde"] = member.rates.eta2_tilde;
        }
        rates["g"] = rate_json(member.rates.g);
        rates["kappa"] = rate_json(member.rates.kappa);
        rates["delta"] = rate_json(member.delta);
        m["rates"] = rates;

        nlohmann::ordered_json eps;
        eps["re_khz"] = khz_from_angular(member.epsilon.real());
        eps["im_khz"] = khz_from_angular(member.epsilon.imag());
        eps["abs_khz"] = khz_from_angular(std::abs(member.epsilon));
        if (s.epsilon_sqrt_kappa && member.rates.kappa > 0.0) {
            // Both unit readings of the rescaled drive-strength constant.
            eps["angular_reading_khz"] =
                khz_from_angular(*s.epsilon_sqrt_kappa / std::sqrt(member.rates.kappa));
            eps["nu_reading_khz"] =
                *s.epsilon_sqrt_kappa /
                std::sqrt(khz_from_angular(member.rates.kappa));
        }
        m["epsilon"] = eps;

        if (member.rates.kappa > 0.0) {
            nlohmann::ordered_json cl;
            const double threshold = hopf_threshold(member.rates.g, member.delta);
            cl["hopf_threshold_angular"] = threshold;
            cl["epsilon_sqrt_kappa_angular"] =
                std::abs(member.epsilon) * std::sqrt(member.rates.kappa);
            cl["drive_over_threshold"] =
                threshold > 0.0
                    ? std::abs(member.epsilon) * std::sqrt(member.rates.kappa) / threshold
                    : 0.0;
            cl["limit_cycle_radius"] = member.classical_radius;
            m["classical"] = cl;
        }
        if (member.validation)
            m["validation"] = validation_report_json(*member.validation);
        m["rescale_factor_khz2"] = member.rescale_factor;
        m["invariants"] = invariants_json(member.invariants);
        out["members"].push_back(m);
    }

    nlohmann::ordered_json integrator;
    integrator["method"] = "dormand-prince-5(4), hermitian-structure-preserving rhs";
    integrator["rtol"] = result.config.integrator.rtol;
    integrator["atol"] = result.config.integrator.atol;
    integrator["max_trace_drift"] = result.config.integrator.max_trace_drift;
    integrator["max_hermiticity"] = result.config.integrator.max_hermiticity;
    integrator["min_eigenvalue"] = result.config.integrator.min_eigenvalue;
    integrator["eigenvalue_stride"] = result.config.integrator.eigenvalue_stride;
    out["integrator"] = integrator;

    nlohmann::ordered_json timing;
    timing["total_wall_s"] = result.wall_seconds;
    auto member_walls = nlohmann::ordered_json::array();
    for (const auto& member : result.members)
        member_walls.push_back(member.wall_seconds);
    timing["member_wall_s"] = member_walls;
    out["timing"] = timing;
    return out;
}

namespace {

std::string member_prefix(const RunResult& result, const MemberResult& member) {
    std::string prefix = result.config.scenario.name.empty() ? "run"
                                                             : result.config.scenario.name;
    if (!member.label.empty())
        prefix += "_" + member.label;
    return prefix;
}

std::string time_tag(double t_ms) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%g", t_ms);
    return buffer;
}

} // namespace

std::vector<std::string> write_outputs(const RunResult& result, const OutputOptions& options) {
    namespace fs = std::filesystem;
    const Scenario& s = result.config.scenario;
    std::error_code ec;
    fs::create_directories(options.out_dir, ec);
    if (ec)
        throw std::runtime_error("write_outputs: cannot create " + options.out_dir.string() +
                                 ": " + ec.message());

    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& content) {
        write_text_file(options.out_dir / name, content);
        written.push_back(name);
    };

    bool classical_written = false;
    for (const auto& member : result.members) {
        const std::string prefix = member_prefix(result, member);
        if (options.csv && wants_output(s, "trajectory"))
            emit(prefix + "_trajectory.csv",
                 trajectory_csv(member.trajectory, member.rescale_factor));
        // One classical file per run: under the fixed |epsilon| sqrt(kappa)
        // drive rule the rescaled classical curve is sweep-invariant, so the
        // base member's trajectory is the shared reference.
        if (options.csv && wants_output(s, "classical") && !member.classical.times.empty() &&
            !classical_written) {
            const std::string base = s.name.empty() ? std::string("run") : s.name;
            emit(base + "_classical.csv", classical_csv(member.classical));
            classical_written = true;
        }
        if (wants_output(s, "husimi")) {
            for (size_t k = 0; k < member.husimi.size(); ++k) {
                const double t = member.trajectory.snapshot_times[k];
                const std::string tag = prefix + "_husimi_t" + time_tag(t) + "ms";
                if (options.csv)
                    emit(tag + ".csv", husimi_csv(member.husimi[k]));
                if (options.json) {
                    nlohmann::ordered_json axes = husimi_axes_json(member.husimi[k]);
                    axes["t_ms"] = t;
                    emit(tag + "_axes.json", axes.dump(2) + "\n");
                }
                if (options.husimi_long && options.csv)
                    emit(tag + "_long.csv", husimi_long_csv(member.husimi[k]));
            }
        }
        if (options.csv && wants_output(s, "divisions") && !s.division_times_ms.empty()) {
            // Rows at the division times with every recorded population column.
            std::ostringstream div;
            div << "t_ms";
            std::vector<const TimeSeries*> pops;
            for (const auto& ts : member.trajectory.observables)
                if (ts.name.size() > 1 && ts.name[0] == 'p' && std::isdigit(ts.name[1])) {
                    pops.push_back(&ts);
                    div << ',' << ts.name;
                }
            div << '\n';
            for (double t : s.division_times_ms) {
                const auto& times = member.trajectory.times;
                const auto it = std::min_element(
                    times.begin(), times.end(),
                    [t](double a, double b) { return std::abs(a - t) < std::abs(b - t); });
                const size_t index = it - times.begin();
                div << format_double(times[index]);
                for (const auto* ts : pops)
                    div << ',' << format_double(ts->values[index]);
                div << '\n';
            }
            emit(prefix + "_divisions.csv", div.str());
        }
    }

    // The validation report, canonical config and manifest are part of the
    // run record and are written regardless of the data-format flags.
    if (result.validation)
        emit("validation.json", validation_report_json(*result.validation).dump(2) + "\n");
    emit("config.txt", emit_config(result.config));
    nlohmann::ordered_json manifest = manifest_json(result);
    manifest["outputs_written"] = written;
    emit("manifest.json", manifest.dump(2) + "\n");
    return written;
}

} // namespace ptc
