// ptcsim: command-line front end for the phonon limit-cycle simulator.
//
// Subcommands:
//   run       integrate a scenario and emit data files plus a manifest
//   validate  print the rate-hierarchy report without running dynamics
//
// Exit codes: 0 success, 1 validation failure, 2 integration invariant
// breach, 3 I/O error.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ptc/io.hpp"
#include "ptc/run.hpp"
#include "ptc/units.hpp"

namespace {

struct CommonArgs {
    std::string preset;
    std::string config_path;
    std::string rates_spec;
    double epsilon_from_threshold = 0.0;
};

// "g=0.54,kappa=0.003645,delta=5" -> DirectRates (nu-kHz values).
ptc::DirectRates parse_rates_spec(const std::string& spec) {
    ptc::DirectRates rates;
    bool have_g = false, have_kappa = false, have_delta = false;
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::domain_error("--rates expects key=value pairs, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        const double value = std::stod(item.substr(eq + 1));
        if (key == "g") {
            rates.g = ptc::angular_from_khz(value);
            have_g = true;
        } else if (key == "kappa") {
            rates.kappa = ptc::angular_from_khz(value);
            have_kappa = true;
        } else if (key == "delta") {
            rates.delta = ptc::angular_from_khz(value);
            have_delta = true;
        } else if (key == "epsilon") {
            rates.epsilon = ptc::Cplx(ptc::angular_from_khz(value), 0.0);
        } else {
            throw std::domain_error("--rates: unknown key '" + key + "'");
        }
    }
    if (!have_g || !have_kappa || !have_delta)
        throw std::domain_error("--rates requires g, kappa and delta (nu values in kHz)");
    return rates;
}

ptc::RunConfig build_config(const CommonArgs& args) {
    const int sources = (!args.preset.empty()) + (!args.config_path.empty()) +
                        (!args.rates_spec.empty());
    if (sources != 1)
        throw std::domain_error(
            "exactly one of --preset, --config or --rates must be given");

    ptc::RunConfig config;
    if (!args.preset.empty()) {
        config = ptc::config_for_preset(args.preset);
    } else if (!args.config_path.empty()) {
        config = ptc::load_config(args.config_path);
    } else {
        config.scenario.name = "rates";
        config.scenario.direct_rates = parse_rates_spec(args.rates_spec);
        config.scenario.cutoff = 128;
        config.scenario.t_end_ms = 5.0;
        config.scenario.samples = 500;
        config.scenario.outputs = {"trajectory", "classical"};
    }
    if (args.epsilon_from_threshold > 0.0)
        config.scenario.epsilon_sqrt_kappa = args.epsilon_from_threshold;
    return config;
}

void print_validation(const ptc::ValidationReport& report) {
    std::printf("rate hierarchy at threshold %s:\n",
                ptc::format_double(report.threshold).c_str());
    for (const auto& link : report.links)
        std::printf("  %-24s %12.6g >> %-12.6g ratio %10.4g  [%s]\n", link.name.c_str(),
                    ptc::khz_from_angular(link.lhs), ptc::khz_from_angular(link.rhs),
                    link.ratio, link.pass ? "pass" : "FAIL");
    std::printf("overall: %s\n", report.pass ? "pass" : "FAIL");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"phonon limit-cycle simulator (Fock-basis Lindblad dynamics)"};
    app.require_subcommand(1);

    CommonArgs run_args, validate_args;
    std::string out_dir = "ptcsim-out";
    int cutoff_override = 0;
    int samples_override = 0;
    double tol_override = 0.0;
    int parallel = 1;
    bool force = false;
    std::vector<double> husimi_at;
    std::string formats = "csv,json";

    CLI::App* run_cmd = app.add_subcommand("run", "run a scenario and write data files");
    run_cmd->add_option("--preset", run_args.preset, "preset name (fig2..fig5, oracle-small)");
    run_cmd->add_option("--config", run_args.config_path, "run-configuration file");
    run_cmd->add_option("--rates", run_args.rates_spec,
                        "direct rates g=..,kappa=..,delta=.. in kHz");
    run_cmd->add_option("--epsilon-from-threshold", run_args.epsilon_from_threshold,
                        "set |epsilon| from the rescaled drive constant (angular reading)");
    run_cmd->add_option("--out", out_dir, "output directory");
    run_cmd->add_option("--cutoff", cutoff_override, "Fock cutoff override");
    run_cmd->add_option("--samples", samples_override, "sample count override");
    run_cmd->add_option("--tol", tol_override, "integrator rtol override");
    run_cmd->add_option("--parallel", parallel, "sweep parallelism degree");
    run_cmd->add_flag("--force", force, "proceed past hard validation failures");
    run_cmd->add_option("--husimi-at", husimi_at, "phase-space snapshot times (ms)")
        ->delimiter(',');
    run_cmd->add_option("--formats", formats, "output formats: csv,json[,long]");

    CLI::App* validate_cmd =
        app.add_subcommand("validate", "print the rate-hierarchy report and exit");
    validate_cmd->add_option("--preset", validate_args.preset, "preset name");
    validate_cmd->add_option("--config", validate_args.config_path, "run-configuration file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate_cmd->parsed()) {
            const ptc::RunConfig config = build_config(validate_args);
            if (config.scenario.direct_rates) {
                std::printf("direct-rate run: no laser parameters, nothing to validate\n");
                return 0;
            }
            const ptc::EffectiveRates rates = ptc::derive_rates(
                config.scenario.params, config.scenario.eta_series_n_bar);
            const ptc::ValidationReport report =
                ptc::validate_chain(config.scenario.params, rates);
            print_validation(report);
            return report.pass ? 0 : 1;
        }

        ptc::RunConfig config = build_config(run_args);
        if (cutoff_override > 0)
            config.scenario.cutoff = cutoff_override;
        if (samples_override > 0)
            config.scenario.samples = samples_override;
        if (tol_override > 0.0)
            config.integrator.rtol = tol_override;
        if (!husimi_at.empty()) {
            config.scenario.husimi_at_ms = husimi_at;
            if (std::find(config.scenario.outputs.begin(), config.scenario.outputs.end(),
                          "husimi") == config.scenario.outputs.end())
                config.scenario.outputs.push_back("husimi");
        }
        // Canonicalize after overrides so a rerun from the dumped config is
        // bitwise identical.
        config = ptc::parse_config(ptc::emit_config(config));

        ptc::RunOptions options;
        options.parallel = parallel;
        options.force = force;

        const ptc::RunResult result = ptc::run_scenario(config, options);

        ptc::OutputOptions output;
        output.out_dir = out_dir;
        output.csv = formats.find("csv") != std::string::npos;
        output.json = formats.find("json") != std::string::npos;
        output.husimi_long = formats.find("long") != std::string::npos;
        const std::vector<std::string> files = ptc::write_outputs(result, output);

        if (result.validation)
            std::printf("validation: %s\n", result.validation->pass ? "pass" : "FAIL");
        for (const auto& member : result.members)
            std::printf("member %-18s wall %.1fs  trace drift %.2e  min eig %.2e\n",
                        member.label.empty() ? "(single)" : member.label.c_str(),
                        member.wall_seconds, member.invariants.max_trace_drift,
                        member.invariants.min_eigenvalue);
        std::printf("wrote %zu files to %s\n", files.size(), out_dir.c_str());
        return 0;
    } catch (const ptc::ValidationFailure& err) {
        std::fprintf(stderr, "validation failure: %s\n", err.what());
        return 1;
    } catch (const ptc::IntegrationError& err) {
        std::fprintf(stderr, "integration invariant breach: %s\n", err.what());
        return 2;
    } catch (const std::domain_error& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 3;
    }
}
