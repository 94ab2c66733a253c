#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ptc/io.hpp"
#include "ptc/run.hpp"
#include "ptc/units.hpp"

using namespace ptc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

RunConfig tiny_rates_config() {
    RunConfig config;
    Scenario& s = config.scenario;
    s.name = "tiny";
    DirectRates rates;
    rates.g = angular_from_khz(0.54);
    rates.kappa = angular_from_khz(0.003645);
    rates.delta = angular_from_khz(5.0);
    s.direct_rates = rates;
    s.epsilon_sqrt_kappa = 14.27;
    s.cutoff = 20;
    s.t_end_ms = 0.4;
    s.samples = 40;
    s.populations_max = 4;
    s.husimi_at_ms = {0.0, 0.4};
    s.outputs = {"trajectory", "classical", "husimi"};
    return parse_config(emit_config(config)); // canonical form
}

} // namespace

TEST_CASE("format_double round-trips") {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> mantissa(-1.0, 1.0);
    std::uniform_int_distribution<int> exponent(-30, 30);
    for (int trial = 0; trial < 2000; ++trial) {
        const double value = std::ldexp(mantissa(gen), exponent(gen));
        const std::string text = format_double(value);
        CHECK(std::strtod(text.c_str(), nullptr) == value);
    }
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(1.5) == "1.5");
}

TEST_CASE("csv writers") {
    Trajectory traj;
    traj.times = {0.0, 0.5};
    traj.observables = {
        {"Na", {0.0, 2.0}},
        {"purity", {1.0, 0.5}},
        {"p0", {1.0, 0.25}},
        {"p1", {0.0, 0.5}},
    };
    const std::string csv = trajectory_csv(traj, 9.0);
    std::istringstream lines(csv);
    std::string header, row0, row1;
    std::getline(lines, header);
    std::getline(lines, row0);
    std::getline(lines, row1);
    CHECK(header == "t_ms,Na,rescaled_Na,purity,p0,p1");
    CHECK(row0 == "0,0,0,1,1,0");
    CHECK(row1 == "0.5,2,18,0.5,0.25,0.5");

    ClassicalTrajectory cl;
    cl.times = {0.0};
    cl.alphas = {Cplx(1.0, -2.0)};
    const std::string ccsv = classical_csv(cl);
    CHECK(ccsv == "t_ms,re_alpha,im_alpha,abs2_alpha\n0,1,-2,5\n");
}

TEST_CASE("validation report json schema") {
    ChainLink link;
    link.name = "gamma_over_omega_e";
    link.lhs = 2.0;
    link.rhs = 1.0;
    link.ratio = 2.0;
    link.pass = false;
    ValidationReport report;
    report.threshold = 10.0;
    report.links = {link};
    report.pass = false;
    const auto j = validation_report_json(report);
    CHECK(j["threshold"] == 10.0);
    CHECK(j["links"][0]["name"] == "gamma_over_omega_e");
    CHECK(j["links"][0]["lhs"] == 2.0);
    CHECK(j["links"][0]["rhs"] == 1.0);
    CHECK(j["links"][0]["ratio"] == 2.0);
    CHECK(j["links"][0]["pass"] == false);
}

TEST_CASE("operator dump lists nonzero entries") {
    Operator op = Operator::Zero(3, 3);
    op(0, 2) = Cplx(1.5, -0.5);
    const auto j = operator_json(op);
    CHECK(j["dim"] == 3);
    REQUIRE(j["entries"].size() == 1);
    CHECK(j["entries"][0][0] == 0);
    CHECK(j["entries"][0][1] == 2);
    CHECK(j["entries"][0][2] == 1.5);
    CHECK(j["entries"][0][3] == -0.5);
}

TEST_CASE("run_scenario end to end with outputs") {
    const RunConfig config = tiny_rates_config();
    const RunResult result = run_scenario(config);
    REQUIRE(result.members.size() == 1);
    const MemberResult& member = result.members[0];
    CHECK(member.trajectory.times.size() == 41);
    CHECK(member.husimi.size() == 2);
    CHECK(member.classical.times.size() == 41);
    CHECK_FALSE(result.validation.has_value()); // direct rates: no chain
    CHECK(member.invariants.max_trace_drift < 1e-9);

    const fs::path out_dir =
        fs::temp_directory_path() / "ptc_test_run_io";
    fs::remove_all(out_dir);
    OutputOptions options;
    options.out_dir = out_dir;
    options.husimi_long = true;
    const auto files = write_outputs(result, options);

    CHECK(fs::exists(out_dir / "tiny_trajectory.csv"));
    CHECK(fs::exists(out_dir / "tiny_classical.csv"));
    CHECK(fs::exists(out_dir / "tiny_husimi_t0ms.csv"));
    CHECK(fs::exists(out_dir / "tiny_husimi_t0.4ms.csv"));
    CHECK(fs::exists(out_dir / "tiny_husimi_t0.4ms_axes.json"));
    CHECK(fs::exists(out_dir / "tiny_husimi_t0.4ms_long.csv"));
    CHECK(fs::exists(out_dir / "config.txt"));
    CHECK(fs::exists(out_dir / "manifest.json"));

    const auto manifest = nlohmann::json::parse(slurp(out_dir / "manifest.json"));
    CHECK(manifest["run"]["cutoff"] == 20);
    CHECK(manifest["members"][0]["epsilon"].contains("nu_reading_khz"));
    CHECK(manifest["members"][0]["epsilon"].contains("angular_reading_khz"));
    CHECK(manifest["members"][0]["invariants"]["max_hermiticity"] == 0.0);
    fs::remove_all(out_dir);
}

TEST_CASE("manifests are byte-identical across reruns modulo timing") {
    const RunConfig config = tiny_rates_config();
    auto manifest_text = [&config]() {
        const RunResult result = run_scenario(config);
        nlohmann::ordered_json manifest = manifest_json(result);
        manifest.erase("timing");
        return manifest.dump(2);
    };
    CHECK(manifest_text() == manifest_text());
}

TEST_CASE("a preset run and a run from its dumped config are the same run") {
    // miniature preset stand-in: canonical fig3 config with a tiny cutoff and
    // horizon so the test stays fast
    RunConfig config = config_for_preset("fig3");
    config.scenario.cutoff = 16;
    config.scenario.t_end_ms = 0.2;
    config.scenario.samples = 20;
    config.scenario.husimi_at_ms = {0.0, 0.2};
    config = parse_config(emit_config(config));

    const std::string dumped = emit_config(config);
    const RunConfig reloaded = parse_config(dumped);

    auto manifest_of = [](const RunConfig& c) {
        nlohmann::ordered_json manifest = manifest_json(run_scenario(c));
        manifest.erase("timing");
        return manifest.dump(2);
    };
    CHECK(manifest_of(config) == manifest_of(reloaded));
}

TEST_CASE("sweep members run in parallel with deterministic results") {
    RunConfig config = config_for_preset("fig2");
    config.scenario.cutoff = 12;
    config.scenario.t_end_ms = 0.1;
    config.scenario.samples = 10;
    config.scenario.outputs = {"trajectory"};
    config = parse_config(emit_config(config));

    RunOptions serial;
    serial.parallel = 1;
    RunOptions parallel;
    parallel.parallel = 2;
    const RunResult a = run_scenario(config, serial);
    const RunResult b = run_scenario(config, parallel);
    REQUIRE(a.members.size() == 3);
    REQUIRE(b.members.size() == 3);
    for (size_t m = 0; m < 3; ++m) {
        CHECK(a.members[m].label == b.members[m].label);
        const auto& na_a = a.members[m].trajectory.series("Na")->values;
        const auto& na_b = b.members[m].trajectory.series("Na")->values;
        for (size_t i = 0; i < na_a.size(); ++i)
            CHECK(na_a[i] == na_b[i]);
    }
}

TEST_CASE("hard validation failure aborts unless forced") {
    RunConfig config = config_for_preset("fig3");
    config.scenario.cutoff = 8;
    config.scenario.t_end_ms = 0.05;
    config.scenario.samples = 5;
    config.scenario.husimi_at_ms.clear();
    config.scenario.outputs = {"trajectory"};
    config.scenario.params.omega_e_rabi = config.scenario.params.gamma; // ratio 1 < 2
    config.scenario.epsilon_sqrt_kappa.reset();
    config.scenario.params.epsilon = Cplx(0.0, 0.0);

    CHECK_THROWS_AS(run_scenario(config), ValidationFailure);

    RunOptions forced;
    forced.force = true;
    const RunResult result = run_scenario(config, forced);
    CHECK(result.members.size() == 1);
    REQUIRE(result.validation.has_value());
    CHECK_FALSE(result.validation->pass);
}
