#include <doctest.h>

#include <cmath>

#include "ptc/config.hpp"
#include "ptc/presets.hpp"
#include "ptc/units.hpp"

using namespace ptc;

TEST_CASE("preset names and errors") {
    for (const auto& name : preset_names())
        CHECK_NOTHROW(preset(name));
    CHECK_THROWS_WITH_AS(preset("fig9"), doctest::Contains("valid names"),
                         std::domain_error);
}

TEST_CASE("fig presets carry the reference working point") {
    const Scenario fig3 = preset("fig3");
    CHECK(fig3.t_end_ms == 5.0);
    CHECK(fig3.samples == 500);
    REQUIRE(fig3.husimi_at_ms.size() == 2);
    CHECK(fig3.husimi_at_ms[0] == 0.0);
    CHECK(fig3.husimi_at_ms[1] == 5.0);
    CHECK(khz_from_angular(fig3.params.omega2_rabi) == doctest::Approx(300.0));
    CHECK(!fig3.thermal.has_value());
    CHECK(*fig3.params.eta1_tilde_override == 0.066);
    CHECK(*fig3.params.eta2_tilde_override == 0.0018);
    CHECK(*fig3.epsilon_sqrt_kappa == 14.27);

    const Scenario fig2 = preset("fig2");
    REQUIRE(fig2.sweep.size() == 3);
    CHECK(fig2.sweep[0].label == "omega2_300khz");
    CHECK(khz_from_angular(*fig2.sweep[0].omega2_rabi) == doctest::Approx(300.0));
    CHECK(khz_from_angular(*fig2.sweep[1].omega2_rabi) == doctest::Approx(500.0));
    CHECK(khz_from_angular(*fig2.sweep[2].omega2_rabi) == doctest::Approx(700.0));

    const Scenario fig4 = preset("fig4");
    REQUIRE(fig4.sweep.size() == 3);
    CHECK(*fig4.sweep[0].n_bar0 == 1.0);
    CHECK(*fig4.sweep[1].n_bar0 == 5.0);
    CHECK(*fig4.sweep[2].n_bar0 == 10.0);

    const Scenario fig5 = preset("fig5");
    REQUIRE(fig5.thermal.has_value());
    CHECK(fig5.thermal->n_bar0 == 5.0);
    CHECK(fig5.populations_max == 31);
    REQUIRE(fig5.division_times_ms.size() == 6);
    CHECK(fig5.division_times_ms.front() == 2.5);
    CHECK(fig5.division_times_ms.back() == doctest::Approx(2.75));
    // the division points land exactly on the 10 us sample grid
    const double dt = fig5.t_end_ms / fig5.samples;
    for (double t : fig5.division_times_ms)
        CHECK(std::abs(t / dt - std::round(t / dt)) < 1e-9);
}

TEST_CASE("every figure preset passes the chain at threshold 10") {
    for (const std::string name : {"fig2", "fig3", "fig4", "fig5"}) {
        const Scenario s = preset(name);
        auto check_params = [&](ExperimentParams p) {
            const EffectiveRates rates = derive_rates(p, s.eta_series_n_bar);
            CHECK(validate_chain(p, rates, 10.0).pass);
        };
        check_params(s.params);
        for (const auto& member : s.sweep) {
            ExperimentParams p = s.params;
            if (member.omega2_rabi)
                p.omega2_rabi = *member.omega2_rabi;
            check_params(p);
        }
    }
}

TEST_CASE("oracle scenario sits at the requested chain ratio") {
    for (double ratio : {10.0, 30.0}) {
        const Scenario s = oracle_scenario(ratio);
        CHECK(s.cutoff == 6);
        const EffectiveRates rates = derive_rates(s.params);
        const ValidationReport report = validate_chain(s.params, rates, 0.99 * ratio);
        CHECK(report.pass);
        for (const auto& link : report.links)
            CHECK(link.ratio >= 0.999 * ratio);
        // g = kappa keeps the attractor tiny
        CHECK(rates.g == doctest::Approx(rates.kappa));
        CHECK(rates.g == doctest::Approx(rates.Gamma / (ratio * ratio)));
    }
}

TEST_CASE("presets are pure data") {
    for (const auto& name : preset_names()) {
        RunConfig a;
        a.scenario = preset(name);
        RunConfig b;
        b.scenario = preset(name);
        CHECK(emit_config(a) == emit_config(b));
    }
}

TEST_CASE("config round-trip is the identity on canonical form") {
    for (const auto& name : preset_names()) {
        const RunConfig canonical = config_for_preset(name);
        const std::string text = emit_config(canonical);
        const RunConfig reparsed = parse_config(text);
        CHECK(emit_config(reparsed) == text);

        // canonical values are reproduced exactly
        CHECK(reparsed.scenario.cutoff == canonical.scenario.cutoff);
        CHECK(reparsed.scenario.t_end_ms == canonical.scenario.t_end_ms);
        CHECK(reparsed.scenario.params.gamma == canonical.scenario.params.gamma);
        CHECK(reparsed.scenario.params.omega2_rabi == canonical.scenario.params.omega2_rabi);
        CHECK(reparsed.scenario.params.epsilon == canonical.scenario.params.epsilon);
        REQUIRE(reparsed.scenario.sweep.size() == canonical.scenario.sweep.size());
        for (size_t i = 0; i < reparsed.scenario.sweep.size(); ++i)
            CHECK(reparsed.scenario.sweep[i].label == canonical.scenario.sweep[i].label);
    }
}

TEST_CASE("config parser diagnostics") {
    CHECK_THROWS_WITH_AS(parse_config("[run]\nbogus_key = 1\n"),
                         doctest::Contains("line 2"), std::domain_error);
    CHECK_THROWS_WITH_AS(parse_config("[nope]\n"), doctest::Contains("unknown section"),
                         std::domain_error);
    CHECK_THROWS_WITH_AS(parse_config("cutoff = 4\n"),
                         doctest::Contains("outside any section"), std::domain_error);
    CHECK_THROWS_AS(parse_config("[run]\ncutoff = twelve\n"), std::domain_error);

    const char* no_source = "[run]\nname = x\ncutoff = 8\nt_end_ms = 1\nsamples = 10\n";
    CHECK_THROWS_WITH_AS(parse_config(no_source), doctest::Contains("exactly one"),
                         std::domain_error);

    const char* both = "[run]\nname = x\ncutoff = 8\nt_end_ms = 1\nsamples = 10\n"
                       "[lasers]\ngamma_khz = 1\n[rates]\ng_khz = 1\n";
    CHECK_THROWS_WITH_AS(parse_config(both), doctest::Contains("exactly one"),
                         std::domain_error);
}

TEST_CASE("direct-rate configs parse and emit") {
    const char* text =
        "[run]\nname = custom\ncutoff = 24\nt_end_ms = 2\nsamples = 50\n"
        "outputs = trajectory, classical\n"
        "[rates]\ng_khz = 0.54\nkappa_khz = 0.003645\ndelta_khz = 5\n"
        "epsilon_sqrt_kappa = 14.27\nepsilon_phase_rad = 0\n"
        "[initial]\nkind = thermal\nn_bar0 = 2.5\n";
    const RunConfig config = parse_config(text);
    REQUIRE(config.scenario.direct_rates.has_value());
    CHECK(khz_from_angular(config.scenario.direct_rates->g) == doctest::Approx(0.54));
    REQUIRE(config.scenario.thermal.has_value());
    CHECK(config.scenario.thermal->n_bar0 == 2.5);
    CHECK(*config.scenario.epsilon_sqrt_kappa == 14.27);

    const std::string emitted = emit_config(config);
    CHECK(emit_config(parse_config(emitted)) == emitted);
}
