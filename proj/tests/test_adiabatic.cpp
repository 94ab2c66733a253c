#include <doctest.h>

#include <cmath>
#include <random>

#include "ptc/adiabatic.hpp"
#include "ptc/units.hpp"

#include "test_util.hpp"

using namespace ptc;

namespace {

ExperimentParams section3() {
    ExperimentParams p;
    p.gamma = angular_from_khz(22400.0);
    p.omega_e_rabi = angular_from_khz(1340.0);
    p.omega1_rabi = angular_from_khz(100.0);
    p.omega2_rabi = angular_from_khz(300.0);
    p.eta = 0.07;
    p.omega_r = angular_from_khz(1000.0);
    p.omega_e_drive = angular_from_khz(1005.0);
    p.epsilon = Cplx(angular_from_khz(15.0), 0.0);
    p.eta1_tilde_override = 0.066;
    p.eta2_tilde_override = 0.0018;
    return p;
}

// Single three-level ion with one decaying excited level: the minimal
// elimination example.
PartitionedModel single_ion_model(double gamma, double omega_e) {
    PartitionedModel model;
    const int d = 3;
    model.excited_projector = level_projector(d, 2);
    const Operator p_e = model.excited_projector;
    const Operator p_g = Operator::Identity(d, d) - p_e;
    model.h_ground = Operator::Zero(d, d);
    model.h_excited = Operator::Zero(d, d);
    model.coupling_up = p_e * ((0.5 * omega_e) * level_transition(d, 2, 1)) * p_g;
    model.coupling_down = model.coupling_up.adjoint();
    model.jumps = {p_g * (std::sqrt(gamma) * level_transition(d, 0, 2)) * p_e};
    return model;
}

} // namespace

TEST_CASE("non-Hermitian Hamiltonian from jumps") {
    const double gamma = 4.0;
    const PartitionedModel model = single_ion_model(gamma, 1.0);
    const Operator h_nh = non_hermitian_h(model);
    Operator expected = Operator::Zero(3, 3);
    expected(2, 2) = Cplx(0.0, -0.5 * gamma);
    CHECK(test::max_abs_diff(h_nh, expected) < 1e-14);

    SUBCASE("two equal-rate jumps add on the shared projector") {
        PartitionedModel two = model;
        two.jumps.push_back(two.jumps[0]);
        const Operator doubled = non_hermitian_h(two);
        CHECK(test::max_abs_diff(doubled, 2.0 * expected) < 1e-14);
    }
    SUBCASE("Hermitian H_e with no jumps is returned unchanged") {
        PartitionedModel bare = model;
        bare.jumps.clear();
        Operator h_e = Operator::Zero(3, 3);
        h_e(2, 2) = 1.7;
        bare.h_excited = h_e;
        CHECK(test::max_abs_diff(non_hermitian_h(bare), h_e) < 1e-15);
    }
}

TEST_CASE("restricted inverse") {
    SUBCASE("single decaying level") {
        const double gamma = 4.0;
        Operator h_nh = Operator::Zero(3, 3);
        h_nh(2, 2) = Cplx(0.0, -0.5 * gamma);
        const Operator inv = restricted_inverse(h_nh, level_projector(3, 2));
        Operator expected = Operator::Zero(3, 3);
        expected(2, 2) = Cplx(0.0, 2.0 / gamma);
        CHECK(test::max_abs_diff(inv, expected) < 1e-14);
    }
    SUBCASE("diagonal block is inverted entrywise") {
        Operator projector = Operator::Zero(4, 4);
        projector(1, 1) = 1.0;
        projector(3, 3) = 1.0;
        Operator h_nh = Operator::Zero(4, 4);
        h_nh(1, 1) = Cplx(2.0, -1.0);
        h_nh(3, 3) = Cplx(-0.5, 3.0);
        const Operator inv = restricted_inverse(h_nh, projector);
        CHECK(std::abs(inv(1, 1) - 1.0 / Cplx(2.0, -1.0)) < 1e-14);
        CHECK(std::abs(inv(3, 3) - 1.0 / Cplx(-0.5, 3.0)) < 1e-14);
        CHECK(std::abs(inv(0, 0)) == 0.0);
        // X H = H X = P_e on the block
        CHECK(test::max_abs_diff(inv * h_nh, projector) < 1e-14);
        CHECK(test::max_abs_diff(h_nh * inv, projector) < 1e-14);
    }
    SUBCASE("singular restriction is rejected with the offending value") {
        Operator projector = Operator::Zero(3, 3);
        projector(1, 1) = 1.0;
        projector(2, 2) = 1.0;
        Operator h_nh = Operator::Zero(3, 3);
        h_nh(1, 1) = 1.0; // (2,2) block entry stays zero -> singular
        CHECK_THROWS_WITH_AS(restricted_inverse(h_nh, projector),
                             doctest::Contains("singular"), std::domain_error);
    }
    SUBCASE("non-binary projector is rejected") {
        Operator projector = Operator::Zero(2, 2);
        projector(0, 0) = 0.5;
        CHECK_THROWS_AS(restricted_inverse(Operator::Zero(2, 2), projector),
                        std::domain_error);
    }
}

TEST_CASE("single-ion elimination reproduces the engineered decay") {
    const double gamma = 4.0, omega_e = 0.8;
    const EffectiveModel eff = eliminate(single_ion_model(gamma, omega_e));
    // i (Omega_e / sqrt(gamma)) |0><1|
    Operator expected = Operator::Zero(3, 3);
    expected(0, 1) = Cplx(0.0, omega_e / std::sqrt(gamma));
    REQUIRE(eff.jumps_eff.size() == 1);
    CHECK(test::max_abs_diff(eff.jumps_eff[0], expected) < 1e-14);
    CHECK(eff.h_eff.cwiseAbs().maxCoeff() < 1e-14); // H_g = 0, X + X^dag = 0
}

TEST_CASE("V+ = 0 gives a trivial effective model") {
    PartitionedModel model = single_ion_model(2.0, 0.0);
    const EffectiveModel eff = eliminate(model);
    CHECK(test::max_abs_diff(eff.h_eff, model.h_ground) < 1e-15);
    for (const auto& jump : eff.jumps_eff)
        CHECK(jump.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("stage-1 model : engineered Gamma on each ion") {
    const ExperimentParams params = section3();
    const FockSpace space(2);
    const PartitionedModel model = build_stage1_model(params, space);
    CHECK_NOTHROW(model.validate());

    const EffectiveModel eff = eliminate(model);
    REQUIRE(eff.jumps_eff.size() == 2);

    const double Gamma = params.omega_e_rabi * params.omega_e_rabi / params.gamma;
    const Operator id_ph = Operator::Identity(2, 2);
    const Operator low01 =
        level_projector(3, 0) + level_projector(3, 1); // other-ion low levels
    const Operator expected_1 = Cplx(0.0, std::sqrt(Gamma)) *
                                embed_two_ions(level_transition(3, 0, 1), low01, id_ph);
    const Operator expected_2 = Cplx(0.0, std::sqrt(Gamma)) *
                                embed_two_ions(low01, level_transition(3, 0, 1), id_ph);
    CHECK(test::max_abs_diff(eff.jumps_eff[0], expected_1) < 1e-12);
    CHECK(test::max_abs_diff(eff.jumps_eff[1], expected_2) < 1e-12);

    // rate check: L^dag L carries Gamma = Omega_e^2 / gamma
    const double rate = (eff.jumps_eff[0].adjoint() * eff.jumps_eff[0])
                            .diagonal()
                            .real()
                            .maxCoeff();
    CHECK(rate == doctest::Approx(Gamma).epsilon(1e-12));

    SUBCASE("effective Hamiltonian equals the ground-block Hamiltonian") {
        CHECK(test::max_abs_diff(eff.h_eff, model.h_ground) < 1e-10 *
                  std::max(1.0, model.h_ground.cwiseAbs().maxCoeff()));
    }
    SUBCASE("no dissipation laser, no effective jumps") {
        ExperimentParams off = params;
        off.omega_e_rabi = 0.0;
        const EffectiveModel none = eliminate(build_stage1_model(off, space));
        for (const auto& jump : none.jumps_eff)
            CHECK(jump.cwiseAbs().maxCoeff() < 1e-15);
    }
}

TEST_CASE("stage-2 model : phonon gain and two-phonon damping operators") {
    const ExperimentParams params = section3();
    const EffectiveRates rates = derive_rates(params);
    const FockSpace space(5);
    const PartitionedModel model = build_stage2_model(params, rates, space);
    CHECK_NOTHROW(model.validate());

    const EffectiveModel eff = eliminate(model);
    REQUIRE(eff.jumps_eff.size() == 2);

    const Operator a = annihilation_op(space);
    const Operator p0 = level_projector(2, 0);
    const Operator expected_1 =
        (-rates.eta1_tilde * params.omega1_rabi / std::sqrt(rates.Gamma)) *
        embed_two_ions(p0, p0, a.adjoint());
    const Operator expected_2 =
        (-rates.eta2_tilde * params.omega2_rabi / std::sqrt(rates.Gamma)) *
        embed_two_ions(p0, p0, a * a);
    CHECK(test::max_abs_diff(eff.jumps_eff[0], expected_1) < 1e-12);
    CHECK(test::max_abs_diff(eff.jumps_eff[1], expected_2) < 1e-12);
    CHECK(test::max_abs_diff(eff.h_eff, model.h_ground) < 1e-12);

    SUBCASE("operator rates reproduce g and kappa") {
        // L1^dag L1 = g P0 P0 a a^dag : its largest diagonal entry is g * d(max)
        const Operator l1 = eff.jumps_eff[0];
        const Operator l2 = eff.jumps_eff[1];
        const double g_entry = (l1.adjoint() * l1).diagonal().real()(0); // a a^dag at n=0
        CHECK(g_entry == doctest::Approx(rates.g).epsilon(1e-12));
        const double kappa_entry =
            (l2.adjoint() * l2).diagonal().real()(2) / 2.0; // a^dag2 a^2 at n=2 is 2
        CHECK(kappa_entry == doctest::Approx(rates.kappa).epsilon(1e-12));
    }
    SUBCASE("no second laser, no damping channel") {
        ExperimentParams off = params;
        off.omega2_rabi = 0.0;
        const EffectiveRates off_rates = derive_rates(off);
        const EffectiveModel none = eliminate(build_stage2_model(off, off_rates, space));
        CHECK(none.jumps_eff[1].cwiseAbs().maxCoeff() < 1e-15);
        CHECK(none.jumps_eff[0].cwiseAbs().maxCoeff() > 0.0);
    }
}

TEST_CASE("elimination is linear in the coupling") {
    const ExperimentParams params = section3();
    const EffectiveRates rates = derive_rates(params);
    const FockSpace space(4);
    PartitionedModel model = build_stage2_model(params, rates, space);
    const EffectiveModel base = eliminate(model);

    const double s = 2.5;
    PartitionedModel scaled = model;
    scaled.coupling_up *= s;
    scaled.coupling_down *= s;
    const EffectiveModel eff = eliminate(scaled);
    for (size_t k = 0; k < base.jumps_eff.size(); ++k)
        CHECK(test::max_abs_diff(eff.jumps_eff[k], s * base.jumps_eff[k]) < 1e-12);
    CHECK(test::max_abs_diff(eff.h_eff - model.h_ground,
                             s * s * (base.h_eff - model.h_ground)) < 1e-12);
}

TEST_CASE("effective Hamiltonian is Hermitian for random partitions") {
    std::mt19937 gen(31);
    for (int trial = 0; trial < 10; ++trial) {
        const int d = 8;
        Operator projector = Operator::Zero(d, d);
        for (int i = 4; i < d; ++i)
            projector(i, i) = 1.0;
        const Operator p_g = Operator::Identity(d, d) - projector;

        PartitionedModel model;
        model.excited_projector = projector;
        Operator hg = test::random_complex_matrix(d, d, gen);
        hg = p_g * Operator(0.5 * (hg + hg.adjoint())) * p_g;
        model.h_ground = hg;
        Operator he = test::random_complex_matrix(d, d, gen);
        he = projector * Operator(0.5 * (he + he.adjoint())) * projector;
        model.h_excited = he;
        model.coupling_up = projector * test::random_complex_matrix(d, d, gen) * p_g;
        model.coupling_down = model.coupling_up.adjoint();
        model.jumps = {p_g * test::random_complex_matrix(d, d, gen) * projector};

        const EffectiveModel eff = eliminate(model);
        CHECK((eff.h_eff - eff.h_eff.adjoint()).cwiseAbs().maxCoeff() <
              1e-12 * std::max(1.0, eff.h_eff.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("partition invariants are enforced") {
    PartitionedModel model = single_ion_model(2.0, 0.5);
    SUBCASE("V- must be dagger(V+)") {
        model.coupling_down = 2.0 * model.coupling_down;
        CHECK_THROWS_AS(model.validate(), std::domain_error);
    }
    SUBCASE("V+ must map ground into excited") {
        model.coupling_up = Operator::Identity(3, 3);
        model.coupling_down = model.coupling_up.adjoint();
        CHECK_THROWS_AS(model.validate(), std::domain_error);
    }
    SUBCASE("jumps must map excited into ground") {
        model.jumps = {Operator::Identity(3, 3)};
        CHECK_THROWS_AS(model.validate(), std::domain_error);
    }
    SUBCASE("H_g must live on the ground block") {
        Operator bad = Operator::Zero(3, 3);
        bad(2, 2) = 1.0;
        model.h_ground = bad;
        CHECK_THROWS_AS(model.validate(), std::domain_error);
    }
}

TEST_CASE("full stage-2 model is a valid Lindblad system") {
    const ExperimentParams params = section3();
    const EffectiveRates rates = derive_rates(params);
    const FockSpace space(4);
    const LindbladModel full = build_stage2_full_model(params, rates, space);
    CHECK(full.dim() == 16);
    CHECK_NOTHROW(full.validate());
    CHECK(full.channels.size() == 2);
    CHECK(full.channels[0].rate == doctest::Approx(rates.Gamma));
}
