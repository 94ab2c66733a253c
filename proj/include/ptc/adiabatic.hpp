// adiabatic.hpp: effective-operator elimination of fast-decaying levels.
//
// Generic engine: given a ground/excited partition with couplings V+/V- and
// jump operators L_k out of the excited subspace, produce the effective
// Hamiltonian and effective jump operators
//
//   H_eff = -1/2 V- [X + X^dag] V+ + H_g,     L_k,eff = L_k X V+,
//
// where X inverts H_NH = H_e - (i/2) sum_k L_k^dag L_k on the excited block.
// The two concrete stages of the two-ion scheme are provided as builders.
//
// Tensor ordering everywhere: ion1 (x) ion2 (x) phonon.

#pragma once

#include <vector>

#include "ptc/fock.hpp"
#include "ptc/master_eq.hpp"
#include "ptc/params.hpp"

namespace ptc {

struct PartitionedModel {
    Operator h_ground;         // H_g, supported on the ground block
    Operator h_excited;        // H_e, supported on the excited block
    Operator coupling_up;      // V+, maps ground into excited
    Operator coupling_down;    // V- = dagger(V+)
    std::vector<Operator> jumps; // L_k, map excited into ground
    Operator excited_projector;  // P_e, diagonal 0/1 projector

    int dim() const { return static_cast<int>(excited_projector.rows()); }
    // Enforces the block structure above within 1e-12; throws std::domain_error.
    void validate() const;
};

struct EffectiveModel {
    Operator h_eff;                   // Hermitian, ground-supported
    std::vector<Operator> jumps_eff;  // ground-supported
};

// H_NH = H_e - (i/2) sum_k L_k^dag L_k, supported on the excited block.
Operator non_hermitian_h(const PartitionedModel& model);

// Operator X with X H_NH = H_NH X = P_e and X zero outside the excited
// block.  Requires a diagonal 0/1 projector and an invertible restriction
// (smallest singular value > 1e-12 of the largest); violations throw
// std::domain_error naming the offending value.
Operator restricted_inverse(const Operator& h_nh, const Operator& excited_projector);

// Applies the two formulas above; propagates restricted_inverse errors and
// asserts that H_eff came out Hermitian.
EffectiveModel eliminate(const PartitionedModel& model);

// Single-ion level operators for building and checking models by hand:
// |to><from| and |level><level| on an ion with the given number of levels.
Operator level_transition(int levels, int to, int from);
Operator level_projector(int levels, int level);
// kron(ion1, ion2, phonon) in the fixed ordering.
Operator embed_two_ions(const Operator& ion1, const Operator& ion2, const Operator& phonon);

// Stage 1: two three-level ions (ground {|0>, |1>}, excited |2>) coupled by
// the dissipation laser at resonance, jumps sqrt(gamma) |0><2|.  Eliminating
// |2> engineers the i sqrt(Gamma) |0><1| decay with Gamma = Omega_e^2/gamma.
PartitionedModel build_stage1_model(const ExperimentParams& params, const FockSpace& space);

// Stage 2: two two-level ions (ground |0>, excited |1>) with the reduced
// sideband couplings (eta1~ Omega_1/2) a^dag sigma+_1 and
// (eta2~ Omega_2/2) a^2 sigma+_2, jumps i sqrt(Gamma) sigma-_n.  Eliminating
// |1> yields the phonon gain and two-phonon damping operators.
PartitionedModel build_stage2_model(const ExperimentParams& params, const EffectiveRates& rates,
                                    const FockSpace& space);

// The same stage-2 physics as an unreduced Lindblad model (full couplings,
// no block projections), used as the elimination oracle.
LindbladModel build_stage2_full_model(const ExperimentParams& params,
                                      const EffectiveRates& rates, const FockSpace& space);

} // namespace ptc
