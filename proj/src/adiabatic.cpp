#include "ptc/adiabatic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/SVD>

namespace ptc {

namespace {

constexpr double kBlockTol = 1e-12;

void require_same_dim(const Operator& op, int dim, const char* what) {
    if (op.rows() != dim || op.cols() != dim)
        throw std::domain_error(std::string("PartitionedModel: ") + what +
                                " has inconsistent dimension");
}

std::vector<int> projector_indices(const Operator& projector) {
    const int dim = static_cast<int>(projector.rows());
    if (projector.cols() != dim)
        throw std::domain_error("restricted_inverse: projector must be square");
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            const Cplx v = projector(i, j);
            const bool diag_unit = i == j && (std::abs(v) < kBlockTol ||
                                              std::abs(v - Cplx(1.0, 0.0)) < kBlockTol);
            const bool off_zero = i != j && std::abs(v) < kBlockTol;
            if (!diag_unit && !off_zero)
                throw std::domain_error(
                    "restricted_inverse: projector must be diagonal with 0/1 entries");
        }
    }
    std::vector<int> indices;
    for (int i = 0; i < dim; ++i)
        if (std::abs(projector(i, i) - Cplx(1.0, 0.0)) < kBlockTol)
            indices.push_back(i);
    return indices;
}

} // namespace

void PartitionedModel::validate() const {
    const int d = dim();
    if (d < 1)
        throw std::domain_error("PartitionedModel: empty model");
    require_same_dim(h_ground, d, "H_g");
    require_same_dim(h_excited, d, "H_e");
    require_same_dim(coupling_up, d, "V+");
    require_same_dim(coupling_down, d, "V-");
    for (const auto& jump : jumps)
        require_same_dim(jump, d, "jump");

    projector_indices(excited_projector); // shape check: diagonal 0/1
    const Operator p_e = excited_projector;
    const Operator p_g = Operator::Identity(d, d) - p_e;

    if ((coupling_down - coupling_up.adjoint()).cwiseAbs().maxCoeff() > kBlockTol)
        throw std::domain_error("PartitionedModel: V- must equal dagger(V+)");
    if ((coupling_up - p_e * coupling_up * p_g).cwiseAbs().maxCoeff() > kBlockTol)
        throw std::domain_error("PartitionedModel: V+ must map ground into excited");
    for (const auto& jump : jumps)
        if ((jump - p_g * jump * p_e).cwiseAbs().maxCoeff() > kBlockTol)
            throw std::domain_error("PartitionedModel: jumps must map excited into ground");
    if ((h_ground - p_g * h_ground * p_g).cwiseAbs().maxCoeff() > kBlockTol)
        throw std::domain_error("PartitionedModel: H_g must be supported on the ground block");
    if ((h_excited - p_e * h_excited * p_e).cwiseAbs().maxCoeff() > kBlockTol)
        throw std::domain_error("PartitionedModel: H_e must be supported on the excited block");
}

Operator non_hermitian_h(const PartitionedModel& model) {
    Operator h_nh = model.h_excited;
    const Cplx half_i(0.0, 0.5);
    for (const auto& jump : model.jumps)
        h_nh.noalias() -= half_i * (jump.adjoint() * jump);
    return h_nh;
}

Operator restricted_inverse(const Operator& h_nh, const Operator& excited_projector) {
    const std::vector<int> idx = projector_indices(excited_projector);
    const int dim = static_cast<int>(h_nh.rows());
    if (h_nh.cols() != dim || excited_projector.rows() != dim)
        throw std::domain_error("restricted_inverse: dimension mismatch");
    if (idx.empty())
        throw std::domain_error("restricted_inverse: empty excited subspace");

    const Operator support = excited_projector * h_nh * excited_projector;
    if ((h_nh - support).cwiseAbs().maxCoeff() > kBlockTol * std::max(1.0, h_nh.cwiseAbs().maxCoeff()))
        throw std::domain_error("restricted_inverse: operator not supported on the excited block");

    const int k = static_cast<int>(idx.size());
    Operator block(k, k);
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c)
            block(r, c) = h_nh(idx[r], idx[c]);

    Eigen::JacobiSVD<Operator> svd(block, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double sigma_max = svd.singularValues()(0);
    const double sigma_min = svd.singularValues()(k - 1);
    if (sigma_min <= 1e-12 * sigma_max) {
        std::ostringstream oss;
        oss << "restricted_inverse: singular restriction, smallest singular value "
            << sigma_min << " vs largest " << sigma_max;
        throw std::domain_error(oss.str());
    }
    const Operator block_inv =
        svd.matrixV() * svd.singularValues().cwiseInverse().asDiagonal() *
        svd.matrixU().adjoint();

    Operator inverse = Operator::Zero(dim, dim);
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c)
            inverse(idx[r], idx[c]) = block_inv(r, c);
    return inverse;
}

EffectiveModel eliminate(const PartitionedModel& model) {
    model.validate();
    const Operator h_nh = non_hermitian_h(model);
    const Operator inv = restricted_inverse(h_nh, model.excited_projector);

    EffectiveModel effective;
    effective.h_eff =
        model.h_ground - 0.5 * (model.coupling_down * (inv + inv.adjoint()) * model.coupling_up);
    const double herm = (effective.h_eff - effective.h_eff.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kBlockTol * std::max(1.0, effective.h_eff.cwiseAbs().maxCoeff()))
        throw std::domain_error("eliminate: H_eff failed the Hermiticity check");
    for (const auto& jump : model.jumps)
        effective.jumps_eff.push_back(jump * inv * model.coupling_up);
    return effective;
}

Operator level_transition(int levels, int to, int from) {
    if (levels < 2 || to < 0 || from < 0 || to >= levels || from >= levels)
        throw std::domain_error("level_transition: indices outside the level range");
    Operator op = Operator::Zero(levels, levels);
    op(to, from) = 1.0;
    return op;
}

Operator level_projector(int levels, int level) {
    return level_transition(levels, level, level);
}

Operator embed_two_ions(const Operator& ion1, const Operator& ion2, const Operator& phonon) {
    return kron(ion1, kron(ion2, phonon));
}

namespace {

// Projector onto "exactly one ion in the given level", tensored with the
// phonon identity.
Operator one_excited_projector(int levels, int excited_level, int fock_dim) {
    const Operator p_exc = level_projector(levels, excited_level);
    const Operator p_low = Operator::Identity(levels, levels) - p_exc;
    const Operator id_ph = Operator::Identity(fock_dim, fock_dim);
    return embed_two_ions(p_exc, p_low, id_ph) + embed_two_ions(p_low, p_exc, id_ph);
}

} // namespace

PartitionedModel build_stage1_model(const ExperimentParams& params, const FockSpace& space) {
    params.validate();
    const int d = space.dim();
    const Operator id_ion = Operator::Identity(3, 3);
    const Operator id_ph = Operator::Identity(d, d);
    const Operator h_a = phonon_hamiltonian(params.delta(), params.epsilon, space);

    PartitionedModel model;
    model.excited_projector = one_excited_projector(3, 2, d);
    const Operator p_e = model.excited_projector;
    const Operator p_g = Operator::Identity(9 * d, 9 * d) - p_e;

    model.h_ground = p_g * embed_two_ions(id_ion, id_ion, h_a) * p_g;
    model.h_excited = Operator::Zero(9 * d, 9 * d);

    const Operator raise = level_transition(3, 2, 1); // |2><1|
    Operator v_plus = (0.5 * params.omega_e_rabi) *
                      (embed_two_ions(raise, id_ion, id_ph) + embed_two_ions(id_ion, raise, id_ph));
    model.coupling_up = p_e * v_plus * p_g;
    model.coupling_down = model.coupling_up.adjoint();

    const double amp = std::sqrt(params.gamma);
    const Operator decay = level_transition(3, 0, 2); // |0><2|
    model.jumps = {
        p_g * (amp * embed_two_ions(decay, id_ion, id_ph)) * p_e,
        p_g * (amp * embed_two_ions(id_ion, decay, id_ph)) * p_e,
    };
    return model;
}

PartitionedModel build_stage2_model(const ExperimentParams& params, const EffectiveRates& rates,
                                    const FockSpace& space) {
    params.validate();
    const int d = space.dim();
    const Operator id_ion = Operator::Identity(2, 2);
    const Operator id_ph = Operator::Identity(d, d);
    const Operator a = annihilation_op(space);
    const Operator h_a = phonon_hamiltonian(params.delta(), params.epsilon, space);

    PartitionedModel model;
    model.excited_projector = one_excited_projector(2, 1, d);
    const Operator p_e = model.excited_projector;
    const Operator p_g = Operator::Identity(4 * d, 4 * d) - p_e;

    model.h_ground = p_g * embed_two_ions(id_ion, id_ion, h_a) * p_g;
    model.h_excited = Operator::Zero(4 * d, 4 * d);

    const Operator raise = level_transition(2, 1, 0); // sigma+
    Operator v_plus =
        (0.5 * rates.eta1_tilde * params.omega1_rabi) *
            embed_two_ions(raise, id_ion, a.adjoint()) +
        (0.5 * rates.eta2_tilde * params.omega2_rabi) *
            embed_two_ions(id_ion, raise, a * a);
    model.coupling_up = p_e * v_plus * p_g;
    model.coupling_down = model.coupling_up.adjoint();

    const Cplx jump_amp(0.0, std::sqrt(rates.Gamma)); // i sqrt(Gamma)
    const Operator lower = level_transition(2, 0, 1); // sigma-
    model.jumps = {
        p_g * (jump_amp * embed_two_ions(lower, id_ion, id_ph)) * p_e,
        p_g * (jump_amp * embed_two_ions(id_ion, lower, id_ph)) * p_e,
    };
    return model;
}

LindbladModel build_stage2_full_model(const ExperimentParams& params,
                                      const EffectiveRates& rates, const FockSpace& space) {
    params.validate();
    const int d = space.dim();
    const Operator id_ion = Operator::Identity(2, 2);
    const Operator id_ph = Operator::Identity(d, d);
    const Operator a = annihilation_op(space);
    const Operator h_a = phonon_hamiltonian(params.delta(), params.epsilon, space);
    const Operator raise = level_transition(2, 1, 0);
    const Operator lower = level_transition(2, 0, 1);

    LindbladModel model;
    model.hamiltonian =
        embed_two_ions(id_ion, id_ion, h_a) +
        (0.5 * rates.eta1_tilde * params.omega1_rabi) *
            (embed_two_ions(lower, id_ion, a) + embed_two_ions(raise, id_ion, a.adjoint())) +
        (0.5 * rates.eta2_tilde * params.omega2_rabi) *
            (embed_two_ions(id_ion, raise, a * a) +
             embed_two_ions(id_ion, lower, a.adjoint() * a.adjoint()));
    model.channels = {
        {rates.Gamma, embed_two_ions(lower, id_ion, id_ph)},
        {rates.Gamma, embed_two_ions(id_ion, lower, id_ph)},
    };
    model.validate();
    return model;
}

} // namespace ptc
