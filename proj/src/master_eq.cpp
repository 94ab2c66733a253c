#include "ptc/master_eq.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace ptc {

void LindbladModel::validate() const {
    if (hamiltonian.rows() != hamiltonian.cols())
        throw std::domain_error("LindbladModel: Hamiltonian must be square");
    if ((hamiltonian - hamiltonian.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::domain_error("LindbladModel: Hamiltonian must be Hermitian within 1e-12");
    for (const auto& channel : channels) {
        if (channel.rate < 0.0)
            throw std::domain_error("LindbladModel: channel rates must be nonnegative");
        if (channel.jump.rows() != hamiltonian.rows() || channel.jump.cols() != hamiltonian.cols())
            throw std::domain_error("LindbladModel: jump dimension mismatch");
    }
}

Operator phonon_hamiltonian(double delta, Cplx epsilon, const FockSpace& space) {
    const Operator a = annihilation_op(space);
    return -delta * number_op(space) + epsilon * a.adjoint() + std::conj(epsilon) * a;
}

PhononModel make_phonon_model(double delta, Cplx epsilon, double g, double kappa,
                              const FockSpace& space) {
    if (g < 0.0 || kappa < 0.0)
        throw std::domain_error("make_phonon_model: g and kappa must be nonnegative");
    PhononModel model{space, delta, epsilon, g, kappa, {}};
    const Operator a = annihilation_op(space);
    model.lindblad.hamiltonian = phonon_hamiltonian(delta, epsilon, space);
    model.lindblad.channels.push_back({g, a.adjoint()});
    model.lindblad.channels.push_back({kappa, a * a});
    return model;
}

Eigen::MatrixXcd lindblad_rhs(const LindbladModel& model, const Eigen::MatrixXcd& rho) {
    if (rho.rows() != model.hamiltonian.rows() || rho.cols() != model.hamiltonian.cols())
        throw std::domain_error("lindblad_rhs: state dimension mismatch");
    const Cplx i_unit(0.0, 1.0);
    Eigen::MatrixXcd out = -i_unit * (model.hamiltonian * rho - rho * model.hamiltonian);
    for (const auto& channel : model.channels) {
        if (channel.rate == 0.0)
            continue;
        const Eigen::MatrixXcd l_rho = channel.jump * rho;
        const Eigen::MatrixXcd ldag_l = channel.jump.adjoint() * channel.jump;
        out.noalias() += channel.rate * (l_rho * channel.jump.adjoint());
        out.noalias() -= (0.5 * channel.rate) * (ldag_l * rho + rho * ldag_l);
    }
    return out;
}

Cplx mean_field_residual(const PhononModel& model, const DensityMatrix& rho) {
    const Eigen::MatrixXcd& mat = rho.matrix();
    const FockSpace space(rho.dim());
    const Operator a = annihilation_op(space);
    const Eigen::MatrixXcd rhs = lindblad_rhs(model.lindblad, mat);

    const Cplx lhs = (rhs * a).trace();
    const Cplx mean_a = (mat * a).trace();
    const Cplx mean_adag_a2 = (mat * (a.adjoint() * a * a)).trace();
    const Cplx i_unit(0.0, 1.0);
    const Cplx factored = (0.5 * model.g + i_unit * model.delta) * mean_a -
                          model.kappa * mean_adag_a2 - i_unit * model.epsilon;
    return lhs - factored;
}

const TimeSeries* Trajectory::series(const std::string& name) const {
    for (const auto& ts : observables)
        if (ts.name == name)
            return &ts;
    return nullptr;
}

namespace {

using ConstMatRef = Eigen::Ref<const Eigen::MatrixXcd>;
using RhsFn = std::function<void(const ConstMatRef& rho, Eigen::MatrixXcd& out)>;

// Tridiagonal representation of the drift A = -iH - (1/2) sum_k r_k L_k^dag L_k
// of the phonon model; both H and the rate sums are tridiagonal there.
struct PhononRhs {
    Eigen::VectorXcd drift_sub;  // A(n+1, n)
    Eigen::VectorXcd drift_diag; // A(n, n)
    Eigen::VectorXcd drift_sup;  // A(n, n+1)
    Eigen::VectorXd gain_amp;    // sqrt(n+1) row/col scaling of a^dag rho a
    Eigen::VectorXd loss_amp;    // sqrt((n+1)(n+2)) scaling of a^2 rho a^dag2
    double g = 0.0;
    double kappa = 0.0;
    int d = 0;
    mutable Eigen::MatrixXcd scratch; // holds A rho

    explicit PhononRhs(const PhononModel& model) {
        d = model.space.dim();
        const Cplx i_unit(0.0, 1.0);
        drift_sub.resize(d - 1);
        drift_diag.resize(d);
        drift_sup.resize(d - 1);
        for (int n = 0; n < d; ++n) {
            // -iH diagonal plus -(1/2)(g a a^dag + kappa a^dag2 a^2) with the
            // truncated operators: (a a^dag)(n, n) = n+1 except 0 at the edge.
            const double gain_diag = n < d - 1 ? model.g * (n + 1.0) : 0.0;
            drift_diag(n) = i_unit * (model.delta * n) -
                            Cplx(0.5 * gain_diag +
                                     0.5 * model.kappa * static_cast<double>(n) * (n - 1),
                                 0.0);
        }
        for (int n = 0; n < d - 1; ++n) {
            const double amp = std::sqrt(n + 1.0);
            drift_sub(n) = -i_unit * model.epsilon * amp;            // from eps a^dag
            drift_sup(n) = -i_unit * std::conj(model.epsilon) * amp; // from eps* a
        }
        scratch.resize(d, d);
        gain_amp.resize(d - 1);
        for (int n = 0; n < d - 1; ++n)
            gain_amp(n) = std::sqrt(n + 1.0);
        loss_amp.resize(std::max(d - 2, 0));
        for (int n = 0; n + 2 < d; ++n)
            loss_amp(n) = std::sqrt((n + 1.0) * (n + 2.0));
        g = model.g;
        kappa = model.kappa;
    }

    // Computes M = A rho + (1/2)(g a^dag rho a + kappa a^2 rho a^dag2) and
    // returns out = M + M^dag.  For Hermitian rho this is the Lindblad
    // right-hand side, and the output is conjugate-symmetric bit for bit, so
    // time stepping (real stage weights) never leaves the Hermitian
    // subspace.  On the complementary (rounding-dust) subspace the map acts
    // as bounded commutators, so nothing is amplified.
    void operator()(const ConstMatRef& rho, Eigen::MatrixXcd& out) const {
        scratch.noalias() = drift_diag.asDiagonal() * rho;
        scratch.topRows(d - 1).noalias() += drift_sup.asDiagonal() * rho.bottomRows(d - 1);
        scratch.bottomRows(d - 1).noalias() += drift_sub.asDiagonal() * rho.topRows(d - 1);

        if (g != 0.0) {
            // (a^dag rho a)(i, j) = sqrt(i) sqrt(j) rho(i-1, j-1)
            scratch.bottomRightCorner(d - 1, d - 1).noalias() +=
                (0.5 * g) * (gain_amp.asDiagonal() *
                             rho.topLeftCorner(d - 1, d - 1) * gain_amp.asDiagonal());
        }
        if (kappa != 0.0 && d > 2) {
            // (a^2 rho a^dag2)(i, j) = loss_amp(i) loss_amp(j) rho(i+2, j+2)
            scratch.topLeftCorner(d - 2, d - 2).noalias() +=
                (0.5 * kappa) * (loss_amp.asDiagonal() *
                                 rho.bottomRightCorner(d - 2, d - 2) * loss_amp.asDiagonal());
        }
        out = scratch;
        out.noalias() += scratch.adjoint();
    }
};

struct Monitor {
    const InvariantBudget& budget;
    InvariantSummary summary;
    int dim;
    int eig_stride;
    bool check_eigs;
    int checkpoint_index = 0;

    Monitor(const InvariantBudget& b, int d, bool check, int stride)
        : budget(b), dim(d), eig_stride(std::max(stride, 1)), check_eigs(check) {}

    void per_step(double t, const Eigen::MatrixXcd& rho) {
        const double trace_drift = std::abs(rho.trace() - Cplx(1.0, 0.0));
        summary.max_trace_drift = std::max(summary.max_trace_drift, trace_drift);
        if (trace_drift > budget.max_trace_drift)
            fail("trace drift", trace_drift, t);
        const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
        summary.max_hermiticity = std::max(summary.max_hermiticity, herm);
        if (herm > budget.max_hermiticity)
            fail("hermiticity violation", herm, t);
    }

    void per_checkpoint(double t, const Eigen::MatrixXcd& rho) {
        const double purity = rho.cwiseAbs2().sum();
        summary.purity_min = std::min(summary.purity_min, purity);
        summary.purity_max = std::max(summary.purity_max, purity);
        if (purity > 1.0 + budget.purity_upper_slack)
            fail("purity above 1", purity - 1.0, t);
        if (purity < 1.0 / dim - budget.purity_lower_slack)
            fail("purity below 1/d", 1.0 / dim - purity, t);

        const double edge = rho(dim - 1, dim - 1).real();
        summary.max_edge_population = std::max(summary.max_edge_population, edge);
        summary.final_edge_population = edge;

        if (check_eigs && checkpoint_index % eig_stride == 0) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es;
            es.compute(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
            const double min_eig = es.eigenvalues().minCoeff();
            summary.min_eigenvalue = std::min(summary.min_eigenvalue, min_eig);
            ++summary.eigenvalue_checkpoints;
            if (min_eig < budget.min_eigenvalue)
                fail("negative eigenvalue", min_eig, t);
        }
        ++checkpoint_index;
    }

    [[noreturn]] void fail(const char* what, double value, double t) const {
        std::ostringstream oss;
        oss << "integrate: " << what << " (" << value << ") breached its budget at t = "
            << t << " ms";
        throw IntegrationError(oss.str(), t);
    }
};

Trajectory integrate_impl(int dim, const RhsFn& apply_rhs, const DensityMatrix& rho0,
                          std::span<const double> t_grid, const IntegrateOptions& options,
                          InvariantSummary* summary_out) {
    if (t_grid.empty())
        throw std::domain_error("integrate: empty time grid");
    if (rho0.dim() != dim)
        throw std::domain_error("integrate: initial state dimension mismatch");
    if (options.populations_max >= dim)
        throw std::domain_error("integrate: populations_max exceeds cutoff");

    Trajectory traj;
    traj.times.assign(t_grid.begin(), t_grid.end());

    const int n_pops = options.populations_max + 1; // 0 when disabled
    traj.observables.emplace_back(TimeSeries{"Na", {}});
    traj.observables.emplace_back(TimeSeries{"purity", {}});
    for (int n = 0; n < n_pops; ++n)
        traj.observables.emplace_back(TimeSeries{"p" + std::to_string(n), {}});
    for (auto& ts : traj.observables)
        ts.values.reserve(t_grid.size());

    // Snapshot times must land on grid entries.
    std::vector<char> want_snapshot(t_grid.size(), 0);
    for (double t_snap : options.snapshot_times) {
        bool found = false;
        for (size_t i = 0; i < t_grid.size(); ++i) {
            if (std::abs(t_grid[i] - t_snap) <= 1e-12 * std::max(1.0, std::abs(t_snap))) {
                want_snapshot[i] = 1;
                found = true;
                break;
            }
        }
        if (!found)
            throw std::domain_error("integrate: snapshot time not on the grid");
    }

    Monitor monitor(options.budget, dim, options.check_eigenvalues, options.eigenvalue_stride);

    OdeState y = Eigen::Map<const Eigen::VectorXcd>(rho0.matrix().data(), dim * dim);
    Eigen::MatrixXcd rhs_buffer(dim, dim);

    const OdeRhs rhs = [&](double, const OdeState& state, OdeState& dydt) {
        const Eigen::Map<const Eigen::MatrixXcd> rho(state.data(), dim, dim);
        apply_rhs(rho, rhs_buffer);
        dydt = Eigen::Map<const Eigen::VectorXcd>(rhs_buffer.data(), dim * dim);
    };

    size_t grid_index = 0;
    const OdeObserver on_stop = [&](double t, const OdeState& state) {
        const Eigen::Map<const Eigen::MatrixXcd> rho(state.data(), dim, dim);
        monitor.per_checkpoint(t, rho);

        double na = 0.0;
        for (int n = 0; n < dim; ++n)
            na += n * rho(n, n).real();
        traj.observables[0].values.push_back(na);
        traj.observables[1].values.push_back(rho.cwiseAbs2().sum());
        for (int n = 0; n < n_pops; ++n)
            traj.observables[2 + n].values.push_back(rho(n, n).real());

        if (grid_index < want_snapshot.size() && want_snapshot[grid_index]) {
            traj.snapshot_times.push_back(t);
            traj.states.emplace_back(Eigen::MatrixXcd(rho));
        }
        ++grid_index;
    };
    const OdeObserver on_step = [&](double t, const OdeState& state) {
        const Eigen::Map<const Eigen::MatrixXcd> rho(state.data(), dim, dim);
        monitor.per_step(t, rho);
    };

    monitor.summary.ode =
        integrate_dopri54(rhs, y, t_grid.front(), t_grid, options.ode, on_stop, on_step);

    if (summary_out)
        *summary_out = monitor.summary;
    return traj;
}

} // namespace

Eigen::MatrixXcd phonon_rhs_apply(const PhononModel& model, const Eigen::MatrixXcd& rho) {
    const PhononRhs rhs(model);
    Eigen::MatrixXcd out(rho.rows(), rho.cols());
    rhs(rho, out);
    return out;
}

Trajectory integrate(const LindbladModel& model, const DensityMatrix& rho0,
                     std::span<const double> t_grid, const IntegrateOptions& options,
                     InvariantSummary* summary) {
    model.validate();
    const int dim = model.dim();
    const Cplx i_unit(0.0, 1.0);

    // Precompute the drift A = -iH - (1/2) sum_k r_k L_k^dag L_k so the
    // per-call work is three products per channel plus two for the drift.
    Eigen::MatrixXcd drift = -i_unit * model.hamiltonian;
    std::vector<std::pair<double, Operator>> jumps;
    for (const auto& channel : model.channels) {
        if (channel.rate == 0.0)
            continue;
        drift.noalias() -= (0.5 * channel.rate) * (channel.jump.adjoint() * channel.jump);
        jumps.emplace_back(channel.rate, channel.jump);
    }

    std::vector<std::pair<double, Operator>> jump_dags;
    for (const auto& [rate, jump] : jumps)
        jump_dags.emplace_back(rate, jump.adjoint());

    // The drift is applied as A rho + (A rho)^dag and the result is
    // symmetrized, so Hermitian states produce bit-Hermitian derivatives
    // (same structure-preserving evaluation as the phonon fast path).
    const RhsFn apply_rhs = [drift, jumps, jump_dags](const ConstMatRef& rho,
                                                      Eigen::MatrixXcd& out) {
        Eigen::MatrixXcd acc = drift * rho;
        for (size_t k = 0; k < jumps.size(); ++k) {
            const Eigen::MatrixXcd l_rho = jumps[k].second * rho;
            acc.noalias() += (0.5 * jumps[k].first) * (l_rho * jump_dags[k].second);
        }
        out = acc;
        out.noalias() += acc.adjoint();
    };
    return integrate_impl(dim, apply_rhs, rho0, t_grid, options, summary);
}

Trajectory integrate(const PhononModel& model, const DensityMatrix& rho0,
                     std::span<const double> t_grid, const IntegrateOptions& options,
                     InvariantSummary* summary) {
    model.lindblad.validate();
    const PhononRhs fast_rhs(model);
    const RhsFn apply_rhs = [fast_rhs](const ConstMatRef& rho, Eigen::MatrixXcd& out) {
        fast_rhs(rho, out);
    };
    return integrate_impl(model.space.dim(), apply_rhs, rho0, t_grid, options, summary);
}

} // namespace ptc
