// master_eq.hpp: Lindblad right-hand sides and adaptive time integration.
//
// Two consumers: the reduced phonon model (gain g on a^dag, two-phonon
// damping kappa on a^2, drive Hamiltonian) integrated at cutoffs of order
// 100, and small generic models used as elimination oracles.  The phonon
// path exploits the banded structure of its operators; both paths share the
// Dormand-Prince stepper and the invariant monitor.

#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ptc/fock.hpp"
#include "ptc/ode.hpp"

namespace ptc {

struct LindbladChannel {
    double rate = 0.0; // >= 0
    Operator jump;
};

struct LindbladModel {
    Operator hamiltonian;
    std::vector<LindbladChannel> channels;

    int dim() const { return static_cast<int>(hamiltonian.rows()); }
    // Hermitian H within 1e-12, nonnegative rates, consistent dimensions.
    void validate() const;
};

// H_a = -Delta a^dag a + epsilon a^dag + conj(epsilon) a on the truncated space.
Operator phonon_hamiltonian(double delta, Cplx epsilon, const FockSpace& space);

// Reduced phonon model with its defining scalars kept alongside the generic
// Lindblad form.
struct PhononModel {
    FockSpace space;
    double delta = 0.0;
    Cplx epsilon{0.0, 0.0};
    double g = 0.0;
    double kappa = 0.0;
    LindbladModel lindblad;
};

PhononModel make_phonon_model(double delta, Cplx epsilon, double g, double kappa,
                              const FockSpace& space);

// rho' = -i[H, rho] + sum_k rate_k (L rho L^dag - (L^dag L rho + rho L^dag L)/2).
// The output has exactly zero trace analytically and is Hermitian whenever
// rho is.  Throws std::domain_error on dimension mismatch.
Eigen::MatrixXcd lindblad_rhs(const LindbladModel& model, const Eigen::MatrixXcd& rho);

// Banded evaluation of the phonon-model right-hand side; the same algebra
// integrate() uses internally.  Agrees with lindblad_rhs on the model's
// Lindblad form to rounding.
Eigen::MatrixXcd phonon_rhs_apply(const PhononModel& model, const Eigen::MatrixXcd& rho);

// Exact pre-factorization amplitude identity of the phonon model:
//
//   Tr{rho' a} = (g/2 + i*Delta) <a> - kappa <a^dag a^2> - i*epsilon
//
// Returns the difference of the two sides; zero up to truncation edge
// effects for states supported away from the cutoff.
Cplx mean_field_residual(const PhononModel& model, const DensityMatrix& rho);

struct TimeSeries {
    std::string name;
    std::vector<double> values;
};

struct Trajectory {
    std::vector<double> times;          // grid times, ms
    std::vector<double> snapshot_times; // subset of times where states are kept
    std::vector<DensityMatrix> states;  // thinned snapshots
    std::vector<TimeSeries> observables;

    const TimeSeries* series(const std::string& name) const;
};

struct InvariantBudget {
    double max_trace_drift = 1e-8;  // |tr rho - 1|
    double max_hermiticity = 1e-10; // max |rho - rho^dag| entry
    double min_eigenvalue = -1e-6;
    double purity_upper_slack = 1e-10; // purity <= 1 + slack
    double purity_lower_slack = 1e-8;  // purity >= 1/d - slack
};

struct InvariantSummary {
    double max_trace_drift = 0.0;
    double max_hermiticity = 0.0;
    double min_eigenvalue = 1.0;
    double purity_min = 1.0;
    double purity_max = 0.0;
    double max_edge_population = 0.0;   // largest p_{d-1} seen at checkpoints
    double final_edge_population = 0.0; // p_{d-1} at the last grid time
    int eigenvalue_checkpoints = 0;
    OdeStats ode;
};

struct IntegrateOptions {
    OdeOptions ode{};
    InvariantBudget budget{};
    bool check_eigenvalues = true; // spectral checks at grid checkpoints
    int eigenvalue_stride = 1;     // every k-th grid point
    std::vector<double> snapshot_times; // must coincide with grid times
    int populations_max = -1;           // record p_0..p_K series when K >= 0
};

// Raised when an invariant leaves its budget; integration never repairs the
// state silently.
class IntegrationError : public std::runtime_error {
  public:
    IntegrationError(const std::string& what, double t_ms)
        : std::runtime_error(what), time_ms(t_ms) {}
    double time_ms;
};

// Integrates from rho0 (the state at t_grid.front()) through every grid
// time.  Na and purity are recorded at each grid time, populations when
// requested; full states only at the snapshot times.  The summary is written
// through the out-parameter when provided.  Deterministic for fixed options.
Trajectory integrate(const LindbladModel& model, const DensityMatrix& rho0,
                     std::span<const double> t_grid, const IntegrateOptions& options = {},
                     InvariantSummary* summary = nullptr);

Trajectory integrate(const PhononModel& model, const DensityMatrix& rho0,
                     std::span<const double> t_grid, const IntegrateOptions& options = {},
                     InvariantSummary* summary = nullptr);

} // namespace ptc
