// fock.hpp: truncated Fock space, bosonic operators and state constructors.
//
// Everything downstream (master equation, adiabatic elimination, observables)
// is built from the operators and states defined here.  Operators are dense
// Eigen matrices with entrywise contracts; a matrix of dimension d acts on
// the states |0> ... |d-1>.

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace ptc {

using Cplx = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

struct FockSpace {
    int cutoff; // dimension d >= 2, states |0> ... |d-1>

    explicit FockSpace(int d);
    int dim() const { return cutoff; }
};

// Density-matrix tolerances.  tau_psd scales with dimension to absorb
// double-precision integration drift.
inline constexpr double kHermTol = 1e-10;
inline constexpr double kTraceTol = 1e-8;
inline constexpr double kPsdTolPerDim = 1e-8;

// Hermitian, unit-trace, positive-semidefinite matrix on a truncated space.
// The invariants are checked at construction and a violation throws
// std::domain_error; there is no silent repair anywhere in the library.
class DensityMatrix {
  public:
    explicit DensityMatrix(Eigen::MatrixXcd rho);

    int dim() const { return static_cast<int>(mat_.rows()); }
    const Eigen::MatrixXcd& matrix() const { return mat_; }

    // Largest deviations found at construction, useful for monitor reports.
    double hermiticity_error() const { return herm_err_; }
    double trace_error() const { return trace_err_; }
    double min_eigenvalue() const { return min_eig_; }

  private:
    Eigen::MatrixXcd mat_;
    double herm_err_ = 0.0;
    double trace_err_ = 0.0;
    double min_eig_ = 0.0;
};

// Ladder and number operators.  a[n-1, n] = sqrt(n); truncation makes
// [a, a^dag] = diag(1, ..., 1, -(d-1)).
Operator annihilation_op(const FockSpace& space);
Operator creation_op(const FockSpace& space);
Operator number_op(const FockSpace& space);
Operator identity_op(const FockSpace& space);

// |n><n| projector.  Throws std::domain_error when n is out of range.
DensityMatrix fock_state(const FockSpace& space, int n);

// Coherent-state amplitudes c_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!),
// renormalized to unit norm on the truncated space.  Warns through the
// warning channel when |alpha|^2 > d/2 (truncation bite).
StateVector coherent_state_vector(const FockSpace& space, Cplx alpha);

// Geometric thermal state p_n = n_bar0^n / (n_bar0+1)^(n+1), renormalized on
// the truncated space.  Warns when the cut tail mass exceeds 1e-6.  Throws
// std::domain_error for negative n_bar0.
DensityMatrix thermal_state(const FockSpace& space, double n_bar0);

// Small matrix utilities shared by the model builders.
Operator dagger(const Operator& op);
Operator commutator(const Operator& lhs, const Operator& rhs);
Operator kron(const Operator& lhs, const Operator& rhs);

} // namespace ptc
