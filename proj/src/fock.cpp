#include "ptc/fock.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "ptc/warnings.hpp"

namespace ptc {

FockSpace::FockSpace(int d) : cutoff(d) {
    if (d < 2)
        throw std::domain_error("FockSpace: cutoff must be at least 2, got " + std::to_string(d));
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd rho) : mat_(std::move(rho)) {
    if (mat_.rows() != mat_.cols() || mat_.rows() < 1)
        throw std::domain_error("DensityMatrix: matrix must be square");
    if (!mat_.allFinite())
        throw std::domain_error("DensityMatrix: non-finite entries");

    const int d = dim();
    herm_err_ = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
    trace_err_ = std::abs(mat_.trace() - Cplx(1.0, 0.0));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es;
    es.compute(0.5 * (mat_ + mat_.adjoint()), Eigen::EigenvaluesOnly);
    min_eig_ = es.eigenvalues().minCoeff();

    std::ostringstream oss;
    if (herm_err_ > kHermTol)
        oss << "hermiticity violation " << herm_err_;
    else if (trace_err_ > kTraceTol)
        oss << "trace deviates from 1 by " << trace_err_;
    else if (min_eig_ < -kPsdTolPerDim * d)
        oss << "negative eigenvalue " << min_eig_;
    if (!oss.str().empty())
        throw std::domain_error("DensityMatrix: " + oss.str());
}

Operator annihilation_op(const FockSpace& space) {
    const int d = space.dim();
    Operator a = Operator::Zero(d, d);
    for (int n = 1; n < d; ++n)
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

Operator creation_op(const FockSpace& space) {
    return annihilation_op(space).adjoint();
}

Operator number_op(const FockSpace& space) {
    const int d = space.dim();
    Operator n_op = Operator::Zero(d, d);
    for (int n = 0; n < d; ++n)
        n_op(n, n) = static_cast<double>(n);
    return n_op;
}

Operator identity_op(const FockSpace& space) {
    return Operator::Identity(space.dim(), space.dim());
}

DensityMatrix fock_state(const FockSpace& space, int n) {
    if (n < 0 || n >= space.dim())
        throw std::domain_error("fock_state: n = " + std::to_string(n) +
                                " outside [0, " + std::to_string(space.dim() - 1) + "]");
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(space.dim(), space.dim());
    rho(n, n) = 1.0;
    return DensityMatrix(std::move(rho));
}

StateVector coherent_state_vector(const FockSpace& space, Cplx alpha) {
    const int d = space.dim();
    const double abs2 = std::norm(alpha);
    if (abs2 > 0.5 * d) {
        std::ostringstream oss;
        oss << "coherent_state_vector: |alpha|^2 = " << abs2 << " exceeds cutoff/2 = "
            << 0.5 * d << "; truncated tail is significant";
        warn(oss.str());
    }
    StateVector c(d);
    c(0) = std::exp(-0.5 * abs2);
    for (int n = 1; n < d; ++n)
        c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
    const double norm = c.norm();
    if (norm == 0.0)
        throw std::domain_error("coherent_state_vector: amplitude too large for the cutoff");
    c /= norm;
    return c;
}

DensityMatrix thermal_state(const FockSpace& space, double n_bar0) {
    if (n_bar0 < 0.0)
        throw std::domain_error("thermal_state: n_bar0 must be nonnegative");
    const int d = space.dim();
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
    const double ratio = n_bar0 / (n_bar0 + 1.0);
    double p = 1.0 / (n_bar0 + 1.0); // p_0
    double kept = 0.0;
    for (int n = 0; n < d; ++n) {
        rho(n, n) = p;
        kept += p;
        p *= ratio;
    }
    // Tail mass of the untruncated distribution: ratio^d.
    const double tail = std::pow(ratio, d);
    if (tail > 1e-6) {
        std::ostringstream oss;
        oss << "thermal_state: truncated tail mass " << tail << " at n_bar0 = " << n_bar0
            << ", cutoff = " << d;
        warn(oss.str());
    }
    rho /= kept;
    return DensityMatrix(std::move(rho));
}

Operator dagger(const Operator& op) {
    return op.adjoint();
}

Operator commutator(const Operator& lhs, const Operator& rhs) {
    return lhs * rhs - rhs * lhs;
}

Operator kron(const Operator& lhs, const Operator& rhs) {
    const auto lr = lhs.rows(), lc = lhs.cols(), rr = rhs.rows(), rc = rhs.cols();
    Operator out(lr * rr, lc * rc);
    for (Eigen::Index i = 0; i < lr; ++i)
        for (Eigen::Index j = 0; j < lc; ++j)
            out.block(i * rr, j * rc, rr, rc) = lhs(i, j) * rhs;
    return out;
}

} // namespace ptc
