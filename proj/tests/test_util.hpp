// test_util.hpp: deterministic random states and small helpers shared by
// the unit tests.

#pragma once

#include <random>

#include "ptc/fock.hpp"

namespace ptc::test {

inline Eigen::MatrixXcd random_complex_matrix(int rows, int cols, std::mt19937& gen) {
    std::normal_distribution<double> dist;
    Eigen::MatrixXcd mat(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            mat(i, j) = Cplx(dist(gen), dist(gen));
    return mat;
}

// Ginibre construction: G G^dag normalized is Hermitian, PSD, unit trace.
// support < dim confines the state away from the truncation edge.
inline Eigen::MatrixXcd random_density(int dim, std::mt19937& gen, int support = 0) {
    const int s = support > 0 ? support : dim;
    Eigen::MatrixXcd g = random_complex_matrix(s, s, gen);
    Eigen::MatrixXcd core = g * g.adjoint();
    core /= core.trace().real();
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    rho.topLeftCorner(s, s) = core;
    // Bit-exact Hermitian, like every constructed state in the library.
    for (int i = 0; i < dim; ++i) {
        rho(i, i) = Cplx(rho(i, i).real(), 0.0);
        for (int j = i + 1; j < dim; ++j)
            rho(j, i) = std::conj(rho(i, j));
    }
    return rho;
}

inline double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

} // namespace ptc::test
