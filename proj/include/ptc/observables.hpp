// observables.hpp: measurement post-processing of density matrices.

#pragma once

#include <vector>

#include "ptc/fock.hpp"

namespace ptc {

// <a^dag a>; asserts the imaginary part is below 1e-10 before discarding it.
double phonon_number(const DensityMatrix& rho);

// Tr rho^2 via the Hermitian entrywise form sum |rho_ij|^2.
double purity(const DensityMatrix& rho);
// Same quantity via the trace of the matrix square; agreement with purity()
// to 1e-12 is a library property test.
double purity_by_square(const DensityMatrix& rho);

// Diagonal entries rho[n, n] for the requested indices, asserted real and
// >= -1e-12.  Throws std::domain_error for out-of-range indices.
std::vector<double> fock_populations(const DensityMatrix& rho, const std::vector<int>& indices);

struct HusimiGridSpec {
    double q_min = -1.0, q_max = 1.0;
    double p_min = -1.0, p_max = 1.0;
    int resolution = 201; // nodes per axis

    // Default analysis window [-2r, 2r]^2 framing a ring of radius r.
    static HusimiGridSpec centered(double radius, int resolution = 201);
};

// Q(alpha) = <alpha| rho |alpha> / pi sampled on a rectangular grid with
// alpha = q + i p; values(iq, ip) corresponds to (q_min + iq*dq, p_min + ip*dp).
struct HusimiGrid {
    HusimiGridSpec spec;
    Eigen::MatrixXd values;

    double cell_dq() const { return (spec.q_max - spec.q_min) / (spec.resolution - 1); }
    double cell_dp() const { return (spec.p_max - spec.p_min) / (spec.resolution - 1); }
    double cell_area() const { return cell_dq() * cell_dp(); }
    double q_at(int iq) const { return spec.q_min + iq * cell_dq(); }
    double p_at(int ip) const { return spec.p_min + ip * cell_dp(); }

    // Riemann sum of values times cell area; approaches 1 from below for a
    // grid covering the support.
    double riemann_mass() const { return values.sum() * cell_area(); }

    // Azimuthally averaged radial profile binned at the cell scale; returns
    // (bin center radius, mean Q) pairs.
    std::vector<std::pair<double, double>> radial_profile() const;
    // Radius of the radial-profile maximum.
    double radial_max_radius() const;
};

// Evaluates Q over the grid.  Warns when boundary cells carry more than
// 1e-4 of the grid maximum (support not covered).  Values below -1e-12
// raise std::domain_error (the state is not a valid density matrix then).
HusimiGrid husimi_q(const DensityMatrix& rho, const HusimiGridSpec& spec);

} // namespace ptc
