#include "ptc/observables.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ptc/warnings.hpp"

namespace ptc {

double phonon_number(const DensityMatrix& rho) {
    const Eigen::MatrixXcd& mat = rho.matrix();
    Cplx acc(0.0, 0.0);
    for (int n = 0; n < rho.dim(); ++n)
        acc += static_cast<double>(n) * mat(n, n);
    if (std::abs(acc.imag()) > 1e-10)
        throw std::domain_error("phonon_number: nonreal expectation value");
    return acc.real();
}

double purity(const DensityMatrix& rho) {
    return rho.matrix().cwiseAbs2().sum();
}

double purity_by_square(const DensityMatrix& rho) {
    return (rho.matrix() * rho.matrix()).trace().real();
}

std::vector<double> fock_populations(const DensityMatrix& rho, const std::vector<int>& indices) {
    const Eigen::MatrixXcd& mat = rho.matrix();
    std::vector<double> populations;
    populations.reserve(indices.size());
    for (int n : indices) {
        if (n < 0 || n >= rho.dim())
            throw std::domain_error("fock_populations: index " + std::to_string(n) +
                                    " outside [0, " + std::to_string(rho.dim() - 1) + "]");
        const Cplx value = mat(n, n);
        if (std::abs(value.imag()) > 1e-12 || value.real() < -1e-12)
            throw std::domain_error("fock_populations: invalid diagonal entry at n = " +
                                    std::to_string(n));
        populations.push_back(value.real());
    }
    return populations;
}

HusimiGridSpec HusimiGridSpec::centered(double radius, int resolution) {
    HusimiGridSpec spec;
    spec.q_min = -2.0 * radius;
    spec.q_max = 2.0 * radius;
    spec.p_min = -2.0 * radius;
    spec.p_max = 2.0 * radius;
    spec.resolution = resolution;
    return spec;
}

HusimiGrid husimi_q(const DensityMatrix& rho, const HusimiGridSpec& spec) {
    if (spec.resolution < 2)
        throw std::domain_error("husimi_q: resolution must be at least 2");
    if (spec.q_max <= spec.q_min || spec.p_max <= spec.p_min)
        throw std::domain_error("husimi_q: empty grid ranges");

    const int d = rho.dim();
    const int res = spec.resolution;
    const Eigen::MatrixXcd& mat = rho.matrix();

    HusimiGrid grid;
    grid.spec = spec;
    grid.values.resize(res, res);

    const double dq = grid.cell_dq();
    const double dp = grid.cell_dp();

    // One column of coherent vectors per q value amortizes the rho product.
    // Columns are built inline (same arithmetic as coherent_state_vector,
    // value-level equality is a unit test) so far-out grid corners do not
    // spam the truncation warning channel; an amplitude whose truncated
    // weight underflows completely contributes Q = 0.
    const auto fill_coherent = [d](Eigen::Ref<Eigen::VectorXcd> column, Cplx alpha) {
        column(0) = std::exp(-0.5 * std::norm(alpha));
        for (int n = 1; n < d; ++n)
            column(n) = column(n - 1) * alpha / std::sqrt(static_cast<double>(n));
        const double norm = column.norm();
        if (norm > 0.0)
            column /= norm;
    };

    Eigen::MatrixXcd coherent(d, res);
    for (int iq = 0; iq < res; ++iq) {
        const double q = spec.q_min + iq * dq;
        for (int ip = 0; ip < res; ++ip)
            fill_coherent(coherent.col(ip), Cplx(q, spec.p_min + ip * dp));
        const Eigen::MatrixXcd rho_coherent = mat * coherent;
        for (int ip = 0; ip < res; ++ip) {
            const Cplx overlap = coherent.col(ip).dot(rho_coherent.col(ip));
            const double value = overlap.real() / std::numbers::pi;
            if (value < -1e-12)
                throw std::domain_error("husimi_q: negative value below tolerance");
            grid.values(iq, ip) = value;
        }
    }

    const double peak = grid.values.maxCoeff();
    double boundary_max = 0.0;
    for (int i = 0; i < res; ++i) {
        boundary_max = std::max({boundary_max, grid.values(0, i), grid.values(res - 1, i),
                                 grid.values(i, 0), grid.values(i, res - 1)});
    }
    if (peak > 0.0 && boundary_max > 1e-4 * peak) {
        std::ostringstream oss;
        oss << "husimi_q: boundary cells carry " << boundary_max / peak
            << " of the grid maximum; widen the grid";
        warn(oss.str());
    }
    return grid;
}

std::vector<std::pair<double, double>> HusimiGrid::radial_profile() const {
    const int res = spec.resolution;
    const double bin_width = std::max(cell_dq(), cell_dp());
    const double r_max = std::hypot(std::max(std::abs(spec.q_min), std::abs(spec.q_max)),
                                    std::max(std::abs(spec.p_min), std::abs(spec.p_max)));
    const int n_bins = static_cast<int>(r_max / bin_width) + 1;
    std::vector<double> sums(n_bins, 0.0);
    std::vector<long> counts(n_bins, 0);
    for (int iq = 0; iq < res; ++iq) {
        for (int ip = 0; ip < res; ++ip) {
            const double r = std::hypot(q_at(iq), p_at(ip));
            const int bin = static_cast<int>(r / bin_width);
            if (bin < n_bins) {
                sums[bin] += values(iq, ip);
                ++counts[bin];
            }
        }
    }
    std::vector<std::pair<double, double>> profile;
    profile.reserve(n_bins);
    for (int b = 0; b < n_bins; ++b)
        if (counts[b] > 0)
            profile.emplace_back((b + 0.5) * bin_width, sums[b] / counts[b]);
    return profile;
}

double HusimiGrid::radial_max_radius() const {
    const auto profile = radial_profile();
    if (profile.empty())
        throw std::domain_error("HusimiGrid: empty radial profile");
    double best_r = profile.front().first;
    double best_q = profile.front().second;
    for (const auto& [r, q] : profile) {
        if (q > best_q) {
            best_q = q;
            best_r = r;
        }
    }
    return best_r;
}

} // namespace ptc
