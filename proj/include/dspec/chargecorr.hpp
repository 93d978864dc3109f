#pragma once

// Finite-size electrostatic correction for charged cubic supercells: the
// Ewald-summed point-charge (Madelung) energy in a homogeneous neutralizing
// background, screened by the static dielectric constant. This is the
// leading monopole term of the usual charged-defect correction schemes; the
// potential-alignment part is accepted as an input offset elsewhere.
//
// Lattice energies are computed in units of e^2/(4 pi eps0 * Angstrom) and
// converted to eV at the interface.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "dspec/constants.hpp"
#include "dspec/errors.hpp"

namespace dspec {

struct EwaldSite {
    Eigen::Vector3d fractional = Eigen::Vector3d::Zero();
    double charge = 0.0;
};

struct EwaldConfig {
    double splitting_per_A = 0.0;       // screening width kappa
    double real_space_cutoff_A = 0.0;
    double reciprocal_cutoff_per_A = 0.0;
    double target_rel_tolerance = 1e-8;
};

namespace detail {

inline EwaldConfig derive_cutoffs(double cell_A, double splitting_per_A, double tol,
                                  double margin) {
    // erfc(kappa*R) and exp(-G^2/4kappa^2) both fall below ~tol at x = sqrt(ln(1/tol));
    // the margin widens the shells until the construction-time self-check passes.
    const double x = std::sqrt(std::log(1.0 / (tol * 1e-2)));
    EwaldConfig cfg;
    cfg.splitting_per_A = splitting_per_A;
    cfg.real_space_cutoff_A = margin * (x + 1.0) / splitting_per_A;
    cfg.reciprocal_cutoff_per_A = margin * 2.0 * splitting_per_A * (x + 1.0);
    cfg.target_rel_tolerance = tol;
    (void)cell_A;
    return cfg;
}

}  // namespace detail

/// Total electrostatic energy per cell of point charges at fractional
/// positions in a cubic cell of edge `cell_A`, with a uniform background
/// neutralizing any net charge. Units: e^2/(4 pi eps0 A).
inline double ewald_lattice_energy(double cell_A, const std::vector<EwaldSite>& sites,
                                   const EwaldConfig& cfg) {
    if (cell_A <= 0.0) throw ValidationError("ewald_lattice_energy: cell length must be positive");
    if (sites.empty()) throw EmptyInput("ewald_lattice_energy: no sites");
    const double kappa = cfg.splitting_per_A;
    const double volume = cell_A * cell_A * cell_A;
    const int n = static_cast<int>(sites.size());

    double charge_sum = 0.0, charge_sq_sum = 0.0;
    for (const auto& s : sites) {
        charge_sum += s.charge;
        charge_sq_sum += s.charge * s.charge;
    }

    // real space: 0.5 sum_ij sum_R' q_i q_j erfc(kappa r)/r
    const int shells = static_cast<int>(std::ceil(cfg.real_space_cutoff_A / cell_A));
    const double r_cut_sq = cfg.real_space_cutoff_A * cfg.real_space_cutoff_A;
    double e_real = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Eigen::Vector3d d = (sites[i].fractional - sites[j].fractional) * cell_A;
            const double qq = sites[i].charge * sites[j].charge;
            for (int a = -shells; a <= shells; ++a)
                for (int b = -shells; b <= shells; ++b)
                    for (int c = -shells; c <= shells; ++c) {
                        if (i == j && a == 0 && b == 0 && c == 0) continue;
                        const Eigen::Vector3d r = d + cell_A * Eigen::Vector3d(a, b, c);
                        const double r2 = r.squaredNorm();
                        if (r2 > r_cut_sq) continue;
                        const double dist = std::sqrt(r2);
                        e_real += qq * std::erfc(kappa * dist) / dist;
                    }
        }
    }
    e_real *= 0.5;

    // reciprocal space: (2 pi / V) sum_G' exp(-G^2/4kappa^2)/G^2 |S(G)|^2
    const double g_unit = 2.0 * M_PI / cell_A;
    const int m_max = static_cast<int>(std::ceil(cfg.reciprocal_cutoff_per_A / g_unit));
    const double g_cut_sq = cfg.reciprocal_cutoff_per_A * cfg.reciprocal_cutoff_per_A;
    double e_recip = 0.0;
    for (int a = -m_max; a <= m_max; ++a)
        for (int b = -m_max; b <= m_max; ++b)
            for (int c = -m_max; c <= m_max; ++c) {
                if (a == 0 && b == 0 && c == 0) continue;
                const Eigen::Vector3d g = g_unit * Eigen::Vector3d(a, b, c);
                const double g2 = g.squaredNorm();
                if (g2 > g_cut_sq) continue;
                std::complex<double> structure(0.0, 0.0);
                for (const auto& s : sites) {
                    const double phase = g.dot(s.fractional * cell_A);
                    structure += s.charge * std::complex<double>(std::cos(phase), std::sin(phase));
                }
                e_recip += std::exp(-g2 / (4.0 * kappa * kappa)) / g2 * std::norm(structure);
            }
    e_recip *= 2.0 * M_PI / volume;

    const double e_self = -kappa / std::sqrt(M_PI) * charge_sq_sum;
    const double e_background = -M_PI / (2.0 * kappa * kappa * volume) * charge_sum * charge_sum;
    return e_real + e_recip + e_self + e_background;
}

/// Splitting parameter sqrt(pi)/L with cutoffs grown until halving the
/// splitting parameter (with cutoffs re-derived) moves the result by less
/// than the target relative tolerance.
inline EwaldConfig auto_ewald_config(double cell_A, const std::vector<EwaldSite>& sites,
                                     double target_rel_tolerance = 1e-8) {
    if (cell_A <= 0.0) throw ValidationError("auto_ewald_config: cell length must be positive");
    if (target_rel_tolerance < 1e-13)
        throw ConvergenceFailure(
            "Ewald self-check tolerance below the double-precision floor (1e-13)");
    const double kappa = std::sqrt(M_PI) / cell_A;
    double margin = 1.2;
    for (int attempt = 0; attempt < 8; ++attempt, margin *= 1.5) {
        const EwaldConfig cfg = detail::derive_cutoffs(cell_A, kappa, target_rel_tolerance, margin);
        const EwaldConfig half = detail::derive_cutoffs(cell_A, 0.5 * kappa, target_rel_tolerance, margin);
        const double e0 = ewald_lattice_energy(cell_A, sites, cfg);
        const double e1 = ewald_lattice_energy(cell_A, sites, half);
        const double scale = std::max({std::abs(e0), std::abs(e1), 1e-300});
        if (std::abs(e0 - e1) / scale < target_rel_tolerance) return cfg;
    }
    throw ConvergenceFailure("Ewald self-check did not converge while growing cutoffs");
}

/// Dimensionless Madelung constant nu of a unit point charge on a simple
/// cubic lattice of spacing L with neutralizing background: nu = 2 L E.
/// Independent of L (the sum scales as 1/L).
inline double madelung_constant_cubic(double cell_A, double target_rel_tolerance = 1e-8) {
    if (cell_A <= 0.0) throw ValidationError("madelung_constant_cubic: L must be positive");
    const std::vector<EwaldSite> site{{Eigen::Vector3d::Zero(), 1.0}};
    const EwaldConfig cfg = auto_ewald_config(cell_A, site, target_rel_tolerance);
    return 2.0 * cell_A * ewald_lattice_energy(cell_A, site, cfg);
}

/// The simple-cubic nu evaluated once at a reference scale (it is scale
/// invariant), cached for reuse.
inline double madelung_nu() {
    static const double nu_reference = madelung_constant_cubic(1.0);
    return nu_reference;
}

/// Leading (monopole) finite-size correction in eV:
///   E_corr = q^2 |nu| e^2/(4 pi eps0) / (2 eps_s L).
/// nu is evaluated once, so the q^2 and 1/L scalings are exact.
inline double madelung_correction(int charge, double cell_A, double epsilon_s) {
    if (cell_A <= 0.0) throw ValidationError("madelung_correction: L must be positive");
    if (epsilon_s < 1.0) throw ValidationError("madelung_correction: epsilon_s must be >= 1");
    if (charge == 0) return 0.0;
    return static_cast<double>(charge) * charge * std::abs(madelung_nu()) *
           constants::coulomb_constant_eV_angstrom / (2.0 * epsilon_s * cell_A);
}

}
