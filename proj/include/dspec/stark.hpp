#pragma once

// Stark-shift analysis: least-squares extraction of the differential dipole
// moment and polarizability from ZPL-vs-field data,
//
//   dE_ZPL = -(dmu/eps_s) E - (dalpha/(2 eps_s^2)) E^2,
//
// and the point-dipole estimate of the internal effective field,
//   E_eff = (e^2/4 pi eps0) dmu / z^3  (per unit charge), shielded.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "dspec/constants.hpp"
#include "dspec/data_model.hpp"
#include "dspec/errors.hpp"

namespace dspec {

struct StarkFit {
    double delta_mu_e_angstrom = 0.0;      // dmu
    double delta_alpha_A2e_per_V = 0.0;    // dalpha
    double residual_rms_eV = 0.0;
    Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();  // (dmu, dalpha) ordering
};

/// Linear least squares of the shifts zpl - zpl0 against the basis
/// {-E/eps_s, -E^2/(2 eps_s^2)}. The model has no constant term by
/// construction; drift must be absorbed into zpl0 by the caller. Exact for
/// noise-free quadratic data.
inline StarkFit fit_stark(const StarkSeriesData& series, double epsilon_s,
                          const std::string& label = "series") {
    // Degenerate field values are reported through the rank check below
    // (SingularDesign), not as a validation failure: repeated fields still
    // determine the fit as long as two distinct nonzero values remain.
    if (series.points.size() < 3)
        throw ValidationError("fit_stark '" + label + "': need at least 3 points");
    if (epsilon_s < 1.0) throw ValidationError("fit_stark: epsilon_s must be >= 1");

    const int n = static_cast<int>(series.points.size());
    Eigen::MatrixXd design(n, 2);
    Eigen::VectorXd shifts(n);
    for (int k = 0; k < n; ++k) {
        const double field = series.points[k].field_V_per_A;
        design(k, 0) = -field / epsilon_s;
        design(k, 1) = -field * field / (2.0 * epsilon_s * epsilon_s);
        shifts(k) = series.points[k].zpl_eV - series.zpl_eV_at_zero_field;
    }

    // column equilibration, then pivoted QR on the design itself; normal
    // equations would square the conditioning and cost ~1e-10 relative error
    // on the quadratic coefficient
    Eigen::Vector2d col_scale;
    for (int c = 0; c < 2; ++c) {
        const double norm = design.col(c).norm();
        col_scale(c) = norm > 0.0 ? norm : 1.0;
    }
    const Eigen::MatrixXd scaled = design * col_scale.cwiseInverse().asDiagonal();
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
    if (qr.rank() < 2)
        throw SingularDesign("fit_stark '" + label +
                             "': field values cannot separate linear and quadratic terms");
    const Eigen::Vector2d solution_scaled = qr.solve(shifts);
    const Eigen::Vector2d solution = solution_scaled.cwiseQuotient(col_scale);

    StarkFit fit;
    fit.delta_mu_e_angstrom = solution(0);
    fit.delta_alpha_A2e_per_V = solution(1);

    const Eigen::VectorXd residual = shifts - design * solution;
    const double rss = residual.squaredNorm();
    fit.residual_rms_eV = std::sqrt(rss / n);
    const double sigma_sq = n > 2 ? rss / (n - 2) : 0.0;
    const Eigen::Matrix2d normal_inv_scaled = (scaled.transpose() * scaled).inverse();
    const Eigen::Matrix2d unscale = col_scale.cwiseInverse().asDiagonal();
    fit.covariance = sigma_sq * (unscale * normal_inv_scaled * unscale);
    return fit;
}

/// Point-dipole field at distance z from dipole dmu, divided by the
/// shielding factor, in GV/cm.
inline double effective_field_GV_per_cm(double delta_mu_e_angstrom, double z_scale_A = 1.0,
                                        double shielding = 1.0) {
    if (z_scale_A <= 0.0) throw ValidationError("effective_field: z_scale must be positive");
    if (shielding < 1.0) throw ValidationError("effective_field: shielding must be >= 1");
    const double field_V_per_A = constants::coulomb_constant_eV_angstrom * delta_mu_e_angstrom /
                                 (z_scale_A * z_scale_A * z_scale_A);
    return constants::volts_per_angstrom_to_GV_per_cm(field_V_per_A) / shielding;
}

}
