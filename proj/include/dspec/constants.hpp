#pragma once

// Physical constants (CODATA 2018, 10 significant digits) and the unit
// conversions used across the toolkit.
//
// Canonical internal units: energies in eV, lengths in Angstrom, magnetic
// fields in Tesla, spin matrices in MHz, ZFS inputs in GHz, electric field
// gradients in V/A^2. Everything else is converted at I/O boundaries with
// the functions below.

namespace dspec::constants {

inline constexpr double bohr_magneton_ueV_per_T = 57.88381806;       // mu_B
inline constexpr double nuclear_magneton_neV_per_T = 31.52451258;    // mu_N
inline constexpr double coulomb_constant_eV_angstrom = 14.39964548;  // e^2 / (4 pi eps0)
inline constexpr double debye_per_e_angstrom = 4.803204713;          // 1 eA in Debye
inline constexpr double bohr_radius_angstrom = 0.5291772109;         // a_0
inline constexpr double vacuum_permittivity_F_per_m = 8.854187813e-12;

inline constexpr double planck_eV_s = 4.135667696e-15;               // h
inline constexpr double hc_eV_nm = 1239.841984;                      // h*c

// Zeeman prefactors for spin matrices kept in MHz: mu/h.
inline constexpr double bohr_magneton_MHz_per_T = 13996.24494;
inline constexpr double nuclear_magneton_MHz_per_T = 7.622593229;

// Quadrupole unit chain: 1 barn = 1e-8 A^2, so e * Q[barn] * V_zz[V/A^2]
// is 1e-8 eV; dividing by h gives the frequency below.
inline constexpr double e_barn_V_per_A2_in_MHz = 2.417989242;

inline constexpr double MHz_in_eV = planck_eV_s * 1e6;
inline constexpr double eV_in_MHz = 1.0 / MHz_in_eV;
inline constexpr double GHz_in_MHz = 1e3;

inline constexpr double bohr_radius_cubed_A3 =
    bohr_radius_angstrom * bohr_radius_angstrom * bohr_radius_angstrom;

// --- dipole moment: eA <-> Debye ------------------------------------------

constexpr double e_angstrom_to_debye(double mu_eA) {
    return mu_eA * debye_per_e_angstrom;
}

constexpr double debye_to_e_angstrom(double mu_D) {
    return mu_D / debye_per_e_angstrom;
}

// --- polarizability: A^2 e / V <-> a_0^3 ----------------------------------
//
// alpha [A^2 e/V] * (e/4 pi eps0) [V*A] has dimension A^3; dividing by a_0^3
// expresses it in atomic volume units.

constexpr double polarizability_to_bohr_cubed(double alpha_A2e_per_V) {
    return alpha_A2e_per_V * coulomb_constant_eV_angstrom / bohr_radius_cubed_A3;
}

constexpr double bohr_cubed_to_polarizability(double alpha_a03) {
    return alpha_a03 * bohr_radius_cubed_A3 / coulomb_constant_eV_angstrom;
}

// --- electric field: V/A <-> GV/cm ----------------------------------------

constexpr double volts_per_angstrom_to_GV_per_cm(double field_V_per_A) {
    return field_V_per_A * 0.1;
}

constexpr double GV_per_cm_to_volts_per_angstrom(double field_GV_per_cm) {
    return field_GV_per_cm * 10.0;
}

// --- photon energy: eV <-> nm ----------------------------------------------

constexpr double eV_to_nm(double energy_eV) {
    return hc_eV_nm / energy_eV;
}

constexpr double nm_to_eV(double wavelength_nm) {
    return hc_eV_nm / wavelength_nm;
}

}
