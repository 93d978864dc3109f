#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "dspec/constants.hpp"

namespace C = dspec::constants;
using Catch::Approx;

TEST_CASE("pinned constants") {
    CHECK(std::abs(C::coulomb_constant_eV_angstrom - 14.399645) <= 1e-5);
    CHECK(C::bohr_magneton_ueV_per_T == Approx(57.88381806).epsilon(1e-9));
    CHECK(C::nuclear_magneton_neV_per_T == Approx(31.52451258).epsilon(1e-9));
    CHECK(C::debye_per_e_angstrom == Approx(4.803204713).epsilon(1e-9));
    CHECK(C::bohr_radius_angstrom == Approx(0.5291772109).epsilon(1e-9));
    CHECK(C::hc_eV_nm == Approx(1239.841984).epsilon(1e-9));
}

TEST_CASE("magneton frequency equivalents agree with the energy values") {
    // mu/h must equal the ueV/neV values converted through Planck's constant
    const double MHz_per_ueV = 1e-6 / C::planck_eV_s * 1e-6;
    CHECK(C::bohr_magneton_MHz_per_T ==
          Approx(C::bohr_magneton_ueV_per_T * MHz_per_ueV).epsilon(1e-8));
    const double MHz_per_neV = 1e-9 / C::planck_eV_s * 1e-6;
    CHECK(C::nuclear_magneton_MHz_per_T ==
          Approx(C::nuclear_magneton_neV_per_T * MHz_per_neV).epsilon(1e-8));
    // e * 1 barn * 1 V/A^2 = 1e-8 eV
    CHECK(C::e_barn_V_per_A2_in_MHz == Approx(1e-8 / C::planck_eV_s * 1e-6).epsilon(1e-8));
}

TEST_CASE("dipole moment bridge") {
    // reference values: 1.23 eA -> 5.90 D, 0.02 eA -> 0.095 D
    CHECK(std::abs(C::e_angstrom_to_debye(1.23) - 5.90) / 5.90 <= 0.005);
    CHECK(std::abs(C::e_angstrom_to_debye(0.02) - 0.095) / 0.095 <= 0.02);
    CHECK(C::e_angstrom_to_debye(0.0) == 0.0);
}

TEST_CASE("polarizability bridge") {
    // hand check of the chain: alpha * (e/4 pi eps0) / a0^3
    const double expect_012 = 0.12 * 14.39964548 /
                              (0.5291772109 * 0.5291772109 * 0.5291772109);
    CHECK(C::polarizability_to_bohr_cubed(0.12) == Approx(expect_012).epsilon(1e-12));
    // reference values: 0.12 -> 11.6 a0^3, 0.025 -> 2.43 a0^3
    CHECK(std::abs(C::polarizability_to_bohr_cubed(0.12) - 11.66) / 11.66 <= 0.01);
    CHECK(std::abs(C::polarizability_to_bohr_cubed(0.025) - 2.43) / 2.43 <= 0.01);
    CHECK(C::polarizability_to_bohr_cubed(0.0) == 0.0);
}

TEST_CASE("field unit bridge") {
    CHECK(C::volts_per_angstrom_to_GV_per_cm(17.71) == Approx(1.771).epsilon(1e-12));
    CHECK(C::volts_per_angstrom_to_GV_per_cm(0.288) == Approx(0.0288).epsilon(1e-12));
    CHECK(C::volts_per_angstrom_to_GV_per_cm(0.0) == 0.0);
}

TEST_CASE("photon energy bridge") {
    CHECK(C::eV_to_nm(1.04427) == Approx(1187.2).epsilon(1e-3));
    CHECK(C::nm_to_eV(533.0) == Approx(2.3262).epsilon(1e-4));
    for (double nm : {533.0, 764.0, 1765.0, 1187.0, 1259.0}) {
        const double back = C::eV_to_nm(C::nm_to_eV(nm));
        CHECK(std::abs(back - nm) / nm <= 1e-3);
    }
}

TEST_CASE("round trips return the input") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(1e-4, 1e4);
    for (int k = 0; k < 200; ++k) {
        const double x = dist(rng);
        CHECK(C::debye_to_e_angstrom(C::e_angstrom_to_debye(x)) == Approx(x).epsilon(1e-12));
        CHECK(C::bohr_cubed_to_polarizability(C::polarizability_to_bohr_cubed(x)) ==
              Approx(x).epsilon(1e-12));
        CHECK(C::GV_per_cm_to_volts_per_angstrom(C::volts_per_angstrom_to_GV_per_cm(x)) ==
              Approx(x).epsilon(1e-12));
        CHECK(C::nm_to_eV(C::eV_to_nm(x)) == Approx(x).epsilon(1e-12));
    }
}

TEST_CASE("conversions are linear") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(-50.0, 50.0);
    for (int k = 0; k < 200; ++k) {
        const double x = dist(rng);
        // power-of-two scalings commute with the multiply exactly
        for (double a : {0.5, 2.0, 4.0, 1024.0}) {
            CHECK(C::e_angstrom_to_debye(a * x) == a * C::e_angstrom_to_debye(x));
            CHECK(C::polarizability_to_bohr_cubed(a * x) ==
                  a * C::polarizability_to_bohr_cubed(x));
            CHECK(C::volts_per_angstrom_to_GV_per_cm(a * x) ==
                  a * C::volts_per_angstrom_to_GV_per_cm(x));
        }
        // arbitrary scalings to floating-point rounding
        const double a = dist(rng);
        CHECK(C::e_angstrom_to_debye(a * x) ==
              Approx(a * C::e_angstrom_to_debye(x)).margin(1e-12 * std::abs(a * x) + 1e-300));
    }
}
