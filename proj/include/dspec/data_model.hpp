#pragma once

// In-memory dataset: host material, chemical potential table, defect
// supercell entries, spin systems, Stark series. Mirrors the JSON input
// one-to-one; parsing and validation live in dataset_json.hpp.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dspec/errors.hpp"
#include "dspec/spin_hamiltonian.hpp"
#include "dspec/symmetry.hpp"

namespace dspec {

struct HostMaterial {
    double bulk_total_energy_eV = 0.0;
    int n_bulk_atoms = 0;
    double vbm_eV = 0.0;
    double band_gap_eV = 0.0;
    double dielectric_constant = 1.0;
    double cubic_cell_length_A = 0.0;

    void validate() const {
        if (n_bulk_atoms <= 0) throw ValidationError("host: n_bulk_atoms must be positive");
        if (band_gap_eV <= 0.0) throw ValidationError("host: band_gap_eV must be positive");
        if (dielectric_constant < 1.0)
            throw ValidationError("host: dielectric_constant must be >= 1");
        if (cubic_cell_length_A <= 0.0)
            throw ValidationError("host: cubic_cell_length_A must be positive");
    }
};

struct ChemicalPotentialEntry {
    double mu_eV = 0.0;       // reservoir chemical potential
    double atom_energy_eV = 0.0;  // isolated-atom reference for cohesive energies
};

using ChemicalPotentialTable = std::map<std::string, ChemicalPotentialEntry>;

struct SpeciesDelta {
    std::string species;
    int count = 0;  // atoms added (+) or removed (-) relative to the bulk cell
};

struct DefectEntry {
    std::string label;
    int charge = 0;
    double total_energy_eV = 0.0;
    std::vector<SpeciesDelta> species_deltas;
    std::optional<double> correction_eV;  // replaces the computed correction when set
    double alignment_eV = 0.0;
};

struct StarkPoint {
    double field_V_per_A = 0.0;
    double zpl_eV = 0.0;
};

struct StarkSeriesData {
    double zpl_eV_at_zero_field = 0.0;
    std::vector<StarkPoint> points;

    void validate(const std::string& label) const {
        if (points.size() < 3)
            throw ValidationError("stark_series '" + label + "': need at least 3 points");
        for (std::size_t i = 0; i < points.size(); ++i)
            for (std::size_t j = i + 1; j < points.size(); ++j)
                if (points[i].field_V_per_A == points[j].field_V_per_A)
                    throw ValidationError("stark_series '" + label +
                                          "': duplicate field value");
    }
};

struct PromotionSet {
    std::string label;
    int charge = 0;
    SpinChannel channel = SpinChannel::Up;
    std::vector<LabeledConfiguration> configs;  // first entry is the ground state
};

struct Dataset {
    HostMaterial host;
    ChemicalPotentialTable chemical_potentials;
    std::vector<DefectEntry> defects;
    std::map<std::string, SpinSystemParams> spin_systems;
    std::map<std::string, StarkSeriesData> stark_series;
    std::vector<PromotionSet> orbital_configs;
};

}
