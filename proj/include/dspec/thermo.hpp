#pragma once

// Defect thermodynamics: formation energies as affine functions of the Fermi
// level, cohesive energies, charge transition levels, and the stable-charge
// map (lower envelope of the formation lines over the gap).
//
//   E_f(X^q; E_F) = E_tot[X^q] - E_tot[bulk] - sum_i n_i mu_i
//                   + q (eps_VBM + E_F) + E_corr
//
// E_corr is the user's override when present, otherwise the screened
// Madelung correction plus the potential-alignment offset.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "dspec/chargecorr.hpp"
#include "dspec/data_model.hpp"
#include "dspec/errors.hpp"

namespace dspec {

struct FormationLine {
    std::string label;
    int charge = 0;
    double intercept_eV = 0.0;  // formation energy at E_F = 0
    double slope = 0.0;         // exactly the integer charge

    double at(double fermi_eV) const { return intercept_eV + slope * fermi_eV; }
};

struct ChargeTransitionLevel {
    std::string label;
    int q1 = 0;
    int q2 = 0;
    double level_eV = 0.0;  // Fermi level above VBM where the states are degenerate
};

struct StabilityInterval {
    double fermi_min_eV = 0.0;
    double fermi_max_eV = 0.0;
    int charge = 0;
    std::string label;
};

struct StabilityMap {
    std::vector<StabilityInterval> intervals;  // partition of [0, gap], charge non-increasing
};

/// E_corr of a defect entry: explicit override wins; otherwise screened
/// Madelung correction for the host cell plus the alignment offset.
inline double effective_correction(const DefectEntry& entry, const HostMaterial& host,
                                   WarningLog* warnings = nullptr) {
    if (entry.correction_eV) {
        if (entry.alignment_eV != 0.0)
            warn(warnings, "defect '" + entry.label +
                               "': correction override set, alignment offset ignored");
        return *entry.correction_eV;
    }
    return madelung_correction(entry.charge, host.cubic_cell_length_A,
                               host.dielectric_constant) +
           entry.alignment_eV;
}

inline double formation_energy(const DefectEntry& entry, const HostMaterial& host,
                               const ChemicalPotentialTable& mu, double fermi_eV,
                               WarningLog* warnings = nullptr) {
    if (fermi_eV < 0.0 || fermi_eV > host.band_gap_eV)
        warn(warnings, "defect '" + entry.label + "': Fermi level " + std::to_string(fermi_eV) +
                           " eV outside [0, gap]");
    double reservoir = 0.0;
    for (const auto& delta : entry.species_deltas) {
        const auto it = mu.find(delta.species);
        if (it == mu.end())
            throw UnknownSpecies("defect '" + entry.label + "': no chemical potential for '" +
                                 delta.species + "'");
        reservoir += delta.count * it->second.mu_eV;
    }
    return entry.total_energy_eV - host.bulk_total_energy_eV - reservoir +
           entry.charge * (host.vbm_eV + fermi_eV) + effective_correction(entry, host, warnings);
}

inline FormationLine formation_line(const DefectEntry& entry, const HostMaterial& host,
                                    const ChemicalPotentialTable& mu,
                                    WarningLog* warnings = nullptr) {
    FormationLine line;
    line.label = entry.label;
    line.charge = entry.charge;
    line.intercept_eV = formation_energy(entry, host, mu, 0.0, warnings);
    line.slope = entry.charge;
    return line;
}

/// (sum_i n_i E_atom,i - E_tot) / n for a cell of composition {(species, n_i)}.
inline double cohesive_energy(double total_energy_eV,
                              const std::vector<std::pair<std::string, int>>& composition,
                              const ChemicalPotentialTable& mu) {
    if (composition.empty()) throw EmptyInput("cohesive_energy: empty composition");
    double atoms_energy = 0.0;
    long n = 0;
    for (const auto& [species, count] : composition) {
        if (count <= 0) throw ValidationError("cohesive_energy: counts must be positive");
        const auto it = mu.find(species);
        if (it == mu.end())
            throw UnknownSpecies("cohesive_energy: no isolated-atom energy for '" + species + "'");
        atoms_energy += count * it->second.atom_energy_eV;
        n += count;
    }
    return (atoms_energy - total_energy_eV) / static_cast<double>(n);
}

/// Fermi level (relative to VBM) where charge states q1 and q2 are
/// degenerate: (E1 + C1 - E2 - C2)/(q2 - q1) - vbm. Symmetric in the two
/// arguments.
inline double charge_transition_level(double e1_eV, double corr1_eV, int q1, double e2_eV,
                                      double corr2_eV, int q2, double vbm_eV = 0.0) {
    if (q1 == q2) throw EqualCharges("charge transition level needs two distinct charges");
    return (e1_eV + corr1_eV - e2_eV - corr2_eV) / static_cast<double>(q2 - q1) - vbm_eV;
}

inline ChargeTransitionLevel charge_transition_level(const DefectEntry& a, const DefectEntry& b,
                                                     const HostMaterial& host,
                                                     WarningLog* warnings = nullptr) {
    ChargeTransitionLevel ctl;
    ctl.label = a.label;
    ctl.q1 = a.charge;
    ctl.q2 = b.charge;
    ctl.level_eV = charge_transition_level(
        a.total_energy_eV, effective_correction(a, host, warnings), a.charge, b.total_energy_eV,
        effective_correction(b, host, warnings), b.charge, host.vbm_eV);
    return ctl;
}

namespace detail {

// Deterministic merge of coincident lines (slope and intercept within tol):
// keep the lexicographically smallest label.
inline std::vector<FormationLine> merge_degenerate(std::vector<FormationLine> lines, double tol) {
    std::stable_sort(lines.begin(), lines.end(), [](const FormationLine& a, const FormationLine& b) {
        if (a.slope != b.slope) return a.slope < b.slope;
        if (a.intercept_eV != b.intercept_eV) return a.intercept_eV < b.intercept_eV;
        return a.label < b.label;
    });
    std::vector<FormationLine> merged;
    for (const auto& line : lines) {
        if (!merged.empty() && std::abs(merged.back().slope - line.slope) <= tol &&
            std::abs(merged.back().intercept_eV - line.intercept_eV) <= tol) {
            if (line.label < merged.back().label) merged.back().label = line.label;
            continue;
        }
        merged.push_back(line);
    }
    return merged;
}

}  // namespace detail

/// Lower envelope of formation lines over [0, gap]. Because the envelope of
/// affine functions is concave and slope equals charge, the stable charge is
/// non-increasing with Fermi level; breakpoints are the transition levels of
/// the adjacent stable pair.
inline StabilityMap stability_map(const std::vector<FormationLine>& input, double gap_eV) {
    if (input.empty()) throw EmptyInput("stability_map: no formation lines");
    if (gap_eV <= 0.0) throw ValidationError("stability_map: gap must be positive");
    const std::vector<FormationLine> lines = detail::merge_degenerate(input, 1e-9);

    // stable line at E_F = 0: lowest value, ties to the smaller slope (lower
    // immediately to the right), then label
    std::size_t current = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const double d = lines[i].at(0.0) - lines[current].at(0.0);
        if (d < -1e-12 ||
            (std::abs(d) <= 1e-12 && (lines[i].slope < lines[current].slope ||
                                      (lines[i].slope == lines[current].slope &&
                                       lines[i].label < lines[current].label))))
            current = i;
    }

    StabilityMap map;
    double fermi = 0.0;
    while (true) {
        // earliest crossing with a line of strictly smaller slope
        double next_fermi = gap_eV;
        std::size_t next_line = lines.size();
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (i == current || lines[i].slope >= lines[current].slope) continue;
            const double cross = (lines[i].intercept_eV - lines[current].intercept_eV) /
                                 (lines[current].slope - lines[i].slope);
            if (cross <= fermi + 1e-12) continue;
            if (cross < next_fermi - 1e-12) {
                next_fermi = cross;
                next_line = i;
            } else if (next_line < lines.size() && std::abs(cross - next_fermi) <= 1e-12 &&
                       lines[i].slope < lines[next_line].slope) {
                // coincident crossing: the smaller slope stays lowest beyond it
                next_line = i;
            }
        }
        if (next_line == lines.size() || next_fermi >= gap_eV) {
            map.intervals.push_back({fermi, gap_eV, lines[current].charge, lines[current].label});
            break;
        }
        map.intervals.push_back({fermi, next_fermi, lines[current].charge, lines[current].label});
        fermi = next_fermi;
        current = next_line;
    }
    return map;
}

}
