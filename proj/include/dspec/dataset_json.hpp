#pragma once

// JSON ingestion and serialization of the dataset. The schema is strict:
// unknown fields are rejected, every error carries the JSON path of the
// offending value, and syntax errors carry line:column. Tensors may be
// supplied as principal values (canonical) or as full symmetric 3x3
// matrices, which are diagonalized on ingest and re-expressed in principal
// axes ordered |zz| >= |yy| >= |xx|.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "dspec/data_model.hpp"
#include "dspec/errors.hpp"
#include "dspec/symmetry.hpp"

namespace dspec {

using nlohmann::json;

namespace detail {

inline std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

inline const json& require_field(const json& obj, const std::string& path, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(path + ": missing required field '" + key + "'");
    return *it;
}

inline void reject_unknown(const json& obj, const std::string& path,
                           std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw SchemaError(path + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end())
            throw SchemaError(path + ": unknown field '" + key + "'");
    }
}

inline double number_at(const json& obj, const std::string& path, const char* key) {
    const json& v = require_field(obj, path, key);
    if (!v.is_number()) throw SchemaError(path + "/" + key + ": expected a number");
    return v.get<double>();
}

inline double number_or(const json& obj, const std::string& path, const char* key, double fallback) {
    const auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number()) throw SchemaError(path + "/" + key + ": expected a number");
    return it->get<double>();
}

inline int int_at(const json& obj, const std::string& path, const char* key) {
    const json& v = require_field(obj, path, key);
    if (!v.is_number_integer()) throw SchemaError(path + "/" + key + ": expected an integer");
    return v.get<int>();
}

inline std::string string_at(const json& obj, const std::string& path, const char* key) {
    const json& v = require_field(obj, path, key);
    if (!v.is_string()) throw SchemaError(path + "/" + key + ": expected a string");
    return v.get<std::string>();
}

struct PrincipalTriple {
    double xx = 0.0, yy = 0.0, zz = 0.0;
};

/// Diagonalizes a symmetric 3x3 given as nested arrays; principal values
/// ordered |zz| >= |yy| >= |xx| (value-descending on magnitude ties).
/// `remove_trace` drops the isotropic part before ordering, so the ordering
/// convention applies to the traceless tensor (D, EFG) rather than raw
/// eigenvalues.
inline PrincipalTriple principal_from_matrix(const json& m, const std::string& path,
                                             bool remove_trace = false) {
    Eigen::Matrix3d t;
    for (int r = 0; r < 3; ++r) {
        const json& row = m.at(r);
        if (!row.is_array() || row.size() != 3)
            throw SchemaError(path + ": expected 3 rows of 3 numbers");
        for (int c = 0; c < 3; ++c) {
            if (!row.at(c).is_number()) throw SchemaError(path + ": expected a numeric matrix");
            t(r, c) = row.at(c).get<double>();
        }
    }
    const double scale = std::max(1.0, t.cwiseAbs().maxCoeff());
    if ((t - t.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw ValidationError(path + ": matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(t);
    std::array<double, 3> v{solver.eigenvalues()(0), solver.eigenvalues()(1),
                            solver.eigenvalues()(2)};
    if (remove_trace) {
        const double iso = (v[0] + v[1] + v[2]) / 3.0;
        for (double& x : v) x -= iso;
    }
    std::sort(v.begin(), v.end(), [](double a, double b) {
        if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
        return a > b;
    });
    return {v[2], v[1], v[0]};
}

inline bool is_matrix_form(const json& v) {
    return v.is_array() && v.size() == 3 && v.at(0).is_array();
}

inline SpinSystemParams parse_spin_system(const json& obj, const std::string& path) {
    reject_unknown(obj, path, {"S", "I", "g_e", "g_n", "A_MHz", "D_GHz", "EFG", "Q_barn"});
    SpinSystemParams p;
    p.electron_spin = number_at(obj, path, "S");
    p.nuclear_spin = number_at(obj, path, "I");
    p.g_e = number_or(obj, path, "g_e", 2.0023);
    p.g_n = number_at(obj, path, "g_n");  // no physical default exists
    p.quadrupole_Q_barn = number_at(obj, path, "Q_barn");

    const json& a = require_field(obj, path, "A_MHz");
    if (is_matrix_form(a)) {
        const PrincipalTriple pv = principal_from_matrix(a, path + "/A_MHz");
        p.a_xx_MHz = pv.xx;
        p.a_yy_MHz = pv.yy;
        p.a_zz_MHz = pv.zz;
    } else if (a.is_array() && a.size() == 3 && a.at(0).is_number() && a.at(1).is_number() &&
               a.at(2).is_number()) {
        p.a_xx_MHz = a.at(0).get<double>();
        p.a_yy_MHz = a.at(1).get<double>();
        p.a_zz_MHz = a.at(2).get<double>();
    } else {
        throw SchemaError(path + "/A_MHz: expected [Axx,Ayy,Azz] or a 3x3 matrix");
    }

    if (const auto it = obj.find("D_GHz"); it != obj.end()) {
        if (is_matrix_form(*it)) {
            // isotropic part shifts all levels uniformly and is dropped
            const PrincipalTriple pv = principal_from_matrix(*it, path + "/D_GHz", true);
            p.d_zz_GHz = pv.zz;
            p.zfs_epsilon = pv.zz != 0.0 ? (pv.xx - pv.yy) / pv.zz : 0.0;
        } else if (it->is_object()) {
            reject_unknown(*it, path + "/D_GHz", {"Dzz", "epsilon"});
            p.d_zz_GHz = number_at(*it, path + "/D_GHz", "Dzz");
            p.zfs_epsilon = number_or(*it, path + "/D_GHz", "epsilon", 0.0);
        } else {
            throw SchemaError(path + "/D_GHz: expected {\"Dzz\",\"epsilon\"} or a 3x3 matrix");
        }
    }

    const json& efg = require_field(obj, path, "EFG");
    if (is_matrix_form(efg)) {
        // trace (monopole) part does not couple to the quadrupole moment
        const PrincipalTriple pv = principal_from_matrix(efg, path + "/EFG", true);
        p.efg_vzz_V_per_A2 = pv.zz;
        p.efg_eta = pv.zz != 0.0 ? (pv.xx - pv.yy) / pv.zz : 0.0;
    } else if (efg.is_object()) {
        reject_unknown(efg, path + "/EFG", {"Vzz_V_per_A2", "eta"});
        p.efg_vzz_V_per_A2 = number_at(efg, path + "/EFG", "Vzz_V_per_A2");
        p.efg_eta = number_at(efg, path + "/EFG", "eta");
    } else {
        throw SchemaError(path + "/EFG: expected {\"Vzz_V_per_A2\",\"eta\"} or a 3x3 matrix");
    }

    try {
        p.validate();
    } catch (const Error& e) {
        throw ValidationError(path + ": " + e.what());
    }
    return p;
}

inline SpinChannel parse_spin_channel(const std::string& s, const std::string& path) {
    if (s == "up") return SpinChannel::Up;
    if (s == "down") return SpinChannel::Down;
    throw SchemaError(path + ": spin_channel must be \"up\" or \"down\"");
}

}  // namespace detail

inline Dataset dataset_from_json(const json& doc) {
    if (!doc.is_object()) throw SchemaError("/: expected a top-level object");
    detail::reject_unknown(doc, "/",
                           {"host", "chemical_potentials", "defects", "spin_systems",
                            "stark_series", "orbital_configs"});

    Dataset d;

    const json& host = detail::require_field(doc, "/", "host");
    detail::reject_unknown(host, "/host",
                           {"bulk_total_energy_eV", "n_bulk_atoms", "vbm_eV", "band_gap_eV",
                            "dielectric_constant", "cubic_cell_length_A"});
    d.host.bulk_total_energy_eV = detail::number_at(host, "/host", "bulk_total_energy_eV");
    d.host.n_bulk_atoms = detail::int_at(host, "/host", "n_bulk_atoms");
    d.host.vbm_eV = detail::number_at(host, "/host", "vbm_eV");
    d.host.band_gap_eV = detail::number_at(host, "/host", "band_gap_eV");
    d.host.dielectric_constant = detail::number_at(host, "/host", "dielectric_constant");
    d.host.cubic_cell_length_A = detail::number_at(host, "/host", "cubic_cell_length_A");
    d.host.validate();

    if (const auto it = doc.find("chemical_potentials"); it != doc.end()) {
        if (!it->is_object()) throw SchemaError("/chemical_potentials: expected an object");
        for (const auto& [species, entry] : it->items()) {
            const std::string path = "/chemical_potentials/" + species;
            detail::reject_unknown(entry, path, {"mu_eV", "E_atom_eV"});
            ChemicalPotentialEntry cp;
            cp.mu_eV = detail::number_at(entry, path, "mu_eV");
            cp.atom_energy_eV = detail::number_at(entry, path, "E_atom_eV");
            d.chemical_potentials.emplace(species, cp);
        }
    }

    if (const auto it = doc.find("defects"); it != doc.end()) {
        if (!it->is_array()) throw SchemaError("/defects: expected an array");
        std::set<std::pair<std::string, int>> seen;
        for (std::size_t k = 0; k < it->size(); ++k) {
            const json& obj = it->at(k);
            const std::string path = "/defects/" + std::to_string(k);
            detail::reject_unknown(obj, path,
                                   {"label", "charge", "total_energy_eV", "species_deltas",
                                    "correction_eV", "alignment_eV"});
            DefectEntry entry;
            entry.label = detail::string_at(obj, path, "label");
            if (entry.label.empty()) throw ValidationError(path + ": label must be nonempty");
            entry.charge = detail::int_at(obj, path, "charge");
            entry.total_energy_eV = detail::number_at(obj, path, "total_energy_eV");
            const json& deltas = detail::require_field(obj, path, "species_deltas");
            if (!deltas.is_array()) throw SchemaError(path + "/species_deltas: expected an array");
            for (std::size_t m = 0; m < deltas.size(); ++m) {
                const std::string dpath = path + "/species_deltas/" + std::to_string(m);
                detail::reject_unknown(deltas.at(m), dpath, {"species", "count"});
                SpeciesDelta delta;
                delta.species = detail::string_at(deltas.at(m), dpath, "species");
                delta.count = detail::int_at(deltas.at(m), dpath, "count");
                if (delta.species.empty())
                    throw ValidationError(dpath + ": species must be nonempty");
                if (delta.count == 0) throw ValidationError(dpath + ": count must be nonzero");
                entry.species_deltas.push_back(std::move(delta));
            }
            if (const auto c = obj.find("correction_eV"); c != obj.end()) {
                if (!c->is_number())
                    throw SchemaError(path + "/correction_eV: expected a number");
                entry.correction_eV = c->get<double>();
            }
            entry.alignment_eV = detail::number_or(obj, path, "alignment_eV", 0.0);
            if (!seen.emplace(entry.label, entry.charge).second)
                throw ValidationError("duplicate defect entry '" + entry.label + "' at charge " +
                                      std::to_string(entry.charge));
            d.defects.push_back(std::move(entry));
        }
    }

    for (const auto& entry : d.defects)
        for (const auto& delta : entry.species_deltas)
            if (!d.chemical_potentials.count(delta.species))
                throw UnknownSpecies("defect '" + entry.label + "' references species '" +
                                     delta.species + "' absent from chemical_potentials");

    if (const auto it = doc.find("spin_systems"); it != doc.end()) {
        if (!it->is_object()) throw SchemaError("/spin_systems: expected an object");
        for (const auto& [label, entry] : it->items())
            d.spin_systems.emplace(label,
                                   detail::parse_spin_system(entry, "/spin_systems/" + label));
    }

    if (const auto it = doc.find("stark_series"); it != doc.end()) {
        if (!it->is_object()) throw SchemaError("/stark_series: expected an object");
        for (const auto& [label, entry] : it->items()) {
            const std::string path = "/stark_series/" + label;
            detail::reject_unknown(entry, path, {"zpl_eV_at_zero_field", "points"});
            StarkSeriesData series;
            series.zpl_eV_at_zero_field = detail::number_at(entry, path, "zpl_eV_at_zero_field");
            const json& points = detail::require_field(entry, path, "points");
            if (!points.is_array()) throw SchemaError(path + "/points: expected an array");
            for (std::size_t m = 0; m < points.size(); ++m) {
                const std::string ppath = path + "/points/" + std::to_string(m);
                detail::reject_unknown(points.at(m), ppath, {"E_V_per_A", "zpl_eV"});
                StarkPoint point;
                point.field_V_per_A = detail::number_at(points.at(m), ppath, "E_V_per_A");
                point.zpl_eV = detail::number_at(points.at(m), ppath, "zpl_eV");
                series.points.push_back(point);
            }
            series.validate(label);
            d.stark_series.emplace(label, std::move(series));
        }
    }

    if (const auto it = doc.find("orbital_configs"); it != doc.end()) {
        if (!it->is_array()) throw SchemaError("/orbital_configs: expected an array");
        std::set<std::tuple<std::string, int, int>> seen;
        for (std::size_t k = 0; k < it->size(); ++k) {
            const json& obj = it->at(k);
            const std::string path = "/orbital_configs/" + std::to_string(k);
            detail::reject_unknown(obj, path, {"label", "charge", "spin_channel", "configs"});
            PromotionSet set;
            set.label = detail::string_at(obj, path, "label");
            set.charge = detail::int_at(obj, path, "charge");
            set.channel = detail::parse_spin_channel(
                detail::string_at(obj, path, "spin_channel"), path + "/spin_channel");
            const json& configs = detail::require_field(obj, path, "configs");
            if (!configs.is_array() || configs.empty())
                throw SchemaError(path + "/configs: expected a nonempty array");
            for (std::size_t m = 0; m < configs.size(); ++m) {
                const std::string cpath = path + "/configs/" + std::to_string(m);
                detail::reject_unknown(configs.at(m), cpath, {"name", "orbitals"});
                LabeledConfiguration lc;
                lc.label = detail::string_at(configs.at(m), cpath, "name");
                const json& orbitals = detail::require_field(configs.at(m), cpath, "orbitals");
                if (!orbitals.is_array())
                    throw SchemaError(cpath + "/orbitals: expected an array");
                for (std::size_t o = 0; o < orbitals.size(); ++o) {
                    const std::string opath = cpath + "/orbitals/" + std::to_string(o);
                    detail::reject_unknown(orbitals.at(o), opath, {"irrep", "occ"});
                    OrbitalOccupation occ;
                    try {
                        occ.irrep = parse_irrep(detail::string_at(orbitals.at(o), opath, "irrep"));
                    } catch (const Error& e) {
                        throw ValidationError(opath + ": " + e.what());
                    }
                    occ.occupancy = detail::int_at(orbitals.at(o), opath, "occ");
                    lc.config.orbitals.push_back(occ);
                }
                try {
                    lc.config.validate();
                } catch (const Error& e) {
                    throw ValidationError(cpath + ": " + e.what());
                }
                set.configs.push_back(std::move(lc));
            }
            if (!seen.emplace(set.label, set.charge, static_cast<int>(set.channel)).second)
                throw ValidationError("duplicate orbital_configs entry for '" + set.label +
                                      "' charge " + std::to_string(set.charge));
            d.orbital_configs.push_back(std::move(set));
        }
    }

    return d;
}

inline Dataset parse_dataset_text(const std::string& text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = detail::line_col(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " +
                         e.what());
    }
    return dataset_from_json(doc);
}

inline Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open input file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_dataset_text(text, path);
}

/// Canonical serialization: principal-value tensor forms, optional fields
/// emitted only when meaningful. load(dump(load(x))) == load(x).
inline json dataset_to_json(const Dataset& d) {
    json doc;
    doc["host"] = {{"bulk_total_energy_eV", d.host.bulk_total_energy_eV},
                   {"n_bulk_atoms", d.host.n_bulk_atoms},
                   {"vbm_eV", d.host.vbm_eV},
                   {"band_gap_eV", d.host.band_gap_eV},
                   {"dielectric_constant", d.host.dielectric_constant},
                   {"cubic_cell_length_A", d.host.cubic_cell_length_A}};
    doc["chemical_potentials"] = json::object();
    for (const auto& [species, cp] : d.chemical_potentials)
        doc["chemical_potentials"][species] = {{"mu_eV", cp.mu_eV},
                                               {"E_atom_eV", cp.atom_energy_eV}};
    doc["defects"] = json::array();
    for (const auto& entry : d.defects) {
        json obj = {{"label", entry.label},
                    {"charge", entry.charge},
                    {"total_energy_eV", entry.total_energy_eV}};
        obj["species_deltas"] = json::array();
        for (const auto& delta : entry.species_deltas)
            obj["species_deltas"].push_back({{"species", delta.species}, {"count", delta.count}});
        if (entry.correction_eV) obj["correction_eV"] = *entry.correction_eV;
        if (entry.alignment_eV != 0.0) obj["alignment_eV"] = entry.alignment_eV;
        doc["defects"].push_back(std::move(obj));
    }
    doc["spin_systems"] = json::object();
    for (const auto& [label, p] : d.spin_systems) {
        json obj = {{"S", p.electron_spin},
                    {"I", p.nuclear_spin},
                    {"g_e", p.g_e},
                    {"g_n", p.g_n},
                    {"A_MHz", {p.a_xx_MHz, p.a_yy_MHz, p.a_zz_MHz}},
                    {"EFG", {{"Vzz_V_per_A2", p.efg_vzz_V_per_A2}, {"eta", p.efg_eta}}},
                    {"Q_barn", p.quadrupole_Q_barn}};
        if (p.d_zz_GHz != 0.0 || p.zfs_epsilon != 0.0)
            obj["D_GHz"] = {{"Dzz", p.d_zz_GHz}, {"epsilon", p.zfs_epsilon}};
        doc["spin_systems"][label] = std::move(obj);
    }
    doc["stark_series"] = json::object();
    for (const auto& [label, series] : d.stark_series) {
        json obj = {{"zpl_eV_at_zero_field", series.zpl_eV_at_zero_field}};
        obj["points"] = json::array();
        for (const auto& point : series.points)
            obj["points"].push_back(
                {{"E_V_per_A", point.field_V_per_A}, {"zpl_eV", point.zpl_eV}});
        doc["stark_series"][label] = std::move(obj);
    }
    if (!d.orbital_configs.empty()) {
        doc["orbital_configs"] = json::array();
        for (const auto& set : d.orbital_configs) {
            json obj = {{"label", set.label},
                        {"charge", set.charge},
                        {"spin_channel", set.channel == SpinChannel::Up ? "up" : "down"}};
            obj["configs"] = json::array();
            for (const auto& lc : set.configs) {
                json cfg = {{"name", lc.label}};
                cfg["orbitals"] = json::array();
                for (const auto& occ : lc.config.orbitals)
                    cfg["orbitals"].push_back(
                        {{"irrep", irrep_name(occ.irrep)}, {"occ", occ.occupancy}});
                obj["configs"].push_back(std::move(cfg));
            }
            doc["orbital_configs"].push_back(std::move(obj));
        }
    }
    return doc;
}

struct DefectFamilySummary {
    std::string label;
    int min_charge = 0;
    int max_charge = 0;
    int n_entries = 0;
};

struct DatasetDigest {
    std::size_t n_defect_entries = 0;
    std::size_t n_spin_systems = 0;
    std::size_t n_stark_series = 0;
    std::vector<std::string> species;            // sorted
    std::vector<DefectFamilySummary> families;   // sorted by label
};

inline DatasetDigest dataset_digest(const Dataset& d) {
    DatasetDigest digest;
    digest.n_defect_entries = d.defects.size();
    digest.n_spin_systems = d.spin_systems.size();
    digest.n_stark_series = d.stark_series.size();

    std::set<std::string> species;
    for (const auto& [name, cp] : d.chemical_potentials) {
        (void)cp;
        species.insert(name);
    }
    for (const auto& entry : d.defects)
        for (const auto& delta : entry.species_deltas) species.insert(delta.species);
    digest.species.assign(species.begin(), species.end());

    std::map<std::string, DefectFamilySummary> families;
    for (const auto& entry : d.defects) {
        auto [it, fresh] = families.try_emplace(entry.label);
        auto& fam = it->second;
        if (fresh) {
            fam.label = entry.label;
            fam.min_charge = fam.max_charge = entry.charge;
        } else {
            fam.min_charge = std::min(fam.min_charge, entry.charge);
            fam.max_charge = std::max(fam.max_charge, entry.charge);
        }
        ++fam.n_entries;
    }
    for (const auto& [label, fam] : families) {
        (void)label;
        digest.families.push_back(fam);
    }
    return digest;
}

}
