#pragma once

// Command-line front end: subcommands {thermo, correction, levels,
// selection, stark, all} over a single JSON dataset. Data goes to CSV/SVG
// files in the output directory (with a run manifest) or, with --stdout, as
// CSV tables on standard output. Diagnostics go to standard error.
// Exit codes: 0 success, 1 validation/computation error, 2 usage error.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dspec/chargecorr.hpp"
#include "dspec/csv.hpp"
#include "dspec/data_model.hpp"
#include "dspec/dataset_json.hpp"
#include "dspec/errors.hpp"
#include "dspec/manifest.hpp"
#include "dspec/spin_hamiltonian.hpp"
#include "dspec/stark.hpp"
#include "dspec/svg.hpp"
#include "dspec/symmetry.hpp"
#include "dspec/thermo.hpp"
#include "dspec/version.hpp"

namespace dspec::cli {

/// Argument-level problems detected after CLI parsing (exit code 2).
struct UsageFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Emitter {
    bool to_stdout = false;
    std::string outdir;
    std::ostream* stream = &std::cout;

    void table(const std::string& name, const CsvTable& t) {
        if (to_stdout) {
            (*stream) << "# " << name << "\n" << t.to_string();
            return;
        }
        write_file(name, t.to_string());
    }

    // diagrams and manifests are file-only artifacts
    void aux(const std::string& name, const std::string& content) {
        if (to_stdout) return;
        write_file(name, content);
    }

private:
    void write_file(const std::string& name, const std::string& content) {
        std::filesystem::create_directories(outdir);
        const std::string path = outdir + "/" + name;
        std::ofstream out(path, std::ios::binary);
        out << content;
        if (!out) throw Error("cannot write output file '" + path + "'");
    }
};

namespace detail {

inline std::string sanitize_filename(const std::string& label) {
    std::string out;
    for (char c : label)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_')
                   ? c
                   : '_';
    return out;
}

inline std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open input file '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct SweepSpec {
    double start = 0.0;
    double stop = 0.0;
    int steps = 1;

    std::vector<double> values() const {
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(steps));
        if (steps == 1) {
            out.push_back(start);
            return out;
        }
        for (int k = 0; k < steps; ++k)
            out.push_back(start + (stop - start) * k / (steps - 1));
        return out;
    }
};

inline SweepSpec parse_sweep(const std::string& text) {
    SweepSpec spec;
    const auto first = text.find(':');
    const auto second = text.find(':', first == std::string::npos ? first : first + 1);
    if (first == std::string::npos || second == std::string::npos)
        throw UsageFailure("--sweep expects start:stop:steps, got '" + text + "'");
    try {
        std::size_t used = 0;
        spec.start = std::stod(text.substr(0, first), &used);
        if (used != first) throw std::invalid_argument("");
        const std::string mid = text.substr(first + 1, second - first - 1);
        spec.stop = std::stod(mid, &used);
        if (used != mid.size()) throw std::invalid_argument("");
        const std::string tail = text.substr(second + 1);
        spec.steps = std::stoi(tail, &used);
        if (used != tail.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw UsageFailure("--sweep expects start:stop:steps, got '" + text + "'");
    }
    if (spec.steps < 1) throw UsageFailure("--sweep needs at least 1 step");
    if (spec.steps > 1 && spec.stop <= spec.start)
        throw UsageFailure("--sweep needs stop > start");
    return spec;
}

inline Eigen::Vector3d axis_vector(const std::string& axis) {
    if (axis == "x") return {1.0, 0.0, 0.0};
    if (axis == "y") return {0.0, 1.0, 0.0};
    if (axis == "z") return {0.0, 0.0, 1.0};
    throw UsageFailure("--axis must be x, y or z, got '" + axis + "'");
}

inline std::vector<const DefectEntry*> sorted_defects(const Dataset& data) {
    std::vector<const DefectEntry*> out;
    out.reserve(data.defects.size());
    for (const auto& entry : data.defects) out.push_back(&entry);
    std::sort(out.begin(), out.end(), [](const DefectEntry* a, const DefectEntry* b) {
        if (a->label != b->label) return a->label < b->label;
        return a->charge < b->charge;
    });
    return out;
}

inline void run_thermo(const Dataset& data, Emitter& emit, WarningLog& warnings) {
    const auto defects = sorted_defects(data);

    CsvTable lines_table;
    lines_table.header = {"label", "q", "intercept_eV", "slope"};
    std::map<std::string, std::vector<FormationLine>> families;
    for (const DefectEntry* entry : defects) {
        const FormationLine line = formation_line(*entry, data.host, data.chemical_potentials,
                                                  &warnings);
        auto& row = lines_table.add_row();
        row = {line.label, std::to_string(line.charge), format_number(line.intercept_eV),
               format_number(line.slope)};
        families[line.label].push_back(line);
    }
    emit.table("formation_lines.csv", lines_table);

    CsvTable ctl_table;
    ctl_table.header = {"label", "q1", "q2", "level_eV"};
    std::map<std::string, std::vector<const DefectEntry*>> groups;
    for (const DefectEntry* entry : defects) groups[entry->label].push_back(entry);
    for (const auto& [label, group] : groups) {
        (void)label;
        std::vector<const DefectEntry*> by_charge = group;
        std::sort(by_charge.begin(), by_charge.end(),
                  [](const DefectEntry* a, const DefectEntry* b) { return a->charge > b->charge; });
        for (std::size_t k = 0; k + 1 < by_charge.size(); ++k) {
            const ChargeTransitionLevel ctl = charge_transition_level(
                *by_charge[k], *by_charge[k + 1], data.host, &warnings);
            auto& row = ctl_table.add_row();
            row = {ctl.label, std::to_string(ctl.q1), std::to_string(ctl.q2),
                   format_number(ctl.level_eV)};
        }
    }
    emit.table("transition_levels.csv", ctl_table);

    CsvTable stability_table;
    stability_table.header = {"label", "fermi_min_eV", "fermi_max_eV", "q"};
    for (const auto& [label, lines] : families) {
        const StabilityMap map = stability_map(lines, data.host.band_gap_eV);
        for (const auto& interval : map.intervals) {
            auto& row = stability_table.add_row();
            row = {label, format_number(interval.fermi_min_eV),
                   format_number(interval.fermi_max_eV), std::to_string(interval.charge)};
        }

        std::vector<std::pair<double, double>> markers;
        for (std::size_t k = 1; k < map.intervals.size(); ++k) {
            const auto& interval = map.intervals[k];
            for (const auto& line : lines)
                if (line.charge == interval.charge) {
                    markers.emplace_back(interval.fermi_min_eV, line.at(interval.fermi_min_eV));
                    break;
                }
        }
        emit.aux("formation_" + sanitize_filename(label) + ".svg",
                 formation_diagram_svg(label, lines, data.host.band_gap_eV, markers));
    }
    emit.table("stability.csv", stability_table);
}

inline void run_levels(const Dataset& data, const std::string& system,
                       const std::string& axis_name, const std::vector<double>& fields,
                       bool effective, ZfsConvention convention, Emitter& emit,
                       WarningLog& warnings) {
    const auto it = data.spin_systems.find(system);
    if (it == data.spin_systems.end())
        throw ValidationError("unknown spin system '" + system + "'");
    SpinSystemParams params = it->second;
    params.zfs_convention = convention;

    const ZeemanSweep sweep = effective
                                  ? effective_zeeman_sweep(params, fields, &warnings)
                                  : zeeman_sweep(params, axis_vector(axis_name), fields, &warnings);

    CsvTable table;
    table.header = {"B_T", "index", "E_MHz", "m_S", "m_I"};
    for (std::size_t k = 0; k < sweep.field_T.size(); ++k) {
        const LevelDiagram& d = sweep.diagrams[k];
        for (Eigen::Index i = 0; i < d.eigenvalues_MHz.size(); ++i) {
            auto& row = table.add_row();
            row = {format_number(sweep.field_T[k]), std::to_string(i),
                   format_number(d.eigenvalues_MHz(i)),
                   format_number(d.labels[static_cast<std::size_t>(i)].ms()),
                   format_number(d.labels[static_cast<std::size_t>(i)].mi())};
        }
    }
    const std::string stem = "levels_" + sanitize_filename(system);
    emit.table(stem + ".csv", table);
    emit.aux(stem + ".svg", levels_diagram_svg(system, sweep));
}

inline void run_selection(const Dataset& data, Emitter& emit) {
    CsvTable table;
    table.header = {"label",        "charge",        "channel",   "ground",
                    "excited",      "ground_state",  "excited_state", "promotion",
                    "polarizations"};
    for (const auto& set : data.orbital_configs) {
        std::vector<LabeledConfiguration> configs = set.configs;
        if (configs.size() == 1) {
            // single (ground) configuration: enumerate every one-electron
            // promotion within the channel
            const auto promoted = enumerate_promotions(configs.front().config, set.channel);
            configs.insert(configs.end(), promoted.begin(), promoted.end());
        }
        const auto verdicts = classify_transitions(configs, set.channel);
        const auto& orbitals = configs.front().config.orbitals;
        for (const auto& v : verdicts) {
            std::string promotion =
                lowercase(irrep_name(orbitals[static_cast<std::size_t>(v.from_orbital)].irrep)) +
                "[" + std::to_string(v.from_orbital) + "]->" +
                lowercase(irrep_name(orbitals[static_cast<std::size_t>(v.to_orbital)].irrep)) +
                "[" + std::to_string(v.to_orbital) + "]";
            std::string polarizations;
            for (Axis p : v.polarizations) {
                if (!polarizations.empty()) polarizations += ';';
                polarizations += axis_name(p);
            }
            auto& row = table.add_row();
            row = {set.label,
                   std::to_string(set.charge),
                   set.channel == SpinChannel::Up ? "up" : "down",
                   v.ground_label,
                   v.excited_label,
                   std::to_string(v.ground_multiplicity) + irrep_name(v.ground_irrep),
                   std::to_string(v.excited_multiplicity) + irrep_name(v.excited_irrep),
                   promotion,
                   polarizations};
        }
    }
    emit.table("transition_verdicts.csv", table);
}

inline void run_stark(const Dataset& data, const std::string& system, double epsilon_s,
                      double z_scale_A, double shielding, Emitter& emit) {
    std::vector<std::pair<std::string, const StarkSeriesData*>> targets;
    if (system.empty()) {
        for (const auto& [label, series] : data.stark_series) targets.emplace_back(label, &series);
    } else {
        const auto it = data.stark_series.find(system);
        if (it == data.stark_series.end())
            throw ValidationError("unknown stark series '" + system + "'");
        targets.emplace_back(it->first, &it->second);
    }

    CsvTable table;
    table.header = {"label",
                    "delta_mu_eA",
                    "delta_mu_debye",
                    "sigma_delta_mu_eA",
                    "delta_alpha_A2e_per_V",
                    "delta_alpha_a0_cubed",
                    "sigma_delta_alpha_A2e_per_V",
                    "residual_rms_eV",
                    "E_eff_GV_per_cm"};
    for (const auto& [label, series] : targets) {
        const StarkFit fit = fit_stark(*series, epsilon_s, label);
        auto& row = table.add_row();
        row = {label,
               format_number(fit.delta_mu_e_angstrom),
               format_number(constants::e_angstrom_to_debye(fit.delta_mu_e_angstrom)),
               format_number(std::sqrt(std::max(0.0, fit.covariance(0, 0)))),
               format_number(fit.delta_alpha_A2e_per_V),
               format_number(constants::polarizability_to_bohr_cubed(fit.delta_alpha_A2e_per_V)),
               format_number(std::sqrt(std::max(0.0, fit.covariance(1, 1)))),
               format_number(fit.residual_rms_eV),
               format_number(effective_field_GV_per_cm(fit.delta_mu_e_angstrom, z_scale_A,
                                                       shielding))};
    }
    emit.table("stark_fits.csv", table);
}

inline CsvTable correction_table(int charge, double cell_A, double epsilon_s) {
    CsvTable table;
    table.header = {"E_corr_eV", "nu"};
    auto& row = table.add_row();
    row = {format_number(madelung_correction(charge, cell_A, epsilon_s)),
           format_number(madelung_nu())};
    return table;
}

}  // namespace detail

inline int run(std::vector<std::string> args) {
    CLI::App app{"point-defect analysis: thermodynamics, charged-cell corrections, "
                 "spin levels, selection rules, Stark fits"};
    app.set_version_flag("--version", toolkit_version);
    app.require_subcommand(0, 1);

    std::string input, outdir = "out";
    bool to_stdout = false, quiet = false;
    app.add_option("-i,--input", input, "input dataset JSON");
    auto* outdir_opt = app.add_option("-o,--outdir", outdir, "output directory")
                           ->capture_default_str();
    app.add_flag("--stdout", to_stdout, "print tables to standard output instead of files");
    app.add_flag("--quiet", quiet, "suppress warnings");

    auto* thermo = app.add_subcommand(
        "thermo", "formation lines, transition levels, stability maps, diagrams");
    thermo->fallthrough();

    auto* correction = app.add_subcommand(
        "correction", "screened Madelung finite-size correction for a charged cubic cell");
    correction->fallthrough();
    int corr_charge = 0;
    double corr_cell = 0.0, corr_epsilon = 1.0;
    correction->add_option("--charge", corr_charge, "defect charge q")->required();
    correction->add_option("--cell-length", corr_cell, "cubic cell edge in Angstrom")->required();
    correction->add_option("--epsilon", corr_epsilon, "static dielectric constant")->required();

    auto* levels = app.add_subcommand("levels", "spin Hamiltonian level diagrams");
    levels->fallthrough();
    std::string levels_system, levels_axis = "z", levels_sweep, levels_convention = "paper";
    double levels_field = 0.0;
    bool levels_effective = false;
    levels->add_option("--system", levels_system, "spin system label")->required();
    levels->add_option("--B", levels_field, "magnetic field in Tesla")->capture_default_str();
    levels->add_option("--axis", levels_axis, "field axis: x, y or z")->capture_default_str();
    levels->add_option("--sweep", levels_sweep, "field sweep start:stop:steps (Tesla)");
    levels->add_flag("--effective", levels_effective,
                     "use the diagonal high-field reduction (B along z)");
    levels->add_option("--zfs-convention", levels_convention,
                       "rhombic zero-field term: paper or conventional")
        ->capture_default_str();

    auto* selection = app.add_subcommand("selection", "electric-dipole transition verdicts");
    selection->fallthrough();

    auto* stark = app.add_subcommand("stark", "Stark-shift fits and effective internal field");
    stark->fallthrough();
    std::string stark_system;
    double stark_epsilon = -1.0, stark_z = 1.0, stark_shielding = 1.0;
    stark->add_option("--system", stark_system, "series label (default: all)");
    stark->add_option("--epsilon-s", stark_epsilon,
                      "static dielectric constant (default: host value)");
    stark->add_option("--z-scale", stark_z, "dipole distance scale in Angstrom")
        ->capture_default_str();
    stark->add_option("--shielding", stark_shielding, "effective-field shielding divisor")
        ->capture_default_str();

    auto* all = app.add_subcommand("all", "run every analysis the dataset supports");
    all->fallthrough();
    std::string all_sweep = "0:0.3:31";
    all->add_option("--sweep", all_sweep, "field sweep for level diagrams")
        ->capture_default_str();

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    WarningLog warnings;
    int exit_code = 0;
    try {
        Emitter emit;
        emit.to_stdout = to_stdout;
        emit.outdir = outdir;

        RunManifest manifest;
        manifest.parameters["outdir"] = to_stdout ? "" : outdir;

        const auto need_dataset = [&]() -> Dataset {
            if (input.empty())
                throw UsageFailure("this subcommand needs an input dataset (-i/--input)");
            const std::string text = detail::read_file(input);
            manifest.input_path = input;
            manifest.input_hash = fnv1a64_hex(text);
            return parse_dataset_text(text, input);
        };
        const auto finish = [&](const std::string& name) {
            manifest.subcommand = name;
            if (!to_stdout) emit.aux("run_manifest.json", manifest.to_json_string());
        };

        if (app.got_subcommand(thermo)) {
            const Dataset data = need_dataset();
            detail::run_thermo(data, emit, warnings);
            finish("thermo");
        } else if (app.got_subcommand(correction)) {
            manifest.parameters["charge"] = std::to_string(corr_charge);
            manifest.parameters["cell_length_A"] = format_number(corr_cell);
            manifest.parameters["epsilon_s"] = format_number(corr_epsilon);
            const CsvTable table = detail::correction_table(corr_charge, corr_cell, corr_epsilon);
            std::cout << table.to_string();
            if (outdir_opt->count() > 0 && !to_stdout) {
                emit.table("correction.csv", table);
                finish("correction");
            }
        } else if (app.got_subcommand(levels)) {
            if (levels_effective && levels_axis != "z")
                throw UsageFailure("--effective assumes the field along z");
            ZfsConvention convention = ZfsConvention::Paper;
            if (levels_convention == "conventional")
                convention = ZfsConvention::Conventional;
            else if (levels_convention != "paper")
                throw UsageFailure("--zfs-convention must be paper or conventional");

            std::vector<double> fields;
            if (!levels_sweep.empty()) {
                const detail::SweepSpec spec = detail::parse_sweep(levels_sweep);
                fields = spec.values();
                manifest.parameters["sweep"] = levels_sweep;
            } else {
                fields = {levels_field};
                manifest.parameters["B_T"] = format_number(levels_field);
            }
            manifest.parameters["system"] = levels_system;
            manifest.parameters["axis"] = levels_axis;
            manifest.parameters["effective"] = levels_effective ? "true" : "false";
            manifest.parameters["zfs_convention"] = levels_convention;

            const Dataset data = need_dataset();
            detail::run_levels(data, levels_system, levels_axis, fields, levels_effective,
                               convention, emit, warnings);
            finish("levels");
        } else if (app.got_subcommand(selection)) {
            const Dataset data = need_dataset();
            detail::run_selection(data, emit);
            finish("selection");
        } else if (app.got_subcommand(stark)) {
            const Dataset data = need_dataset();
            const double epsilon_s =
                stark_epsilon > 0.0 ? stark_epsilon : data.host.dielectric_constant;
            manifest.parameters["system"] = stark_system.empty() ? "(all)" : stark_system;
            manifest.parameters["epsilon_s"] = format_number(epsilon_s);
            manifest.parameters["z_scale_A"] = format_number(stark_z);
            manifest.parameters["shielding"] = format_number(stark_shielding);
            detail::run_stark(data, stark_system, epsilon_s, stark_z, stark_shielding, emit);
            finish("stark");
        } else if (app.got_subcommand(all)) {
            const Dataset data = need_dataset();
            const detail::SweepSpec spec = detail::parse_sweep(all_sweep);
            manifest.parameters["sweep"] = all_sweep;
            manifest.parameters["epsilon_s"] = format_number(data.host.dielectric_constant);
            manifest.parameters["z_scale_A"] = format_number(1.0);
            manifest.parameters["shielding"] = format_number(1.0);

            detail::run_thermo(data, emit, warnings);
            for (const auto& [label, params] : data.spin_systems) {
                (void)params;
                detail::run_levels(data, label, "z", spec.values(), false, ZfsConvention::Paper,
                                   emit, warnings);
            }
            detail::run_selection(data, emit);
            detail::run_stark(data, "", data.host.dielectric_constant, 1.0, 1.0, emit);
            finish("all");
        } else {
            std::cerr << app.help();
            return 2;
        }
    } catch (const UsageFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        exit_code = 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        exit_code = 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        exit_code = 1;
    }

    if (!quiet)
        for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    return exit_code;
}

inline int run(int argc, char** argv) {
    std::vector<std::string> args;
    args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
    for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
    return run(std::move(args));
}

}
