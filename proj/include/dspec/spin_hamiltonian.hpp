#pragma once

// Ground-state spin Hamiltonian of a defect with electron spin S and nuclear
// spin I:
//
//   H = mu_B g_e B.S + mu_N g_n B.I + S.D.S + S.A.I + I.Q.I
//
// assembled in the principal-axis frame from five terms: electron and
// nuclear Zeeman, zero-field splitting D[Sz^2 - S(S+1)/3 + (eps/3)(S+^2+S-^2)],
// hyperfine Azz Sz Iz + Axx Sx Ix + Ayy Sy Iy, and nuclear quadrupole
// (eQVzz/4I(2I-1))[3Iz^2 - I(I+1) + eta(Ix^2 - Iy^2)]. Matrices are kept in
// MHz on the (2S+1)(2I+1) product space, electron factor first, both factors
// in descending-m order.
//
// Also provides the high-field diagonal reduction
//   H_eff = mu_B g_e Bz Sz + mu_N g_n Bz Iz + D Sz^2 + Q_eff Iz^2 + Azz Sz Iz,
// exact diagonalization with product-basis labeling, magnetic-field sweeps
// with adiabatic level connection, and optical transition tables.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dspec/constants.hpp"
#include "dspec/errors.hpp"
#include "dspec/parallel.hpp"
#include "dspec/spin_operators.hpp"

namespace dspec {

/// Rhombic ZFS convention. Paper uses (eps/3)(S+^2 + S-^2); Conventional
/// uses E(Sx^2 - Sy^2) with E = eps*D/3. The two differ by a factor of 2.
enum class ZfsConvention { Paper, Conventional };

struct SpinSystemParams {
    double electron_spin = 0.0;  // S
    double nuclear_spin = 0.0;   // I
    double g_e = 2.0023;
    double g_n = 0.0;            // no physical default; must be supplied
    double a_xx_MHz = 0.0;
    double a_yy_MHz = 0.0;
    double a_zz_MHz = 0.0;
    double d_zz_GHz = 0.0;       // ZFS principal value; D = (3/2) Dzz
    double zfs_epsilon = 0.0;    // (Dxx - Dyy)/Dzz
    double efg_vzz_V_per_A2 = 0.0;
    double efg_eta = 0.0;        // (Vxx - Vyy)/Vzz
    double quadrupole_Q_barn = 0.0;
    ZfsConvention zfs_convention = ZfsConvention::Paper;

    void validate() const {
        twice_spin(electron_spin);
        twice_spin(nuclear_spin);
        if (std::abs(efg_eta) > 1.0 + 1e-12)
            throw ValidationError("EFG asymmetry eta must satisfy |eta| <= 1");
    }

    /// Full traceless principal-axis D tensor in GHz, reconstructed from
    /// (Dzz, eps): Dxx - Dyy = eps*Dzz and Dxx + Dyy = -Dzz.
    Eigen::Matrix3d d_tensor_GHz() const {
        Eigen::Matrix3d d = Eigen::Matrix3d::Zero();
        d(0, 0) = 0.5 * d_zz_GHz * (zfs_epsilon - 1.0);
        d(1, 1) = -0.5 * d_zz_GHz * (zfs_epsilon + 1.0);
        d(2, 2) = d_zz_GHz;
        return d;
    }

    int dimension() const {
        return (twice_spin(electron_spin) + 1) * (twice_spin(nuclear_spin) + 1);
    }
};

inline double zfs_D_from_dzz_GHz(double d_zz_GHz) { return 1.5 * d_zz_GHz; }

/// D[Sz^2 - S(S+1)/3 + (eps/3)(S+^2 + S-^2)] on the (2S+1) space, in MHz.
/// Identically zero for S <= 1/2 (the bracket is traceless and S+^2 vanishes).
inline MatrixXcd zfs_term(double D_GHz, double epsilon, const SpinOperatorSet& ops,
                          ZfsConvention convention = ZfsConvention::Paper) {
    const double d_MHz = D_GHz * constants::GHz_in_MHz;
    const MatrixXcd id = MatrixXcd::Identity(ops.dim, ops.dim);
    MatrixXcd axial = ops.sz * ops.sz - (ops.s * (ops.s + 1.0) / 3.0) * id;
    MatrixXcd rhombic = ops.splus * ops.splus + ops.sminus * ops.sminus;
    if (convention == ZfsConvention::Conventional) rhombic *= 0.5;  // E(Sx^2 - Sy^2)
    return d_MHz * (axial + (epsilon / 3.0) * rhombic);
}

/// (e Q_I Vzz / 4I(2I-1)) [3Iz^2 - I(I+1) + eta(Ix^2 - Iy^2)] in MHz.
/// The prefactor is singular for I <= 1/2, where the interaction does not
/// exist; a zero matrix is returned and a warning recorded.
inline MatrixXcd quadrupole_term(double vzz_V_per_A2, double eta, double q_barn,
                                 const SpinOperatorSet& ops, WarningLog* warnings = nullptr) {
    const double spin_i = ops.s;
    if (twice_spin(spin_i) <= 1) {
        if (q_barn != 0.0 || vzz_V_per_A2 != 0.0)
            warn(warnings, "quadrupole term requested for I <= 1/2; returning zero");
        return MatrixXcd::Zero(ops.dim, ops.dim);
    }
    const double prefactor_MHz = constants::e_barn_V_per_A2_in_MHz * q_barn * vzz_V_per_A2 /
                                 (4.0 * spin_i * (2.0 * spin_i - 1.0));
    const MatrixXcd id = MatrixXcd::Identity(ops.dim, ops.dim);
    const MatrixXcd bracket = 3.0 * ops.sz * ops.sz - (spin_i * (spin_i + 1.0)) * id +
                              eta * (ops.sx * ops.sx - ops.sy * ops.sy);
    return prefactor_MHz * bracket;
}

/// Azz Sz Iz + Axx Sx Ix + Ayy Sy Iy on the product space, in MHz.
inline MatrixXcd hyperfine_term(double a_xx_MHz, double a_yy_MHz, double a_zz_MHz,
                                const SpinOperatorSet& ops_s, const SpinOperatorSet& ops_i) {
    return a_zz_MHz * kron(ops_s.sz, ops_i.sz) + a_xx_MHz * kron(ops_s.sx, ops_i.sx) +
           a_yy_MHz * kron(ops_s.sy, ops_i.sy);
}

struct SpinHamiltonian {
    double electron_spin = 0.0;
    double nuclear_spin = 0.0;
    int dim = 1;
    MatrixXcd electron_zeeman, nuclear_zeeman, zfs, hyperfine, quadrupole;
    MatrixXcd total;  // sum of the five terms in the order above
};

inline SpinHamiltonian build_hamiltonian(const SpinSystemParams& params,
                                         const Eigen::Vector3d& field_T,
                                         WarningLog* warnings = nullptr) {
    params.validate();
    const SpinOperatorSet ops_s = spin_operators(params.electron_spin);
    const SpinOperatorSet ops_i = spin_operators(params.nuclear_spin);
    const MatrixXcd id_s = MatrixXcd::Identity(ops_s.dim, ops_s.dim);
    const MatrixXcd id_i = MatrixXcd::Identity(ops_i.dim, ops_i.dim);

    SpinHamiltonian h;
    h.electron_spin = ops_s.s;
    h.nuclear_spin = ops_i.s;
    h.dim = ops_s.dim * ops_i.dim;

    const MatrixXcd b_dot_s = field_T.x() * ops_s.sx + field_T.y() * ops_s.sy + field_T.z() * ops_s.sz;
    const MatrixXcd b_dot_i = field_T.x() * ops_i.sx + field_T.y() * ops_i.sy + field_T.z() * ops_i.sz;
    h.electron_zeeman = constants::bohr_magneton_MHz_per_T * params.g_e * kron(b_dot_s, id_i);
    h.nuclear_zeeman = constants::nuclear_magneton_MHz_per_T * params.g_n * kron(id_s, b_dot_i);
    h.zfs = kron(zfs_term(zfs_D_from_dzz_GHz(params.d_zz_GHz), params.zfs_epsilon, ops_s,
                          params.zfs_convention),
                 id_i);
    h.hyperfine = hyperfine_term(params.a_xx_MHz, params.a_yy_MHz, params.a_zz_MHz, ops_s, ops_i);
    h.quadrupole = kron(id_s, quadrupole_term(params.efg_vzz_V_per_A2, params.efg_eta,
                                              params.quadrupole_Q_barn, ops_i, warnings));

    h.total = h.electron_zeeman + h.nuclear_zeeman + h.zfs + h.hyperfine + h.quadrupole;
    return h;
}

/// High-field diagonal reduction: mu_B g_e Bz Sz + mu_N g_n Bz Iz + D Sz^2
/// + Q_eff Iz^2 + Azz Sz Iz with Q_eff = 3 e Q_I Vzz / (4I(2I-1)), i.e. the
/// Iz^2 coefficient of the quadrupole term. Constant (trace) offsets of the
/// full ZFS and quadrupole brackets are dropped with the off-diagonal parts.
inline SpinHamiltonian effective_hamiltonian(const SpinSystemParams& params, double field_z_T,
                                             WarningLog* warnings = nullptr) {
    params.validate();
    const SpinOperatorSet ops_s = spin_operators(params.electron_spin);
    const SpinOperatorSet ops_i = spin_operators(params.nuclear_spin);
    const MatrixXcd id_s = MatrixXcd::Identity(ops_s.dim, ops_s.dim);
    const MatrixXcd id_i = MatrixXcd::Identity(ops_i.dim, ops_i.dim);
    const MatrixXcd sz = kron(ops_s.sz, id_i);
    const MatrixXcd iz = kron(id_s, ops_i.sz);

    double q_eff_MHz = 0.0;
    const double spin_i = ops_i.s;
    if (twice_spin(spin_i) > 1) {
        q_eff_MHz = 3.0 * constants::e_barn_V_per_A2_in_MHz * params.quadrupole_Q_barn *
                    params.efg_vzz_V_per_A2 / (4.0 * spin_i * (2.0 * spin_i - 1.0));
    } else if (params.quadrupole_Q_barn != 0.0 || params.efg_vzz_V_per_A2 != 0.0) {
        warn(warnings, "effective quadrupole coefficient dropped for I <= 1/2");
    }

    SpinHamiltonian h;
    h.electron_spin = ops_s.s;
    h.nuclear_spin = ops_i.s;
    h.dim = ops_s.dim * ops_i.dim;
    h.electron_zeeman = constants::bohr_magneton_MHz_per_T * params.g_e * field_z_T * sz;
    h.nuclear_zeeman = constants::nuclear_magneton_MHz_per_T * params.g_n * field_z_T * iz;
    h.zfs = zfs_D_from_dzz_GHz(params.d_zz_GHz) * constants::GHz_in_MHz * (sz * sz);
    h.hyperfine = params.a_zz_MHz * (sz * iz);
    h.quadrupole = q_eff_MHz * (iz * iz);
    h.total = h.electron_zeeman + h.nuclear_zeeman + h.zfs + h.hyperfine + h.quadrupole;
    return h;
}

/// Product-basis label (m_S, m_I), stored as exact twice-values.
struct SpinLabel {
    int ms_twice = 0;
    int mi_twice = 0;

    double ms() const { return ms_twice / 2.0; }
    double mi() const { return mi_twice / 2.0; }

    friend bool operator==(const SpinLabel&, const SpinLabel&) = default;
};

struct LevelDiagram {
    Eigen::Vector3d field_T = Eigen::Vector3d::Zero();
    Eigen::VectorXd eigenvalues_MHz;  // ascending
    MatrixXcd eigenvectors;           // column k belongs to eigenvalue k
    std::vector<SpinLabel> labels;    // dominant (m_S, m_I) per column
};

namespace detail {

inline SpinLabel basis_label(int index, int dim_i, int twice_s, int twice_i) {
    const int k_s = index / dim_i;  // electron factor first, descending m
    const int k_i = index % dim_i;
    return SpinLabel{twice_s - 2 * k_s, twice_i - 2 * k_i};
}

// Greedy unique assignment of basis states to eigenvectors by descending
// overlap; ties broken by (basis, vector) index for determinism.
inline std::vector<int> assign_labels(const MatrixXcd& vectors) {
    const int n = static_cast<int>(vectors.cols());
    struct Entry { double weight; int basis; int vec; };
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(n) * n);
    for (int b = 0; b < n; ++b)
        for (int v = 0; v < n; ++v)
            entries.push_back({std::norm(vectors(b, v)), b, v});
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        if (a.basis != b.basis) return a.basis < b.basis;
        return a.vec < b.vec;
    });
    std::vector<int> basis_of_vec(n, -1);
    std::vector<bool> basis_used(n, false);
    int assigned = 0;
    for (const auto& e : entries) {
        if (assigned == n) break;
        if (basis_of_vec[e.vec] >= 0 || basis_used[e.basis]) continue;
        basis_of_vec[e.vec] = e.basis;
        basis_used[e.basis] = true;
        ++assigned;
    }
    return basis_of_vec;
}

// Phase gauge: rotate each column so its largest-magnitude component is
// real and positive.
inline void fix_phases(MatrixXcd& vectors) {
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
        Eigen::Index imax = 0;
        vectors.col(c).cwiseAbs().maxCoeff(&imax);
        const Complex z = vectors(imax, c);
        const double mag = std::abs(z);
        if (mag > 0.0) vectors.col(c) *= std::conj(z) / mag;
    }
}

inline bool label_less_descending(const SpinLabel& a, const SpinLabel& b) {
    if (a.ms_twice != b.ms_twice) return a.ms_twice > b.ms_twice;
    return a.mi_twice > b.mi_twice;
}

}  // namespace detail

/// Exact diagonalization. Eigenvalues ascending; within numerically
/// degenerate clusters columns are reordered by descending (m_S, m_I) label
/// so golden files are reproducible.
inline LevelDiagram diagonalize(const SpinHamiltonian& h,
                                const Eigen::Vector3d& field_T = Eigen::Vector3d::Zero()) {
    const double scale = std::max(1.0, h.total.cwiseAbs().maxCoeff());
    if ((h.total - h.total.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw NonHermitian("spin Hamiltonian is not Hermitian");

    Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(h.total);
    if (solver.info() != Eigen::Success)
        throw ConvergenceFailure("eigensolver failed to converge");

    LevelDiagram d;
    d.field_T = field_T;
    d.eigenvalues_MHz = solver.eigenvalues();
    d.eigenvectors = solver.eigenvectors();

    const int twice_s = twice_spin(h.electron_spin);
    const int twice_i = twice_spin(h.nuclear_spin);
    const int dim_i = twice_i + 1;

    const std::vector<int> basis_of_vec = detail::assign_labels(d.eigenvectors);
    d.labels.resize(h.dim);
    for (int v = 0; v < h.dim; ++v)
        d.labels[v] = detail::basis_label(basis_of_vec[v], dim_i, twice_s, twice_i);

    // deterministic ordering inside degenerate clusters
    const double cluster_tol = 1e-7 * std::max(1.0, d.eigenvalues_MHz.cwiseAbs().maxCoeff());
    int start = 0;
    while (start < h.dim) {
        int stop = start + 1;
        while (stop < h.dim &&
               d.eigenvalues_MHz(stop) - d.eigenvalues_MHz(stop - 1) <= cluster_tol)
            ++stop;
        if (stop - start > 1) {
            std::vector<int> order(stop - start);
            std::iota(order.begin(), order.end(), start);
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                return detail::label_less_descending(d.labels[a], d.labels[b]);
            });
            MatrixXcd cols(h.dim, stop - start);
            Eigen::VectorXd vals(stop - start);
            std::vector<SpinLabel> labs(stop - start);
            for (int k = 0; k < stop - start; ++k) {
                cols.col(k) = d.eigenvectors.col(order[k]);
                vals(k) = d.eigenvalues_MHz(order[k]);
                labs[k] = d.labels[order[k]];
            }
            d.eigenvectors.block(0, start, h.dim, stop - start) = cols;
            d.eigenvalues_MHz.segment(start, stop - start) = vals;
            for (int k = 0; k < stop - start; ++k) d.labels[start + k] = labs[k];
        }
        start = stop;
    }

    detail::fix_phases(d.eigenvectors);
    return d;
}

struct ZeemanSweep {
    std::vector<double> field_T;
    std::vector<LevelDiagram> diagrams;
    // tracks[t][k] = eigenvalue index at field point k connected to track t;
    // tracks follow eigenvector overlap between adjacent field points.
    std::vector<std::vector<int>> tracks;
};

/// Adiabatic connection of levels across consecutive diagrams by greedy
/// unique matching on |<prev_i|next_j>|^2, deterministic tie-breaks.
inline std::vector<std::vector<int>> connect_tracks(const std::vector<LevelDiagram>& diagrams) {
    if (diagrams.empty()) throw EmptyInput("connect_tracks: no diagrams");
    const int n = static_cast<int>(diagrams.front().eigenvalues_MHz.size());
    std::vector<std::vector<int>> tracks(static_cast<std::size_t>(n),
                                         std::vector<int>(diagrams.size(), 0));
    std::vector<int> current(static_cast<std::size_t>(n));
    std::iota(current.begin(), current.end(), 0);
    for (int t = 0; t < n; ++t) tracks[static_cast<std::size_t>(t)][0] = t;

    for (std::size_t k = 1; k < diagrams.size(); ++k) {
        const MatrixXcd& prev = diagrams[k - 1].eigenvectors;
        const MatrixXcd& next = diagrams[k].eigenvectors;
        struct Entry { double weight; int i; int j; };
        std::vector<Entry> entries;
        entries.reserve(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                entries.push_back({std::norm(prev.col(i).dot(next.col(j))), i, j});
        std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
            if (a.weight != b.weight) return a.weight > b.weight;
            if (a.i != b.i) return a.i < b.i;
            return a.j < b.j;
        });
        std::vector<int> match(static_cast<std::size_t>(n), -1);
        std::vector<bool> taken(static_cast<std::size_t>(n), false);
        int assigned = 0;
        for (const auto& e : entries) {
            if (assigned == n) break;
            if (match[static_cast<std::size_t>(e.i)] >= 0 || taken[static_cast<std::size_t>(e.j)])
                continue;
            match[static_cast<std::size_t>(e.i)] = e.j;
            taken[static_cast<std::size_t>(e.j)] = true;
            ++assigned;
        }
        for (int t = 0; t < n; ++t) {
            const int moved = match[static_cast<std::size_t>(current[static_cast<std::size_t>(t)])];
            tracks[static_cast<std::size_t>(t)][k] = moved;
            current[static_cast<std::size_t>(t)] = moved;
        }
    }
    return tracks;
}

inline ZeemanSweep zeeman_sweep(const SpinSystemParams& params, const Eigen::Vector3d& axis,
                                const std::vector<double>& field_values_T,
                                WarningLog* warnings = nullptr) {
    if (field_values_T.empty()) throw EmptyInput("zeeman_sweep needs at least one field value");
    if (!std::is_sorted(field_values_T.begin(), field_values_T.end()))
        throw ValidationError("zeeman_sweep field values must be sorted ascending");
    const double norm = axis.norm();
    if (norm <= 0.0) throw ValidationError("zeeman_sweep axis must be nonzero");
    const Eigen::Vector3d unit = axis / norm;

    ZeemanSweep sweep;
    sweep.field_T = field_values_T;
    sweep.diagrams.resize(field_values_T.size());
    WarningLog local;
    parallel_for(field_values_T.size(), [&](std::size_t k) {
        const Eigen::Vector3d b = field_values_T[k] * unit;
        sweep.diagrams[k] = diagonalize(build_hamiltonian(params, b, k == 0 ? &local : nullptr), b);
    });
    if (warnings) warnings->insert(warnings->end(), local.begin(), local.end());
    sweep.tracks = connect_tracks(sweep.diagrams);
    return sweep;
}

/// Same sweep protocol for the diagonal high-field reduction, B along z.
inline ZeemanSweep effective_zeeman_sweep(const SpinSystemParams& params,
                                          const std::vector<double>& field_values_T,
                                          WarningLog* warnings = nullptr) {
    if (field_values_T.empty()) throw EmptyInput("zeeman_sweep needs at least one field value");
    if (!std::is_sorted(field_values_T.begin(), field_values_T.end()))
        throw ValidationError("zeeman_sweep field values must be sorted ascending");

    ZeemanSweep sweep;
    sweep.field_T = field_values_T;
    sweep.diagrams.resize(field_values_T.size());
    WarningLog local;
    parallel_for(field_values_T.size(), [&](std::size_t k) {
        const Eigen::Vector3d b(0.0, 0.0, field_values_T[k]);
        sweep.diagrams[k] =
            diagonalize(effective_hamiltonian(params, field_values_T[k], k == 0 ? &local : nullptr), b);
    });
    if (warnings) warnings->insert(warnings->end(), local.begin(), local.end());
    sweep.tracks = connect_tracks(sweep.diagrams);
    return sweep;
}

struct OpticalLine {
    double energy_eV = 0.0;
    double wavelength_nm = 0.0;
    SpinLabel lower, upper;
};

/// Optical line positions zpl + (E_upper - E_lower) for every sublevel pair,
/// with the spin offsets converted MHz -> eV. Ordered by (lower, upper) index.
inline std::vector<OpticalLine> transition_table(const LevelDiagram& ground,
                                                 const LevelDiagram& excited, double zpl_eV) {
    std::vector<OpticalLine> lines;
    lines.reserve(static_cast<std::size_t>(ground.eigenvalues_MHz.size()) *
                  excited.eigenvalues_MHz.size());
    for (Eigen::Index i = 0; i < ground.eigenvalues_MHz.size(); ++i) {
        for (Eigen::Index j = 0; j < excited.eigenvalues_MHz.size(); ++j) {
            OpticalLine line;
            line.energy_eV = zpl_eV + (excited.eigenvalues_MHz(j) - ground.eigenvalues_MHz(i)) *
                                          constants::MHz_in_eV;
            line.wavelength_nm = constants::eV_to_nm(line.energy_eV);
            line.lower = ground.labels[static_cast<std::size_t>(i)];
            line.upper = excited.labels[static_cast<std::size_t>(j)];
            lines.push_back(line);
        }
    }
    return lines;
}

}
