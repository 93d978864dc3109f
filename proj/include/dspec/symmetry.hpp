#pragma once

// C2v point-group algebra: irreducible representations, many-electron state
// symmetry from orbital occupations, and electric-dipole selection rules.
// The group is hard-coded; axis convention is C2 along z, sigma_v = xz plane,
// sigma_v' = yz plane, so the dipole components transform as
// (x, y, z) -> (B1, B2, A1).

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "dspec/errors.hpp"

namespace dspec {

enum class Irrep : int { A1 = 0, A2 = 1, B1 = 2, B2 = 3 };

enum class Axis : int { X = 0, Y = 1, Z = 2 };

enum class SpinChannel { Up, Down };

/// Character row over the classes {E, C2, sigma_v(xz), sigma_v'(yz)}.
constexpr std::array<int, 4> characters(Irrep r) {
    switch (r) {
        case Irrep::A1: return {+1, +1, +1, +1};
        case Irrep::A2: return {+1, +1, -1, -1};
        case Irrep::B1: return {+1, -1, +1, -1};
        case Irrep::B2: return {+1, -1, -1, +1};
    }
    return {0, 0, 0, 0};
}

constexpr const char* irrep_name(Irrep r) {
    switch (r) {
        case Irrep::A1: return "A1";
        case Irrep::A2: return "A2";
        case Irrep::B1: return "B1";
        case Irrep::B2: return "B2";
    }
    return "?";
}

inline Irrep parse_irrep(const std::string& s) {
    if (s == "A1" || s == "a1") return Irrep::A1;
    if (s == "A2" || s == "a2") return Irrep::A2;
    if (s == "B1" || s == "b1") return Irrep::B1;
    if (s == "B2" || s == "b2") return Irrep::B2;
    throw ValidationError("unknown C2v irrep '" + s + "' (expected A1/A2/B1/B2)");
}

/// Pointwise character multiplication; closed in {A1, A2, B1, B2}.
constexpr Irrep irrep_product(Irrep a, Irrep b) {
    const auto ca = characters(a);
    const auto cb = characters(b);
    for (int r = 0; r < 4; ++r) {
        const auto cr = characters(static_cast<Irrep>(r));
        bool match = true;
        for (std::size_t k = 0; k < 4; ++k)
            if (cr[k] != ca[k] * cb[k]) { match = false; break; }
        if (match) return static_cast<Irrep>(r);
    }
    return Irrep::A1;  // unreachable: C2v characters are closed under products
}

/// Irrep of the dipole-moment component along the given axis.
constexpr Irrep dipole_irrep(Axis p) {
    switch (p) {
        case Axis::X: return Irrep::B1;
        case Axis::Y: return Irrep::B2;
        case Axis::Z: return Irrep::A1;
    }
    return Irrep::A1;
}

constexpr char axis_name(Axis p) {
    switch (p) {
        case Axis::X: return 'x';
        case Axis::Y: return 'y';
        case Axis::Z: return 'z';
    }
    return '?';
}

struct OrbitalOccupation {
    Irrep irrep;
    int occupancy = 0;  // total over both spin channels: 0, 1 or 2
};

/// One many-electron configuration as an ordered list of defect orbitals
/// with total occupancies, e.g. [a1]2 [b2]2 [b1]2 [a1]1 [b2]2.
struct OrbitalConfiguration {
    std::vector<OrbitalOccupation> orbitals;

    void validate() const {
        if (orbitals.empty())
            throw ValidationError("orbital configuration must contain at least one orbital");
        for (const auto& o : orbitals)
            if (o.occupancy < 0 || o.occupancy > 2)
                throw ValidationError("orbital occupancy must be 0, 1 or 2");
    }

    int electron_count() const {
        int n = 0;
        for (const auto& o : orbitals) n += o.occupancy;
        return n;
    }

    int unpaired_count() const {
        int n = 0;
        for (const auto& o : orbitals) n += (o.occupancy == 1);
        return n;
    }

    /// 2S+1 in the high-spin picture (all unpaired electrons parallel).
    int multiplicity() const { return unpaired_count() + 1; }
};

/// Product of the irreps of singly occupied orbitals; closed shells and
/// empty orbitals contribute A1.
inline Irrep state_symmetry(const OrbitalConfiguration& config) {
    config.validate();
    Irrep acc = Irrep::A1;
    for (const auto& o : config.orbitals)
        if (o.occupancy == 1) acc = irrep_product(acc, o.irrep);
    return acc;
}

/// Polarization p is allowed iff excited x Gamma(p) x ground contains A1,
/// i.e. irrep_product(ground, excited) == Gamma(p). At most one axis
/// qualifies since the product is a single irrep; A2 products are dark.
inline std::vector<Axis> dipole_allowed(Irrep ground, Irrep excited) {
    const Irrep prod = irrep_product(ground, excited);
    std::vector<Axis> out;
    for (Axis p : {Axis::X, Axis::Y, Axis::Z})
        if (dipole_irrep(p) == prod) out.push_back(p);
    return out;
}

/// Term symbol with the spin multiplicity carried as metadata, e.g. "3B2".
/// Multiplicity plays no role in the dipole verdicts.
inline std::string term_symbol(const OrbitalConfiguration& config) {
    return std::to_string(config.multiplicity()) + irrep_name(state_symmetry(config));
}

struct LabeledConfiguration {
    std::string label;
    OrbitalConfiguration config;
};

struct TransitionVerdict {
    std::string ground_label;
    std::string excited_label;
    Irrep ground_irrep;
    Irrep excited_irrep;
    int ground_multiplicity = 1;
    int excited_multiplicity = 1;
    int from_orbital = -1;  // index into the ordered orbital list
    int to_orbital = -1;
    std::vector<Axis> polarizations;
};

namespace detail {

// Whether the channel-c slot of an orbital with the given total occupancy is
// filled, under the convention that a lone electron is majority-spin (up).
inline bool channel_occupied(int occupancy, SpinChannel c) {
    if (occupancy == 2) return true;
    if (occupancy == 1) return c == SpinChannel::Up;
    return false;
}

}  // namespace detail

/// Checks that `excited` is reachable from `ground` by moving exactly one
/// electron within the given spin channel and returns the (from, to) orbital
/// indices. Identical configurations return (-1, -1). Anything else — a
/// changed orbital list, a net electron count change, a multi-electron
/// rearrangement, or a move whose source/target slot is not available in
/// that channel (a spin flip) — throws MalformedPromotion.
inline std::pair<int, int> promotion_indices(const OrbitalConfiguration& ground,
                                             const OrbitalConfiguration& excited,
                                             SpinChannel channel) {
    ground.validate();
    excited.validate();
    if (ground.orbitals.size() != excited.orbitals.size())
        throw MalformedPromotion("configurations list different numbers of orbitals");
    int from = -1, to = -1;
    for (std::size_t i = 0; i < ground.orbitals.size(); ++i) {
        if (ground.orbitals[i].irrep != excited.orbitals[i].irrep)
            throw MalformedPromotion("configurations disagree on the orbital ordering");
        const int d = excited.orbitals[i].occupancy - ground.orbitals[i].occupancy;
        if (d == 0) continue;
        if (d == -1 && from < 0) { from = static_cast<int>(i); continue; }
        if (d == +1 && to < 0) { to = static_cast<int>(i); continue; }
        throw MalformedPromotion("configurations differ by more than one electron move");
    }
    if (from < 0 && to < 0) return {-1, -1};
    if (from < 0 || to < 0)
        throw MalformedPromotion("configurations differ in total electron count");
    if (!detail::channel_occupied(ground.orbitals[from].occupancy, channel))
        throw MalformedPromotion(
            "promotion source has no electron in the stated spin channel (spin flip?)");
    if (detail::channel_occupied(ground.orbitals[to].occupancy, channel))
        throw MalformedPromotion(
            "promotion target slot is already filled in the stated spin channel (spin flip?)");
    return {from, to};
}

/// Classifies the promotions from the first (ground) configuration to each
/// subsequent one. Entries identical to the ground produce no row; malformed
/// pairs throw. Spin-flip moves are excluded, matching the restriction to
/// non-spin-flipping excitations within one channel.
inline std::vector<TransitionVerdict> classify_transitions(
    const std::vector<LabeledConfiguration>& configs, SpinChannel channel) {
    if (configs.empty()) return {};
    std::vector<TransitionVerdict> table;
    const auto& ground = configs.front();
    for (std::size_t k = 1; k < configs.size(); ++k) {
        const auto& excited = configs[k];
        const auto [from, to] = promotion_indices(ground.config, excited.config, channel);
        if (from < 0) continue;  // identity
        TransitionVerdict v;
        v.ground_label = ground.label;
        v.excited_label = excited.label;
        v.ground_irrep = state_symmetry(ground.config);
        v.excited_irrep = state_symmetry(excited.config);
        v.ground_multiplicity = ground.config.multiplicity();
        v.excited_multiplicity = excited.config.multiplicity();
        v.from_orbital = from;
        v.to_orbital = to;
        v.polarizations = dipole_allowed(v.ground_irrep, v.excited_irrep);
        table.push_back(std::move(v));
    }
    return table;
}

/// All configurations reachable from `ground` by one electron move within
/// the given channel, in (from, to) lexicographic order.
inline std::vector<LabeledConfiguration> enumerate_promotions(
    const OrbitalConfiguration& ground, SpinChannel channel) {
    ground.validate();
    std::vector<LabeledConfiguration> out;
    const auto& orbs = ground.orbitals;
    for (std::size_t from = 0; from < orbs.size(); ++from) {
        if (!detail::channel_occupied(orbs[from].occupancy, channel)) continue;
        for (std::size_t to = 0; to < orbs.size(); ++to) {
            if (to == from) continue;
            if (detail::channel_occupied(orbs[to].occupancy, channel)) continue;
            OrbitalConfiguration promoted = ground;
            promoted.orbitals[from].occupancy -= 1;
            promoted.orbitals[to].occupancy += 1;
            out.push_back({"promote_" + std::to_string(from) + "_to_" + std::to_string(to),
                           std::move(promoted)});
        }
    }
    return out;
}

}
