#pragma once

// Plane groups, their symmetry operations and the type-I (translationengleiche)
// subgroup hierarchy among the primitive groups.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "planesym/error.hpp"

namespace planesym {

/// The 21 settings of the 17 plane groups.
enum class PlaneGroup {
    p1,
    p2,
    p1m1,
    p11m,
    p1g1,
    p11g,
    c1m1,
    c11m,
    p2mm,
    p2mg,
    p2gm,
    p2gg,
    c2mm,
    p4,
    p4mm,
    p4gm,
    p3,
    p3m1,
    p31m,
    p6,
    p6mm,
};

enum class CrystalFamily { oblique, rectangular, square, hexagonal };

/// Integer 2x2 matrix acting on fractional coordinates (column vectors).
struct IntMat2 {
    std::array<int, 4> m{1, 0, 0, 1};  // row major

    constexpr int operator()(int r, int c) const { return m[static_cast<std::size_t>(2 * r + c)]; }

    friend constexpr IntMat2 operator*(const IntMat2& a, const IntMat2& b) {
        return IntMat2{{a(0, 0) * b(0, 0) + a(0, 1) * b(1, 0), a(0, 0) * b(0, 1) + a(0, 1) * b(1, 1),
                        a(1, 0) * b(0, 0) + a(1, 1) * b(1, 0), a(1, 0) * b(0, 1) + a(1, 1) * b(1, 1)}};
    }
    friend constexpr bool operator==(const IntMat2&, const IntMat2&) = default;

    constexpr bool is_identity() const { return m == std::array<int, 4>{1, 0, 0, 1}; }
    constexpr int det() const { return m[0] * m[3] - m[1] * m[2]; }
};

/// Miller-like index pair of a Fourier coefficient.
struct Index2 {
    int h = 0;
    int k = 0;

    friend constexpr bool operator==(const Index2&, const Index2&) = default;
    friend constexpr auto operator<=>(const Index2&, const Index2&) = default;
    constexpr Index2 operator-() const { return {-h, -k}; }
};

/// Reciprocal-space action of a direct-space point operation: the row vector (h,k) times R.
constexpr Index2 apply_reciprocal(const IntMat2& r, Index2 hk) {
    return {hk.h * r(0, 0) + hk.k * r(1, 0), hk.h * r(0, 1) + hk.k * r(1, 1)};
}

inline double wrap_unit(double v) {
    double w = v - std::floor(v);
    return w >= 1.0 ? 0.0 : w;
}

/// A space-group operation x -> R x + t on fractional coordinates, t reduced to [0,1).
struct SymOp {
    IntMat2 rot;
    std::array<double, 2> trans{0.0, 0.0};

    std::array<double, 2> apply(std::array<double, 2> u) const {
        return {rot(0, 0) * u[0] + rot(0, 1) * u[1] + trans[0],
                rot(1, 0) * u[0] + rot(1, 1) * u[1] + trans[1]};
    }

    /// g1 * g2 applies g2 first.
    friend SymOp operator*(const SymOp& g1, const SymOp& g2) {
        SymOp out;
        out.rot = g1.rot * g2.rot;
        out.trans = {wrap_unit(g1.rot(0, 0) * g2.trans[0] + g1.rot(0, 1) * g2.trans[1] + g1.trans[0]),
                     wrap_unit(g1.rot(1, 0) * g2.trans[0] + g1.rot(1, 1) * g2.trans[1] + g1.trans[1])};
        return out;
    }

    bool same_as(const SymOp& o) const {
        return rot == o.rot && std::abs(trans[0] - o.trans[0]) < 1e-12 &&
               std::abs(trans[1] - o.trans[1]) < 1e-12;
    }
};

namespace detail {

struct GroupInfo {
    PlaneGroup group;
    std::string_view name;
    CrystalFamily family;
    bool centered;
    std::vector<SymOp> generators;
};

inline SymOp op(std::array<int, 4> r, double tx = 0.0, double ty = 0.0) {
    return SymOp{IntMat2{r}, {wrap_unit(tx), wrap_unit(ty)}};
}

inline const std::vector<GroupInfo>& group_table() {
    // Coordinate triplets in the standard settings. (-x,-y) etc. are written as matrices.
    static const std::vector<GroupInfo> table = [] {
        const std::array<int, 4> inv{-1, 0, 0, -1};
        const std::array<int, 4> mx{-1, 0, 0, 1};  // (-x, y): mirror perpendicular to [10]
        const std::array<int, 4> my{1, 0, 0, -1};  // (x, -y): mirror perpendicular to [01]
        const std::array<int, 4> r4{0, -1, 1, 0};  // (-y, x)
        const std::array<int, 4> r3{0, -1, 1, -1};  // (-y, x-y)
        const std::array<int, 4> m3a{0, -1, -1, 0};  // (-y, -x)
        const std::array<int, 4> m3b{0, 1, 1, 0};  // (y, x)
        const SymOp centering = op({1, 0, 0, 1}, 0.5, 0.5);
        using F = CrystalFamily;
        using G = PlaneGroup;
        return std::vector<GroupInfo>{
            {G::p1, "p1", F::oblique, false, {}},
            {G::p2, "p2", F::oblique, false, {op(inv)}},
            {G::p1m1, "p1m1", F::rectangular, false, {op(mx)}},
            {G::p11m, "p11m", F::rectangular, false, {op(my)}},
            {G::p1g1, "p1g1", F::rectangular, false, {op(mx, 0.0, 0.5)}},
            {G::p11g, "p11g", F::rectangular, false, {op(my, 0.5, 0.0)}},
            {G::c1m1, "c1m1", F::rectangular, true, {op(mx), centering}},
            {G::c11m, "c11m", F::rectangular, true, {op(my), centering}},
            {G::p2mm, "p2mm", F::rectangular, false, {op(inv), op(mx)}},
            {G::p2mg, "p2mg", F::rectangular, false, {op(inv), op(mx, 0.5, 0.0)}},
            {G::p2gm, "p2gm", F::rectangular, false, {op(inv), op(my, 0.0, 0.5)}},
            {G::p2gg, "p2gg", F::rectangular, false, {op(inv), op(mx, 0.5, 0.5)}},
            {G::c2mm, "c2mm", F::rectangular, true, {op(inv), op(mx), centering}},
            {G::p4, "p4", F::square, false, {op(r4)}},
            {G::p4mm, "p4mm", F::square, false, {op(r4), op(mx)}},
            {G::p4gm, "p4gm", F::square, false, {op(r4), op(mx, 0.5, 0.5)}},
            {G::p3, "p3", F::hexagonal, false, {op(r3)}},
            {G::p3m1, "p3m1", F::hexagonal, false, {op(r3), op(m3a)}},
            {G::p31m, "p31m", F::hexagonal, false, {op(r3), op(m3b)}},
            {G::p6, "p6", F::hexagonal, false, {op(r3), op(inv)}},
            {G::p6mm, "p6mm", F::hexagonal, false, {op(r3), op(inv), op(m3a)}},
        };
    }();
    return table;
}

inline const GroupInfo& info(PlaneGroup g) {
    return group_table()[static_cast<std::size_t>(g)];
}

inline std::vector<SymOp> closure(const std::vector<SymOp>& generators) {
    std::vector<SymOp> ops{SymOp{}};
    bool grew = true;
    while (grew) {
        grew = false;
        const std::size_t n = ops.size();
        for (std::size_t i = 0; i < n; ++i) {
            for (const auto& g : generators) {
                SymOp c = g * ops[i];
                bool known = std::any_of(ops.begin(), ops.end(), [&](const SymOp& o) { return o.same_as(c); });
                if (!known) {
                    ops.push_back(c);
                    grew = true;
                }
            }
        }
    }
    return ops;
}

}  // namespace detail

inline constexpr std::array<PlaneGroup, 21> all_groups{
    PlaneGroup::p1,   PlaneGroup::p2,   PlaneGroup::p1m1, PlaneGroup::p11m, PlaneGroup::p1g1, PlaneGroup::p11g,
    PlaneGroup::c1m1, PlaneGroup::c11m, PlaneGroup::p2mm, PlaneGroup::p2mg, PlaneGroup::p2gm, PlaneGroup::p2gg,
    PlaneGroup::c2mm, PlaneGroup::p4,   PlaneGroup::p4mm, PlaneGroup::p4gm, PlaneGroup::p3,   PlaneGroup::p3m1,
    PlaneGroup::p31m, PlaneGroup::p6,   PlaneGroup::p6mm,
};

/// The 17 primitive settings above p1 that take part in model selection.
inline constexpr std::array<PlaneGroup, 17> scored_groups{
    PlaneGroup::p2,   PlaneGroup::p1m1, PlaneGroup::p11m, PlaneGroup::p1g1, PlaneGroup::p11g, PlaneGroup::p2mm,
    PlaneGroup::p2mg, PlaneGroup::p2gm, PlaneGroup::p2gg, PlaneGroup::p4,   PlaneGroup::p4mm, PlaneGroup::p4gm,
    PlaneGroup::p3,   PlaneGroup::p3m1, PlaneGroup::p31m, PlaneGroup::p6,   PlaneGroup::p6mm,
};

inline std::string_view name(PlaneGroup g) { return detail::info(g).name; }

inline std::optional<PlaneGroup> group_from_name(std::string_view s) {
    for (const auto& gi : detail::group_table()) {
        if (gi.name == s) return gi.group;
    }
    // short symbols for the single-setting groups
    if (s == "pm") return PlaneGroup::p1m1;
    if (s == "pg") return PlaneGroup::p1g1;
    if (s == "cm") return PlaneGroup::c1m1;
    return std::nullopt;
}

inline PlaneGroup parse_group(std::string_view s) {
    auto g = group_from_name(s);
    if (!g) throw InvalidArgumentError("unknown plane group '" + std::string(s) + "'");
    return *g;
}

inline CrystalFamily family(PlaneGroup g) { return detail::info(g).family; }
inline bool is_centered(PlaneGroup g) { return detail::info(g).centered; }
inline std::span<const SymOp> generators(PlaneGroup g) { return detail::info(g).generators; }

/// All operations of the group modulo the primitive lattice (the centering translation counts).
inline std::span<const SymOp> operations(PlaneGroup g) {
    static const std::array<std::vector<SymOp>, 21> cache = [] {
        std::array<std::vector<SymOp>, 21> c;
        for (auto grp : all_groups) c[static_cast<std::size_t>(grp)] = detail::closure(detail::info(grp).generators);
        return c;
    }();
    return cache[static_cast<std::size_t>(g)];
}

/// Multiplicity of the general position.
inline int multiplicity(PlaneGroup g) { return static_cast<int>(operations(g).size()); }

inline void require_primitive(PlaneGroup g) {
    if (is_centered(g))
        throw UnsupportedGroupError("centered plane group " + std::string(name(g)) + " is not supported here");
}

namespace detail {

struct Edge {
    PlaneGroup sub;
    PlaneGroup super;
};

inline constexpr std::array<Edge, 24> hierarchy_edges{{
    {PlaneGroup::p2, PlaneGroup::p2mm},   {PlaneGroup::p2, PlaneGroup::p2mg},   {PlaneGroup::p2, PlaneGroup::p2gm},
    {PlaneGroup::p2, PlaneGroup::p2gg},   {PlaneGroup::p2, PlaneGroup::p4},     {PlaneGroup::p2, PlaneGroup::p6},
    {PlaneGroup::p1m1, PlaneGroup::p2mm}, {PlaneGroup::p1m1, PlaneGroup::p2mg}, {PlaneGroup::p11m, PlaneGroup::p2mm},
    {PlaneGroup::p11m, PlaneGroup::p2gm}, {PlaneGroup::p1g1, PlaneGroup::p2gm}, {PlaneGroup::p1g1, PlaneGroup::p2gg},
    {PlaneGroup::p11g, PlaneGroup::p2mg}, {PlaneGroup::p11g, PlaneGroup::p2gg}, {PlaneGroup::p2mm, PlaneGroup::p4mm},
    {PlaneGroup::p2gg, PlaneGroup::p4gm}, {PlaneGroup::p4, PlaneGroup::p4mm},   {PlaneGroup::p4, PlaneGroup::p4gm},
    {PlaneGroup::p3, PlaneGroup::p3m1},   {PlaneGroup::p3, PlaneGroup::p31m},   {PlaneGroup::p3, PlaneGroup::p6},
    {PlaneGroup::p3m1, PlaneGroup::p6mm}, {PlaneGroup::p31m, PlaneGroup::p6mm}, {PlaneGroup::p6, PlaneGroup::p6mm},
}};

}  // namespace detail

/// Minimal type-I supergroups among the primitive groups (no re-indexing climbs).
inline std::vector<PlaneGroup> minimal_supergroups(PlaneGroup g) {
    require_primitive(g);
    std::vector<PlaneGroup> out;
    for (const auto& e : detail::hierarchy_edges)
        if (e.sub == g) out.push_back(e.super);
    return out;
}

/// Maximal type-I subgroups above p1.
inline std::vector<PlaneGroup> maximal_subgroups(PlaneGroup g) {
    require_primitive(g);
    std::vector<PlaneGroup> out;
    for (const auto& e : detail::hierarchy_edges)
        if (e.super == g) out.push_back(e.sub);
    return out;
}

/// True when `sub` lies below `super` in the hierarchy graph (or equals it).
inline bool is_subgroup_of(PlaneGroup sub, PlaneGroup super) {
    if (sub == super) return true;
    for (auto s : maximal_subgroups(super))
        if (is_subgroup_of(sub, s)) return true;
    return false;
}

enum class LaueClass { L2, L2mm, L4, L4mm, L6, L6mm };

inline std::string_view name(LaueClass l) {
    switch (l) {
        case LaueClass::L2: return "2";
        case LaueClass::L2mm: return "2mm";
        case LaueClass::L4: return "4";
        case LaueClass::L4mm: return "4mm";
        case LaueClass::L6: return "6";
        case LaueClass::L6mm: return "6mm";
    }
    return "?";
}

inline int order(LaueClass l) {
    switch (l) {
        case LaueClass::L2: return 2;
        case LaueClass::L2mm: return 4;
        case LaueClass::L4: return 4;
        case LaueClass::L4mm: return 8;
        case LaueClass::L6: return 6;
        case LaueClass::L6mm: return 12;
    }
    return 0;
}

/// Point symmetry of the amplitude map of a pattern with plane group g (Friedel's law adds the 2-fold).
inline LaueClass laue_class(PlaneGroup g) {
    using G = PlaneGroup;
    switch (g) {
        case G::p1:
        case G::p2: return LaueClass::L2;
        case G::p4: return LaueClass::L4;
        case G::p4mm:
        case G::p4gm: return LaueClass::L4mm;
        case G::p3:
        case G::p6: return LaueClass::L6;
        case G::p3m1:
        case G::p31m:
        case G::p6mm: return LaueClass::L6mm;
        default: return LaueClass::L2mm;
    }
}

inline bool is_subclass_of(LaueClass sub, LaueClass super) {
    if (sub == super || sub == LaueClass::L2) return true;
    if (super == LaueClass::L4mm) return sub == LaueClass::L2mm || sub == LaueClass::L4;
    if (super == LaueClass::L6mm) return sub == LaueClass::L2mm || sub == LaueClass::L6;
    return false;
}

}  // namespace planesym
