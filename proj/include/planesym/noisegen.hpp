#pragma once

// Synthetic wallpaper patterns and the RGB (gray-level) and spread (pixel swap) noise models.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "planesym/core.hpp"
#include "planesym/error.hpp"
#include "planesym/geometry.hpp"
#include "planesym/image.hpp"

namespace planesym {

struct UnitCell {
    double a = 1.0;      // pixels
    double b = 1.0;      // pixels
    double gamma = 90.0;  // degrees
};

struct Repeats {
    int nx = 1;
    int ny = 1;
};

struct NoiseSpec {
    double rgb_level = 0.0;
    double spread_distance = 0.0;
    std::uint64_t seed = 0;
};

/// A motif sampled over the fractional unit square of one cell. Pixels with mask == 0 are transparent.
struct Motif {
    GrayImage values;
    std::vector<char> mask;
    double background = 0.0;
};

struct RenderResult {
    GrayImage image;
    double overlap_fraction = 0.0;  // share of pixels covered by more than one placed motif copy
};

namespace rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based stream: the draw depends only on (seed, stream, counter).
inline std::uint64_t draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return splitmix64(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL)) + counter);
}

/// Uniform on [0,1).
inline double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return static_cast<double>(draw(seed, stream, counter) >> 11) * 0x1.0p-53;
}

/// Uniform integer on [lo, hi].
inline long uniform_int(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter, long lo, long hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<long>(draw(seed, stream, counter) % span);
}

/// Standard normal by Box-Muller on two counted uniforms.
inline double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    const double u1 = 1.0 - uniform(seed, stream, 2 * counter);
    const double u2 = uniform(seed, stream, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace rng

namespace detail {

inline std::array<Vec2, 2> cell_vectors(const UnitCell& c) {
    if (!(c.a > 0.0) || !(c.b > 0.0)) throw InvalidArgumentError("cell lengths must be positive");
    if (!(c.gamma > 0.0 && c.gamma < 180.0)) throw InvalidArgumentError("cell angle must lie in (0, 180)");
    const double g = deg2rad(c.gamma);
    return {Vec2{c.a, 0.0}, Vec2{c.b * std::cos(g), c.b * std::sin(g)}};
}

inline int motif_cover(const Motif& m, PlaneGroup g, std::array<double, 2> u, double* value) {
    const int w = m.values.width(), h = m.values.height();
    int count = 0;
    for (const auto& op : operations(g)) {
        const auto v = op.apply(u);
        const int x = std::min(w - 1, static_cast<int>(wrap_unit(v[0]) * w));
        const int y = std::min(h - 1, static_cast<int>(wrap_unit(v[1]) * h));
        if (!m.mask[static_cast<std::size_t>(y) * w + x]) continue;
        ++count;
        *value = m.values.at(x, y);
    }
    return count;
}

inline void check_motif(const Motif& m) {
    if (m.values.empty()) throw InvalidArgumentError("empty motif");
    if (m.mask.size() != m.values.size()) throw InvalidArgumentError("motif mask does not match motif raster");
}

}  // namespace detail

/// Share of motif-grid samples in one cell covered by more than one copy of the motif.
inline double motif_overlap(const Motif& m, PlaneGroup g) {
    detail::check_motif(m);
    require_primitive(g);
    const int w = m.values.width(), h = m.values.height();
    std::size_t over = 0;
    double v = 0.0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (detail::motif_cover(m, g, {(x + 0.5) / w, (y + 0.5) / h}, &v) > 1) ++over;
    return static_cast<double>(over) / static_cast<double>(m.values.size());
}

/// Places the motif with every operation of the group (later operations win on overlap) and
/// repeats the cell over a width x height raster. Cell vector a runs along +x, the cell origin
/// sits at `origin` in raster coordinates (pixel (x,y) covers [x,x+1) x [y,y+1)) and pixels are
/// sampled at their centers.
inline RenderResult render_wallpaper(const Motif& m, PlaneGroup g, const UnitCell& cell, int width, int height,
                                     Vec2 origin = {0.0, 0.0}) {
    detail::check_motif(m);
    require_primitive(g);
    if (width <= 0 || height <= 0) throw InvalidArgumentError("output raster must be non-empty");
    const auto [a, b] = detail::cell_vectors(cell);
    const double det = cross(a, b);
    RenderResult r{GrayImage(width, height, m.background), 0.0};
    std::size_t over = 0;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const Vec2 p = Vec2{x + 0.5, y + 0.5} - origin;
            const std::array<double, 2> u{cross(p, b) / det, cross(a, p) / det};
            double v = 0.0;
            const int n = detail::motif_cover(m, g, u, &v);
            if (n > 0) r.image.at(x, y) = v;
            if (n > 1) ++over;
        }
    r.overlap_fraction = static_cast<double>(over) / static_cast<double>(r.image.size());
    return r;
}

/// Raster of ceil(nx a) by ceil(ny b sin(gamma)) pixels holding nx by ny repeats.
inline RenderResult render_wallpaper(const Motif& m, PlaneGroup g, const UnitCell& cell, Repeats rep) {
    if (rep.nx <= 0 || rep.ny <= 0) throw InvalidArgumentError("repeat counts must be positive");
    detail::cell_vectors(cell);
    const int w = static_cast<int>(std::ceil(rep.nx * cell.a - 1e-9));
    const int h = static_cast<int>(std::ceil(rep.ny * cell.b * std::sin(deg2rad(cell.gamma)) - 1e-9));
    return render_wallpaper(m, g, cell, w, h);
}

/// Cell metric of the group's lattice type used by the generic preset. Rectangular cells have
/// a longer than b so that a* is the shorter reciprocal vector.
inline UnitCell default_cell(PlaneGroup g) {
    require_primitive(g);
    switch (family(g)) {
        case CrystalFamily::oblique: return {91.7, 83.3, 104.3};
        case CrystalFamily::rectangular: return {95.3, 79.6, 90.0};
        case CrystalFamily::square: return {86.9, 86.9, 90.0};
        case CrystalFamily::hexagonal: return {93.1, 93.1, 120.0};
    }
    return {};
}

/// Near-hexagonal oblique cell of the pinwheel preset.
inline UnitCell pinwheel_cell() { return {90.0, 94.5, 116.0}; }

/// Smooth elliptical blobs at random positions, each accepted only if none of its copies under
/// the group touches an earlier copy.
inline Motif random_motif(PlaneGroup g, std::uint64_t seed, int blobs = 5, int res = 256) {
    require_primitive(g);
    if (blobs <= 0 || res < 8) throw InvalidArgumentError("motif needs at least one blob and 8x8 samples");
    Motif m{GrayImage(res, res, 0.1), std::vector<char>(static_cast<std::size_t>(res) * res, 0), 0.1};
    const double radius = multiplicity(g) >= 8 ? 0.07 : 0.09;
    std::uint64_t counter = 0;
    int placed = 0;
    for (int attempt = 0; attempt < 2000 && placed < blobs; ++attempt) {
        auto u = [&] { return rng::uniform(seed, 1, counter++); };
        const double cx = u(), cy = u();
        const double ra = radius * (0.6 + 0.4 * u()), rb = ra * (0.45 + 0.4 * u());
        const double th = 2.0 * std::numbers::pi * u();
        const double peak = 0.4 + 0.55 * u();
        Motif trial = m;
        for (int y = 0; y < res; ++y)
            for (int x = 0; x < res; ++x) {
                double dx = (x + 0.5) / res - cx, dy = (y + 0.5) / res - cy;
                dx -= std::round(dx);
                dy -= std::round(dy);
                const double p = (dx * std::cos(th) + dy * std::sin(th)) / ra;
                const double q = (-dx * std::sin(th) + dy * std::cos(th)) / rb;
                const double d2 = p * p + q * q;
                if (d2 >= 1.0) continue;
                const std::size_t i = static_cast<std::size_t>(y) * res + x;
                trial.mask[i] = 1;
                trial.values.at(x, y) = std::max(trial.values.at(x, y), m.background + (peak - m.background) * (1.0 - d2) * (1.0 - d2));
            }
        if (motif_overlap(trial, g) > 0.0) continue;
        m = std::move(trial);
        ++placed;
    }
    if (placed < blobs) throw InvalidArgumentError("could not place motif blobs without overlap");
    return m;
}

/// Three-blade pinwheel centred on the pseudo three-fold point (1/3, 2/3) of the cell.
inline Motif pinwheel_motif(const UnitCell& cell, int res = 256) {
    const auto [a, b] = detail::cell_vectors(cell);
    const double R = 0.26 * std::min(cell.a, cell.b);
    const Vec2 c = (1.0 / 3.0) * a + (2.0 / 3.0) * b;
    Motif m{GrayImage(res, res, 0.1), std::vector<char>(static_cast<std::size_t>(res) * res, 0), 0.1};
    for (int y = 0; y < res; ++y)
        for (int x = 0; x < res; ++x) {
            const Vec2 p = ((x + 0.5) / res) * a + ((y + 0.5) / res) * b - c;
            const double rho = norm(p) / R;
            if (rho >= 1.0) continue;
            const double th = std::atan2(p.y, p.x);
            const double blade = std::pow(std::max(0.0, std::cos(3.0 * (th - 2.2 * rho))), 3.0);
            const double env = std::pow(1.0 - rho * rho, 2.0);
            const double core = std::exp(-rho * rho / 0.02);
            m.mask[static_cast<std::size_t>(y) * res + x] = 1;
            m.values.at(x, y) = m.background + 0.8 * env * std::max(blade * std::min(1.0, 2.5 * rho), core);
        }
    return m;
}

/// Adds independent zero-mean Gaussian noise with sigma = 0.25 level, then clamps to [0,1].
inline GrayImage add_rgb_noise(const GrayImage& img, double level, std::uint64_t seed) {
    if (!(level >= 0.0 && level <= 1.0)) throw InvalidArgumentError("rgb noise level must lie in [0,1]");
    GrayImage out = img;
    if (level == 0.0) return out;
    const double sigma = 0.25 * level;
    auto px = out.pixels();
    for (std::size_t i = 0; i < px.size(); ++i)
        px[i] = std::clamp(px[i] + sigma * rng::normal(seed, 2, i), 0.0, 1.0);
    return out;
}

/// One raster-order pass swapping each pixel with a partner at a uniform offset in
/// [-distance, distance]^2, clipped to the raster.
inline GrayImage add_spread_noise(const GrayImage& img, double distance, std::uint64_t seed) {
    if (!(distance >= 0.0)) throw InvalidArgumentError("spread distance must be non-negative");
    GrayImage out = img;
    const long d = static_cast<long>(std::floor(distance));
    if (d == 0) return out;
    const int w = img.width(), h = img.height();
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const auto i = static_cast<std::uint64_t>(y) * w + x;
            const long px = std::clamp<long>(x + rng::uniform_int(seed, 3, 2 * i, -d, d), 0, w - 1);
            const long py = std::clamp<long>(y + rng::uniform_int(seed, 3, 2 * i + 1, -d, d), 0, h - 1);
            std::swap(out.at(x, y), out.at(static_cast<int>(px), static_cast<int>(py)));
        }
    return out;
}

inline GrayImage apply_noise(const GrayImage& img, const NoiseSpec& spec) {
    return add_spread_noise(add_rgb_noise(img, spec.rgb_level, spec.seed), spec.spread_distance, spec.seed);
}

enum class MotifKind { random, pinwheel };

/// Everything needed to reproduce one generated test image.
struct PatternSpec {
    PlaneGroup group = PlaneGroup::p2;
    MotifKind motif = MotifKind::random;
    std::optional<UnitCell> cell;  // default: pinwheel_cell() or default_cell(group)
    int width = 1024;
    int height = 1024;
    std::optional<Repeats> repeats;  // overrides width and height
    std::uint64_t motif_seed = 7;
    NoiseSpec noise;
};

inline UnitCell resolved_cell(const PatternSpec& s) {
    if (s.cell) return *s.cell;
    return s.motif == MotifKind::pinwheel ? pinwheel_cell() : default_cell(s.group);
}

/// Cell repeats covered by a width x height raster.
inline std::array<double, 2> repeats_in(const UnitCell& c, int width, int height) {
    return {width / c.a, height / (c.b * std::sin(deg2rad(c.gamma)))};
}

inline RenderResult generate_pattern(const PatternSpec& s) {
    const UnitCell cell = resolved_cell(s);
    const Motif m = s.motif == MotifKind::pinwheel ? pinwheel_motif(cell) : random_motif(s.group, s.motif_seed);
    RenderResult r = s.repeats ? render_wallpaper(m, s.group, cell, *s.repeats)
                               : render_wallpaper(m, s.group, cell, s.width, s.height);
    r.image = apply_noise(r.image, s.noise);
    return r;
}

}  // namespace planesym
