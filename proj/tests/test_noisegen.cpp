#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "planesym/noisegen.hpp"
#include "planesym/residuals.hpp"
#include "planesym/spectrum.hpp"
#include "planesym/symmetry.hpp"

using namespace planesym;

namespace {

GrayImage gradient(int w, int h) {
    GrayImage img(w, h, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) img.at(x, y) = std::fmod(0.013 * x + 0.029 * y + 0.001 * x * y, 1.0);
    return img;
}

Motif full_motif(int res) {
    Motif m{GrayImage(res, res, 0.0), std::vector<char>(static_cast<std::size_t>(res) * res, 1), 0.0};
    for (int y = 0; y < res; ++y)
        for (int x = 0; x < res; ++x) m.values.at(x, y) = ((x * 7 + y * 13) % 17) / 17.0;
    return m;
}

bool same_pixels(const GrayImage& a, const GrayImage& b) {
    return a.width() == b.width() && a.height() == b.height() &&
           std::equal(a.pixels().begin(), a.pixels().end(), b.pixels().begin());
}

}  // namespace

TEST(RgbNoise, LevelZeroIsIdentity) {
    const GrayImage img = gradient(64, 48);
    EXPECT_TRUE(same_pixels(add_rgb_noise(img, 0.0, 5), img));
}

TEST(RgbNoise, MeanShiftBelowBoundAtFullLevel) {
    const GrayImage img(1024, 1024, 0.5);
    const GrayImage out = add_rgb_noise(img, 1.0, 11);
    const double mean = std::accumulate(out.pixels().begin(), out.pixels().end(), 0.0) / out.size();
    EXPECT_LT(std::abs(mean - 0.5), 0.005);
}

TEST(RgbNoise, SigmaMatchesLevel) {
    const GrayImage img(512, 512, 0.5);
    for (double level : {0.2, 0.4}) {
        const GrayImage out = add_rgb_noise(img, level, 3);
        double s2 = 0.0;
        for (double v : out.pixels()) s2 += (v - 0.5) * (v - 0.5);
        const double sigma = std::sqrt(s2 / out.size());
        EXPECT_NEAR(sigma, 0.25 * level, 0.03 * 0.25 * level);
    }
}

TEST(RgbNoise, ClampsAndKeepsShape) {
    const GrayImage out = add_rgb_noise(gradient(100, 70), 1.0, 9);
    EXPECT_EQ(out.width(), 100);
    EXPECT_EQ(out.height(), 70);
    for (double v : out.pixels()) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(RgbNoise, RejectsLevelOutsideUnitInterval) {
    EXPECT_THROW(add_rgb_noise(gradient(8, 8), 1.5, 1), InvalidArgumentError);
    EXPECT_THROW(add_rgb_noise(gradient(8, 8), -0.1, 1), InvalidArgumentError);
}

TEST(SpreadNoise, DistanceZeroIsIdentity) {
    const GrayImage img = gradient(64, 48);
    EXPECT_TRUE(same_pixels(add_spread_noise(img, 0.0, 5), img));
}

TEST(SpreadNoise, PreservesHistogramExactly) {
    const GrayImage img = add_rgb_noise(gradient(200, 150), 0.5, 1);
    for (double d : {1.0, 10.0, 50.0}) {
        const GrayImage out = add_spread_noise(img, d, 77);
        EXPECT_FALSE(same_pixels(out, img));
        std::vector<double> a(img.pixels().begin(), img.pixels().end()), b(out.pixels().begin(), out.pixels().end());
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        EXPECT_EQ(a, b);
    }
}

TEST(SpreadNoise, MovesPixelsOnlyLocallyForSmallDistance) {
    GrayImage img(64, 64, 0.0);
    img.at(32, 32) = 1.0;
    const GrayImage out = add_spread_noise(img, 2.0, 4);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x)
            if (out.at(x, y) == 1.0) {
                // one pass can carry a value forward along the raster more than once, but not far
                EXPECT_LE(std::abs(y - 32), 16);
            }
}

TEST(Noise, DeterministicForFixedSpec) {
    const GrayImage img = gradient(128, 96);
    const NoiseSpec spec{0.75, 10.0, 123};
    EXPECT_TRUE(same_pixels(apply_noise(img, spec), apply_noise(img, spec)));
    EXPECT_FALSE(same_pixels(apply_noise(img, spec), apply_noise(img, {0.75, 10.0, 124})));
}

TEST(Rng, CountersGiveIndependentDraws) {
    EXPECT_EQ(rng::draw(1, 2, 3), rng::draw(1, 2, 3));
    EXPECT_NE(rng::draw(1, 2, 3), rng::draw(1, 2, 4));
    EXPECT_NE(rng::draw(1, 2, 3), rng::draw(1, 3, 3));
    for (std::uint64_t c = 0; c < 1000; ++c) {
        const double u = rng::uniform(5, 1, c);
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        const long i = rng::uniform_int(5, 1, c, -3, 3);
        EXPECT_GE(i, -3);
        EXPECT_LE(i, 3);
    }
}

TEST(Render, P1SingleRepeatReproducesMotif) {
    const Motif m = full_motif(64);
    const RenderResult r = render_wallpaper(m, PlaneGroup::p1, {64.0, 64.0, 90.0}, {1, 1});
    ASSERT_EQ(r.image.width(), 64);
    ASSERT_EQ(r.image.height(), 64);
    EXPECT_TRUE(same_pixels(r.image, m.values));
    EXPECT_EQ(r.overlap_fraction, 0.0);
}

TEST(Render, P2EqualsItsHalfTurn) {
    const Motif m = random_motif(PlaneGroup::p2, 3);
    const RenderResult r = render_wallpaper(m, PlaneGroup::p2, {64.0, 48.0, 90.0}, {4, 5});
    const GrayImage& img = r.image;
    int mismatch = 0;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            mismatch += std::abs(img.at(x, y) - img.at(img.width() - 1 - x, img.height() - 1 - y)) > 0.05;
    EXPECT_LT(mismatch, 0.01 * img.size());
}

TEST(Render, RepeatsSetRasterSize) {
    const RenderResult r = render_wallpaper(full_motif(16), PlaneGroup::p1, {10.5, 20.0, 90.0}, {3, 2});
    EXPECT_EQ(r.image.width(), 32);
    EXPECT_EQ(r.image.height(), 40);
}

TEST(Render, ReportsOverlap) {
    const RenderResult r = render_wallpaper(full_motif(32), PlaneGroup::p2, {32.0, 32.0, 90.0}, {2, 2});
    EXPECT_GT(r.overlap_fraction, 0.99);
}

TEST(Render, RandomMotifsDoNotOverlap) {
    for (auto g : scored_groups) {
        const Motif m = random_motif(g, 7);
        EXPECT_EQ(motif_overlap(m, g), 0.0) << name(g);
    }
}

TEST(Render, RejectsBadInput) {
    EXPECT_THROW(render_wallpaper(full_motif(16), PlaneGroup::p2, {16.0, 16.0, 90.0}, {0, 2}), InvalidArgumentError);
    EXPECT_THROW(render_wallpaper(full_motif(16), PlaneGroup::c2mm, {16.0, 16.0, 90.0}, {2, 2}), UnsupportedGroupError);
}

TEST(Render, PinwheelIsNearlyThreeFold) {
    const UnitCell cell = pinwheel_cell();
    const Motif m = pinwheel_motif(cell);
    EXPECT_EQ(motif_overlap(m, PlaneGroup::p2), 0.0);
    const GrayImage img = render_wallpaper(m, PlaneGroup::p2, cell, 256, 256).image;
    EXPECT_GT(*std::max_element(img.pixels().begin(), img.pixels().end()), 0.5);
}

TEST(Generate, DeterministicPattern) {
    PatternSpec s;
    s.group = PlaneGroup::p4;
    s.width = s.height = 256;
    s.noise = {0.5, 10.0, 2};
    EXPECT_TRUE(same_pixels(generate_pattern(s).image, generate_pattern(s).image));
    const UnitCell c = resolved_cell(s);
    const auto rep = repeats_in(c, 256, 256);
    EXPECT_NEAR(rep[0], 256 / 86.9, 1e-12);
}

// residual per coefficient of a noise-free pattern symmetrized to its own group
TEST(Render, OwnGroupResidualIsSmall) {
    for (auto g : {PlaneGroup::p2, PlaneGroup::p4, PlaneGroup::p2mm, PlaneGroup::p3, PlaneGroup::p6}) {
        const GrayImage img = render_wallpaper(random_motif(g, 7), g, default_cell(g), 1024, 1024).image;
        const Spectrum s = dft2_centered(img);
        const auto lat = fit_reciprocal_lattice(detect_peaks(amplitude_map(s), default_min_amp, 128));
        const auto fcs = index_and_extract(s, lat, 128, default_min_amp);
        const auto o = refine_origin(fcs, g, 100);
        const auto obs = apply_origin_shift(fcs, o.x0, o.y0);
        const auto sym = symmetrize(obs, g);
        const auto r = compute_residuals(obs, sym.fcs, g, sym.extinct);
        EXPECT_LT(r.J_FC / r.N, 1e-3) << name(g) << " J=" << r.J_FC << " N=" << r.N;
    }
}
