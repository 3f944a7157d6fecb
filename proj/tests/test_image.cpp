#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "planesym/image.hpp"

using namespace planesym;

namespace {

GrayImage random_image(int w, int h, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    GrayImage img(w, h);
    for (auto& v : img.pixels()) v = u(rng);
    return img;
}

}  // namespace

TEST(Image, ConstructionValidatesBuffer) {
    EXPECT_THROW(GrayImage(2, 2, std::vector<double>(3)), InvalidArgumentError);
    EXPECT_THROW(GrayImage(-1, 2), InvalidArgumentError);
    GrayImage img(3, 2, 0.5);
    EXPECT_EQ(img.size(), 6u);
    EXPECT_DOUBLE_EQ(img.mean(), 0.5);
}

TEST(Image, TileOnceIsIdentity) {
    auto img = random_image(7, 5, 1);
    EXPECT_EQ(tile_image(img, 1, 1), img);
}

TEST(Image, TileTwoByTwoRepeatsExactly) {
    auto img = random_image(6, 4, 2);
    auto t = tile_image(img, 2, 2);
    ASSERT_EQ(t.width(), 12);
    ASSERT_EQ(t.height(), 8);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 12; ++x) EXPECT_EQ(t.at(x, y), img.at(x % 6, y % 4));
}

TEST(Image, TileRejectsBadCounts) {
    GrayImage img(4, 4);
    EXPECT_THROW(tile_image(img, 0, 1), InvalidArgumentError);
    EXPECT_THROW(tile_image(img, 1 << 20, 1 << 20), InvalidArgumentError);
}

TEST(Image, SquareSelectionFromWideImage) {
    GrayImage img(2970, 2048);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) img.at(x, y) = (x * 7 + y * 13) % 101 / 100.0;
    auto s = select_region(img, SelectionShape::square, 1024);
    ASSERT_EQ(s.width(), 1024);
    ASSERT_EQ(s.height(), 1024);
    const int x0 = 2970 / 2 - 512, y0 = 1024 - 512;
    EXPECT_EQ(s.at(0, 0), img.at(x0, y0));
    EXPECT_EQ(s.at(1023, 1023), img.at(x0 + 1023, y0 + 1023));
}

TEST(Image, SelectionValidation) {
    GrayImage img(64, 64);
    EXPECT_THROW(select_region(img, SelectionShape::square, 48), InvalidArgumentError);
    EXPECT_THROW(select_region(img, SelectionShape::square, 128), InvalidArgumentError);
    EXPECT_THROW(select_region(img, SelectionShape::square, 32, {4, 4}), InvalidArgumentError);
    EXPECT_NO_THROW(select_region(img, SelectionShape::circle, 32, {16, 16}));
}

TEST(Image, CircleOnConstantImageIsConstant) {
    GrayImage img(128, 128, 0.37);
    auto c = select_region(img, SelectionShape::circle, 64);
    for (double v : c.pixels()) EXPECT_DOUBLE_EQ(v, 0.37);
}

TEST(Image, CircleAreaIsQuarterPi) {
    for (int size : {64, 256, 1024}) {
        long inside = 0;
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x) inside += inside_inscribed_circle(x, y, size);
        const double expected = std::numbers::pi / 4.0 * size * size;
        // the boundary ring holds about pi * size pixels
        EXPECT_NEAR(static_cast<double>(inside), expected, std::numbers::pi * size) << size;
    }
}

TEST(ImageProperty, CircleMaskKeepsInteriorAndFillsWithInteriorMean) {
    auto img = random_image(128, 128, 3);
    auto c = select_region(img, SelectionShape::circle, 64, {70, 60});
    auto sq = select_region(img, SelectionShape::square, 64, {70, 60});
    double sum = 0;
    int n = 0;
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x)
            if (inside_inscribed_circle(x, y, 64)) {
                EXPECT_EQ(c.at(x, y), sq.at(x, y));
                sum += sq.at(x, y);
                ++n;
            }
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x)
            if (!inside_inscribed_circle(x, y, 64)) EXPECT_NEAR(c.at(x, y), sum / n, 1e-12);
}

TEST(ImageProperty, TileThenFullSelectionIsIdentity) {
    auto img = random_image(16, 16, 4);
    auto t = tile_image(img, 4, 4);
    auto s = select_region(t, SelectionShape::square, 64);
    EXPECT_EQ(s, t);
}

TEST(Image, ShiftOriginWraps) {
    auto img = random_image(8, 8, 5);
    auto s = shift_origin(img, 3, -2);
    EXPECT_EQ(s.at(0, 0), img.at(3, 6));
    EXPECT_EQ(s.at(7, 7), img.at(2, 5));
    EXPECT_EQ(shift_origin(s, -3, 2), img);
}
