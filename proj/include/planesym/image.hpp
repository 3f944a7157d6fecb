#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "planesym/error.hpp"

namespace planesym {

/// Row-major grayscale raster, nominal range [0,1].
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, double fill = 0.0) : width_(width), height_(height) {
        if (width < 0 || height < 0) throw InvalidArgumentError("negative image dimensions");
        data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }
    GrayImage(int width, int height, std::vector<double> data)
        : width_(width), height_(height), data_(std::move(data)) {
        if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
            throw InvalidArgumentError("pixel buffer does not match image dimensions");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return data_.empty(); }
    std::size_t size() const { return data_.size(); }

    double& at(int x, int y) { return data_[index(x, y)]; }
    double at(int x, int y) const { return data_[index(x, y)]; }

    std::span<double> pixels() { return data_; }
    std::span<const double> pixels() const { return data_; }

    double mean() const {
        double s = 0.0;
        for (double v : data_) s += v;
        return data_.empty() ? 0.0 : s / static_cast<double>(data_.size());
    }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

constexpr bool is_power_of_two(long long n) { return n > 0 && (n & (n - 1)) == 0; }

/// Exact periodic repetition: out(x,y) = img(x mod W, y mod H).
inline GrayImage tile_image(const GrayImage& img, int nx, int ny) {
    if (nx <= 0 || ny <= 0) throw InvalidArgumentError("tile counts must be positive");
    const long long w = static_cast<long long>(img.width()) * nx;
    const long long h = static_cast<long long>(img.height()) * ny;
    if (w > std::numeric_limits<int>::max() || h > std::numeric_limits<int>::max() ||
        w * h > static_cast<long long>(1) << 32)
        throw InvalidArgumentError("tiled image dimensions overflow");
    GrayImage out(static_cast<int>(w), static_cast<int>(h));
    for (int y = 0; y < out.height(); ++y)
        for (int x = 0; x < out.width(); ++x) out.at(x, y) = img.at(x % img.width(), y % img.height());
    return out;
}

enum class SelectionShape { square, circle };

inline std::string to_string(SelectionShape s) { return s == SelectionShape::square ? "square" : "circle"; }

struct PixelCoord {
    int x = 0;
    int y = 0;
};

/// True when the pixel center of (x,y) lies inside the circle inscribed in a size x size square.
inline bool inside_inscribed_circle(int x, int y, int size) {
    const double r = 0.5 * size;
    const double dx = x + 0.5 - r;
    const double dy = y + 0.5 - r;
    return dx * dx + dy * dy <= r * r;
}

/// Crops a size x size window centred on `center`. For circles the pixels outside the
/// inscribed circle are replaced by the mean of the pixels inside it.
inline GrayImage select_region(const GrayImage& img, SelectionShape shape, int size, PixelCoord center) {
    if (!is_power_of_two(size)) throw InvalidArgumentError("selection size must be a power of two");
    const int x0 = center.x - size / 2;
    const int y0 = center.y - size / 2;
    if (x0 < 0 || y0 < 0 || x0 + size > img.width() || y0 + size > img.height())
        throw InvalidArgumentError("selection of size " + std::to_string(size) + " does not fit inside a " +
                                   std::to_string(img.width()) + "x" + std::to_string(img.height()) + " image");
    GrayImage out(size, size);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) out.at(x, y) = img.at(x0 + x, y0 + y);
    if (shape == SelectionShape::circle) {
        // mean accumulated as offsets from a reference pixel, exact for constant interiors
        const double ref = out.at(size / 2, size / 2);
        double sum = 0.0;
        std::size_t n = 0;
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x)
                if (inside_inscribed_circle(x, y, size)) {
                    sum += out.at(x, y) - ref;
                    ++n;
                }
        const double fill = n ? ref + sum / static_cast<double>(n) : ref;
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x)
                if (!inside_inscribed_circle(x, y, size)) out.at(x, y) = fill;
    }
    return out;
}

inline GrayImage select_region(const GrayImage& img, SelectionShape shape, int size) {
    return select_region(img, shape, size, {img.width() / 2, img.height() / 2});
}

/// Circular shift of the sampling origin: out(x,y) = img(x+dx, y+dy) with periodic wrap.
inline GrayImage shift_origin(const GrayImage& img, int dx, int dy) {
    GrayImage out(img.width(), img.height());
    const int w = img.width();
    const int h = img.height();
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out.at(x, y) = img.at(((x + dx) % w + w) % w, ((y + dy) % h + h) % h);
    return out;
}

}  // namespace planesym
