#pragma once

// PNG and TIFF input, 16-bit PNG output.

#include <png.h>
#include <tiffio.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "planesym/error.hpp"
#include "planesym/image.hpp"

namespace planesym {

/// Rec. 709 luminance of linear-scaled channel values.
constexpr double luminance(double r, double g, double b) { return 0.2126 * r + 0.7152 * g + 0.0722 * b; }

namespace detail {

struct RawRaster {
    int width = 0;
    int height = 0;
    int channels = 0;   // 1 gray, 2 gray+alpha, 3 rgb, 4 rgba
    int bit_depth = 0;  // 8 or 16
    std::vector<std::uint16_t> samples;  // row major, interleaved
    // decoder scratch
    std::vector<unsigned char> bytes;
    std::vector<unsigned char*> rows;
};

inline GrayImage to_gray(const RawRaster& raw, bool min_is_white = false) {
    const double scale = raw.bit_depth == 16 ? 65535.0 : 255.0;
    GrayImage img(raw.width, raw.height);
    const auto c = static_cast<std::size_t>(raw.channels);
    for (int y = 0; y < raw.height; ++y) {
        for (int x = 0; x < raw.width; ++x) {
            const std::size_t base = (static_cast<std::size_t>(y) * static_cast<std::size_t>(raw.width) +
                                      static_cast<std::size_t>(x)) * c;
            double v;
            if (raw.channels >= 3)
                v = luminance(raw.samples[base] / scale, raw.samples[base + 1] / scale, raw.samples[base + 2] / scale);
            else
                v = raw.samples[base] / scale;
            img.at(x, y) = min_is_white ? 1.0 - v : v;
        }
    }
    return img;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// Returns an empty string on success, otherwise the failure reason.
inline std::string read_png_raw(std::FILE* fp, RawRaster* out) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) return "cannot allocate PNG reader";
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        return "cannot allocate PNG info";
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        return "corrupt PNG data";
    }
    png_init_io(png, fp);
    png_read_info(png, info);
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) {
        png_set_palette_to_rgb(png);
    } else if (depth != 8 && depth != 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        return depth == 1 ? "unsupported PNG bit depth 1" : depth == 2 ? "unsupported PNG bit depth 2"
                                                                     : "unsupported PNG bit depth 4";
    }
    png_read_update_info(png, info);
    out->width = static_cast<int>(png_get_image_width(png, info));
    out->height = static_cast<int>(png_get_image_height(png, info));
    out->channels = png_get_channels(png, info);
    out->bit_depth = png_get_bit_depth(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    auto& buf = out->bytes;
    auto& rows = out->rows;
    buf.resize(rowbytes * static_cast<std::size_t>(out->height));
    rows.resize(static_cast<std::size_t>(out->height));
    for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = buf.data() + r * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    const std::size_t n = static_cast<std::size_t>(out->width) * static_cast<std::size_t>(out->height) *
                          static_cast<std::size_t>(out->channels);
    out->samples.resize(n);
    if (out->bit_depth == 16) {
        for (std::size_t i = 0; i < n; ++i)
            out->samples[i] = static_cast<std::uint16_t>((buf[2 * i] << 8) | buf[2 * i + 1]);
    } else {
        for (std::size_t i = 0; i < n; ++i) out->samples[i] = buf[i];
    }
    buf.clear();
    buf.shrink_to_fit();
    rows.clear();
    return {};
}

inline void silence_tiff_warnings() {
    static const bool once = [] {
        TIFFSetWarningHandler(nullptr);
        TIFFSetErrorHandler(nullptr);
        return true;
    }();
    (void)once;
}

inline GrayImage read_tiff(const std::string& path) {
    silence_tiff_warnings();
    std::unique_ptr<TIFF, void (*)(TIFF*)> tif(TIFFOpen(path.c_str(), "r"), TIFFClose);
    if (!tif) throw IoError("cannot read TIFF file " + path);
    std::uint32_t w = 0, h = 0;
    std::uint16_t bps = 0, spp = 1, photometric = PHOTOMETRIC_MINISBLACK, planar = PLANARCONFIG_CONTIG;
    TIFFGetField(tif.get(), TIFFTAG_IMAGEWIDTH, &w);
    TIFFGetField(tif.get(), TIFFTAG_IMAGELENGTH, &h);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_BITSPERSAMPLE, &bps);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLESPERPIXEL, &spp);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_PHOTOMETRIC, &photometric);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_PLANARCONFIG, &planar);
    if (bps != 8 && bps != 16) throw IoError("unsupported TIFF bit depth " + std::to_string(bps));
    if (planar != PLANARCONFIG_CONTIG) throw IoError("planar-separate TIFF is not supported");
    if (spp < 1 || spp > 4) throw IoError("unsupported TIFF channel count");

    RawRaster raw;
    raw.width = static_cast<int>(w);
    raw.height = static_cast<int>(h);
    raw.channels = spp;
    raw.bit_depth = bps;
    raw.samples.resize(static_cast<std::size_t>(w) * h * spp);
    std::vector<std::uint8_t> line(static_cast<std::size_t>(TIFFScanlineSize(tif.get())));
    for (std::uint32_t y = 0; y < h; ++y) {
        if (TIFFReadScanline(tif.get(), line.data(), y) < 0) throw IoError("corrupt TIFF scanline in " + path);
        const std::size_t base = static_cast<std::size_t>(y) * w * spp;
        for (std::size_t i = 0; i < static_cast<std::size_t>(w) * spp; ++i) {
            if (bps == 16) {
                std::uint16_t v;
                std::memcpy(&v, line.data() + 2 * i, 2);
                raw.samples[base + i] = v;
            } else {
                raw.samples[base + i] = line[i];
            }
        }
    }
    return to_gray(raw, photometric == PHOTOMETRIC_MINISWHITE);
}

}  // namespace detail

/// Loads an 8- or 16-bit PNG or TIFF, collapsing RGB to luminance, scaled to [0,1].
inline GrayImage load_image(const std::string& path) {
    std::array<unsigned char, 8> sig{};
    {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open image file " + path);
        in.read(reinterpret_cast<char*>(sig.data()), sig.size());
        if (in.gcount() < 4) throw IoError("file too short to be an image: " + path);
    }
    if (png_sig_cmp(sig.data(), 0, 8) == 0) {
        detail::FilePtr fp(std::fopen(path.c_str(), "rb"));
        if (!fp) throw IoError("cannot open image file " + path);
        detail::RawRaster raw;
        const std::string err = detail::read_png_raw(fp.get(), &raw);
        if (!err.empty()) throw IoError(err + ": " + path);
        return detail::to_gray(raw);
    }
    const bool tiff_le = sig[0] == 'I' && sig[1] == 'I' && sig[2] == 42 && sig[3] == 0;
    const bool tiff_be = sig[0] == 'M' && sig[1] == 'M' && sig[2] == 0 && sig[3] == 42;
    if (tiff_le || tiff_be) return detail::read_tiff(path);
    throw IoError("unrecognized image format (expected PNG or TIFF): " + path);
}

namespace detail {

inline std::uint16_t quantize16(double v) {
    return static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0));
}

inline std::string write_png_raw(std::FILE* fp, int width, int height, int channels, int bit_depth,
                                 const std::vector<png_byte>* buf) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) return "cannot allocate PNG writer";
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        return "cannot allocate PNG info";
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        return "PNG encoding failed";
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth,
                 channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::size_t rowbytes =
        static_cast<std::size_t>(width) * static_cast<std::size_t>(bit_depth / 8) * static_cast<std::size_t>(channels);
    for (int y = 0; y < height; ++y)
        png_write_row(png, const_cast<png_bytep>(buf->data() + static_cast<std::size_t>(y) * rowbytes));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return {};
}

/// Writes gray (1 channel) or RGB (3 channel) samples at 8 or 16 bits per sample.
inline void write_png_samples(const std::string& path, int width, int height, int channels, int bit_depth,
                              const std::vector<std::uint16_t>& samples) {
    std::vector<png_byte> buf;
    if (bit_depth == 16) {
        buf.resize(samples.size() * 2);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            buf[2 * i] = static_cast<png_byte>(samples[i] >> 8);
            buf[2 * i + 1] = static_cast<png_byte>(samples[i] & 0xff);
        }
    } else {
        buf.resize(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) buf[i] = static_cast<png_byte>(samples[i]);
    }
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot write " + path);
    const std::string err = write_png_raw(fp.get(), width, height, channels, bit_depth, &buf);
    if (!err.empty()) throw IoError(err + ": " + path);
}

}  // namespace detail

/// Writes a 16-bit grayscale PNG; values are clamped to [0,1].
inline void write_png16(const std::string& path, const GrayImage& img) {
    std::vector<std::uint16_t> samples(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) samples[i] = detail::quantize16(img.pixels()[i]);
    detail::write_png_samples(path, img.width(), img.height(), 1, 16, samples);
}

/// 16-bit grayscale TIFF writer, mainly for round-trip tests and interop.
inline void write_tiff16(const std::string& path, const GrayImage& img) {
    detail::silence_tiff_warnings();
    std::unique_ptr<TIFF, void (*)(TIFF*)> tif(TIFFOpen(path.c_str(), "w"), TIFFClose);
    if (!tif) throw IoError("cannot write " + path);
    TIFFSetField(tif.get(), TIFFTAG_IMAGEWIDTH, static_cast<std::uint32_t>(img.width()));
    TIFFSetField(tif.get(), TIFFTAG_IMAGELENGTH, static_cast<std::uint32_t>(img.height()));
    TIFFSetField(tif.get(), TIFFTAG_BITSPERSAMPLE, 16);
    TIFFSetField(tif.get(), TIFFTAG_SAMPLESPERPIXEL, 1);
    TIFFSetField(tif.get(), TIFFTAG_PHOTOMETRIC, PHOTOMETRIC_MINISBLACK);
    TIFFSetField(tif.get(), TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
    std::vector<std::uint16_t> row(static_cast<std::size_t>(img.width()));
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) row[static_cast<std::size_t>(x)] = detail::quantize16(img.at(x, y));
        if (TIFFWriteScanline(tif.get(), row.data(), static_cast<std::uint32_t>(y), 0) < 0)
            throw IoError("TIFF encoding failed: " + path);
    }
}

}  // namespace planesym
