// Copyright 2026 The scenepaste Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <png.h>

#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "scenepaste/error.hpp"
#include "scenepaste/raster.hpp"

namespace scenepaste {

namespace detail {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace detail

// Decodes an 8-bit PNG. Palette images expand to RGB, sub-8-bit gray expands
// to 8 bits, tRNS becomes an alpha channel, 16-bit files are reduced. The
// returned raster has 1 (gray), 2 (gray+alpha), 3 (RGB) or 4 (RGBA) channels.
inline RasterU8 read_png(const std::filesystem::path& path) {
    detail::FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp)
        throw LoadError("cannot open " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw LoadError("libpng init failed for " + path.string());
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw LoadError("libpng init failed for " + path.string());
    }

    std::vector<png_bytep> rows;
    RasterU8 out;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw LoadError("failed to decode PNG " + path.string());
    }

    png_init_io(png, fp.get());
    png_read_info(png, info);

    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_tRNS_to_alpha(png);
    png_set_strip_16(png);
    png_read_update_info(png, info);

    const int width = static_cast<int>(png_get_image_width(png, info));
    const int height = static_cast<int>(png_get_image_height(png, info));
    const int channels = png_get_channels(png, info);

    out = RasterU8(width, height, channels);
    rows.resize(height);
    for (int y = 0; y < height; ++y)
        rows[static_cast<std::size_t>(y)] = out.data().data() + out.index(0, y, 0);

    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

// Encodes an 8-bit PNG with 1, 3 or 4 channels. Encoder settings are fixed
// so repeated runs emit identical bytes.
inline void write_png(const std::filesystem::path& path, const RasterU8& image) {
    int color_type = 0;
    switch (image.channels()) {
        case 1: color_type = PNG_COLOR_TYPE_GRAY; break;
        case 3: color_type = PNG_COLOR_TYPE_RGB; break;
        case 4: color_type = PNG_COLOR_TYPE_RGBA; break;
        default:
            throw IoError("unsupported channel count " + std::to_string(image.channels()) +
                          " for PNG write " + path.string());
    }

    detail::FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp)
        throw IoError("cannot open for writing: " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw IoError("libpng init failed for " + path.string());
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng init failed for " + path.string());
    }

    std::vector<png_bytep> rows(image.height());
    // data() is const-safe here: libpng only reads the row pointers on write.
    auto* base = const_cast<std::uint8_t*>(image.data().data());
    for (int y = 0; y < image.height(); ++y)
        rows[static_cast<std::size_t>(y)] = base + image.index(0, y, 0);

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("failed to encode PNG " + path.string());
    }

    png_init_io(png, fp.get());
    png_set_compression_level(png, 6);
    png_set_IHDR(png, info, image.width(), image.height(), 8, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// Background images arrive as gray, RGB or RGBA files and normalize to RGB.
inline ImageD load_background(const std::filesystem::path& path) {
    RasterU8 raw = read_png(path);
    ImageD out(raw.width(), raw.height(), 3);
    for (int y = 0; y < raw.height(); ++y) {
        for (int x = 0; x < raw.width(); ++x) {
            double r, g, b;
            switch (raw.channels()) {
                case 1:
                case 2:
                    r = g = b = raw.at(x, y, 0) / 255.0;
                    break;
                default:
                    r = raw.at(x, y, 0) / 255.0;
                    g = raw.at(x, y, 1) / 255.0;
                    b = raw.at(x, y, 2) / 255.0;
                    break;
            }
            out.at(x, y, 0) = r;
            out.at(x, y, 1) = g;
            out.at(x, y, 2) = b;
        }
    }
    return out;
}

// Strict single-channel load for freespace masks and lane maps.
inline RasterU8 load_gray(const std::filesystem::path& path) {
    RasterU8 raw = read_png(path);
    if (raw.channels() != 1)
        throw LoadError("expected single-channel PNG: " + path.string() + " has " +
                        std::to_string(raw.channels()) + " channels");
    return raw;
}

// Cutouts must carry an alpha channel; gray+alpha files expand to RGBA.
inline ImageD load_rgba(const std::filesystem::path& path) {
    RasterU8 raw = read_png(path);
    if (raw.channels() != 4 && raw.channels() != 2)
        throw LoadError("expected PNG with alpha channel: " + path.string());
    ImageD out(raw.width(), raw.height(), 4);
    for (int y = 0; y < raw.height(); ++y) {
        for (int x = 0; x < raw.width(); ++x) {
            if (raw.channels() == 2) {
                const double v = raw.at(x, y, 0) / 255.0;
                out.at(x, y, 0) = v;
                out.at(x, y, 1) = v;
                out.at(x, y, 2) = v;
                out.at(x, y, 3) = raw.at(x, y, 1) / 255.0;
            } else {
                for (int c = 0; c < 4; ++c)
                    out.at(x, y, c) = raw.at(x, y, c) / 255.0;
            }
        }
    }
    return out;
}

}  // namespace scenepaste
