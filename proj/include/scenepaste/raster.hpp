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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "scenepaste/error.hpp"

namespace scenepaste {

struct PixelPoint {
    int x = 0;
    int y = 0;

    friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

// Half-open pixel rectangle [x1, x2) x [y1, y2). Width is x2 - x1, so the
// integer corners line up with the normalized center/size label convention.
struct PixelBox {
    int x1 = 0;
    int y1 = 0;
    int x2 = 0;
    int y2 = 0;

    int width() const { return x2 - x1; }
    int height() const { return y2 - y1; }
    std::int64_t area() const { return static_cast<std::int64_t>(width()) * height(); }
    bool valid() const { return x1 < x2 && y1 < y2; }

    bool contains(const PixelPoint& p) const {
        return p.x >= x1 && p.x < x2 && p.y >= y1 && p.y < y2;
    }

    PixelBox intersect(const PixelBox& o) const {
        return PixelBox{std::max(x1, o.x1), std::max(y1, o.y1),
                        std::min(x2, o.x2), std::min(y2, o.y2)};
    }

    friend bool operator==(const PixelBox&, const PixelBox&) = default;
};

// Row-major interleaved raster with a runtime channel count.
template <typename T>
class Raster {
public:
    Raster() = default;

    Raster(int width, int height, int channels, T fill = T{})
        : width_(width), height_(height), channels_(channels),
          data_(static_cast<std::size_t>(width) * height * channels, fill) {
        if (width <= 0 || height <= 0 || channels <= 0)
            throw Error("raster dimensions must be positive");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    bool empty() const { return data_.empty(); }

    std::size_t index(int x, int y, int c = 0) const {
        return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
    }

    T& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
    const T& at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    bool same_shape(const Raster& o) const {
        return width_ == o.width_ && height_ == o.height_ && channels_ == o.channels_;
    }

    PixelBox bounds() const { return PixelBox{0, 0, width_, height_}; }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<T> data_;
};

using RasterU8 = Raster<std::uint8_t>;
using ImageD = Raster<double>;

// Rasterization rounding rule: round half up.
inline int round_half_up(double v) {
    return static_cast<int>(std::floor(v + 0.5));
}

inline double clamp01(double v) {
    return std::clamp(v, 0.0, 1.0);
}

inline std::uint8_t quantize8(double v) {
    return static_cast<std::uint8_t>(round_half_up(clamp01(v) * 255.0));
}

inline ImageD to_unit(const RasterU8& src) {
    ImageD out(src.width(), src.height(), src.channels());
    for (std::size_t i = 0; i < src.data().size(); ++i)
        out.data()[i] = src.data()[i] / 255.0;
    return out;
}

inline RasterU8 to_u8(const ImageD& src) {
    RasterU8 out(src.width(), src.height(), src.channels());
    for (std::size_t i = 0; i < src.data().size(); ++i)
        out.data()[i] = quantize8(src.data()[i]);
    return out;
}

template <typename T>
Raster<T> flip_horizontal(const Raster<T>& src) {
    Raster<T> out(src.width(), src.height(), src.channels());
    for (int y = 0; y < src.height(); ++y)
        for (int x = 0; x < src.width(); ++x)
            for (int c = 0; c < src.channels(); ++c)
                out.at(x, y, c) = src.at(src.width() - 1 - x, y, c);
    return out;
}

}  // namespace scenepaste
