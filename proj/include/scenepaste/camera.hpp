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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "scenepaste/error.hpp"

namespace scenepaste {

// Pinhole ground-plane model. Valid on flat ground only, i.e. wherever the
// freespace mask is; inputs are assumed rectified (no distortion model).

struct CameraIntrinsics {
    double fx = 0.0;  // focal length, pixels
    double fy = 0.0;
    double cx = 0.0;  // principal point, pixels
    double cy = 0.0;
};

struct CameraExtrinsics {
    double cam_height = 0.0;  // meters above the ground plane
};

struct Camera {
    CameraIntrinsics intrinsics;
    CameraExtrinsics extrinsics;
};

// Ground-contact image row of an object at distance d. Strictly decreasing
// in d and converging to the horizon row cy as d grows.
inline double row_from_distance(const CameraIntrinsics& intr, const CameraExtrinsics& extr,
                                double distance_m) {
    if (!(distance_m > 0.0))
        throw std::domain_error("row_from_distance: distance must be positive");
    return intr.fy * extr.cam_height / distance_m + intr.cy;
}

// Inverse of row_from_distance. Rows at or above the horizon have no
// ground-plane distance.
inline double distance_from_row(const CameraIntrinsics& intr, const CameraExtrinsics& extr,
                                double row) {
    if (!(row > intr.cy))
        throw std::domain_error("distance_from_row: row is at or above the horizon");
    return intr.fy * extr.cam_height / (row - intr.cy);
}

// Apparent pixel height of an object of real height h_real at distance d.
inline double pixel_height(const CameraIntrinsics& intr, double real_height_m,
                           double distance_m) {
    if (!(distance_m > 0.0))
        throw std::domain_error("pixel_height: distance must be positive");
    if (real_height_m < 0.0)
        throw std::domain_error("pixel_height: real height must be non-negative");
    return intr.fy * real_height_m / distance_m;
}

// Image column of a point offset laterally from the optical axis.
inline double column_from_lateral(const CameraIntrinsics& intr, double lateral_m,
                                  double distance_m) {
    if (!(distance_m > 0.0))
        throw std::domain_error("column_from_lateral: distance must be positive");
    return intr.fx * lateral_m / distance_m + intr.cx;
}

// Camera file: `key = value` lines with exactly fx, fy, cx, cy, cam_height;
// `#` starts a comment. Principal-point bounds against the paired image are
// checked later, at context load.
inline Camera parse_camera_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw LoadError("cannot open camera file " + path.string());

    std::map<std::string, double> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key))
            continue;
        std::string eq;
        double value = 0.0;
        if (!(ls >> eq >> value) || eq != "=")
            throw LoadError(path.string() + ":" + std::to_string(line_no) +
                            ": expected `key = value`");
        std::string rest;
        if (ls >> rest)
            throw LoadError(path.string() + ":" + std::to_string(line_no) +
                            ": trailing content after value");
        if (!values.emplace(key, value).second)
            throw LoadError(path.string() + ":" + std::to_string(line_no) +
                            ": duplicate key " + key);
    }

    static const char* const required[] = {"fx", "fy", "cx", "cy", "cam_height"};
    for (const char* key : required)
        if (!values.count(key))
            throw LoadError(path.string() + ": missing camera key " + key);
    for (const auto& [key, value] : values) {
        bool known = false;
        for (const char* k : required)
            known = known || key == k;
        if (!known)
            throw LoadError(path.string() + ": unknown camera key " + key);
        (void)value;
    }

    Camera cam;
    cam.intrinsics = CameraIntrinsics{values["fx"], values["fy"], values["cx"], values["cy"]};
    cam.extrinsics = CameraExtrinsics{values["cam_height"]};
    if (!(cam.intrinsics.fx > 0.0) || !(cam.intrinsics.fy > 0.0))
        throw LoadError(path.string() + ": fx and fy must be positive");
    if (cam.intrinsics.cx < 0.0 || cam.intrinsics.cy < 0.0)
        throw LoadError(path.string() + ": cx and cy must be non-negative");
    if (!(cam.extrinsics.cam_height > 0.0))
        throw LoadError(path.string() + ": cam_height must be positive");
    return cam;
}

}  // namespace scenepaste
