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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "scenepaste/blending.hpp"
#include "scenepaste/color_adapt.hpp"
#include "scenepaste/error.hpp"

namespace scenepaste {

// Every knob of a generation run. File format is flat `key = value` text
// (identifier, `=`, scalar, optional `#` comment); unknown keys are hard
// errors so typos cannot silently fall back to defaults.
struct PipelineConfig {
    int instances_per_image = 5;
    double depth_min_m = 5.0;
    double depth_max_m = 60.0;
    double lane_prior_prob = 0.5;
    double lane_lateral_sigma_px = 15.0;
    int max_attempts_per_instance = 50;
    double occlusion_max_fraction = 0.5;     // reject when covered beyond this
    double freespace_min_fraction = 0.8;     // of the contact segment
    double freespace_contact_scale = 0.6;    // segment halfwidth as a fraction of box width/2
    HsvAdaptConfig hsv;
    BlendConfig blend;
    std::uint64_t seed = 0;
    bool allow_hflip = false;
    bool clip_occluded_boxes = false;
    std::map<std::string, int> class_ids;    // class_id_<category> = <id>

    // Poisson blending needs a one-pixel ring of background around the
    // paste box; placement validation reserves it up front.
    int bounds_margin() const { return blend.mode == BlendMode::poisson ? 1 : 0; }
};

namespace detail {

inline bool parse_bool(const std::string& text, const std::string& key) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError("key " + key + ": expected true/false, got `" + text + "`");
}

inline double parse_double(const std::string& text, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size())
            throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key " + key + ": expected a number, got `" + text + "`");
    }
}

inline long long parse_int(const std::string& text, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(text, &pos);
        if (pos != text.size())
            throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key " + key + ": expected an integer, got `" + text + "`");
    }
}

inline std::uint64_t parse_u64(const std::string& text, const std::string& key) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(text, &pos);
        if (pos != text.size() || text[0] == '-')
            throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key " + key + ": expected a non-negative integer, got `" + text +
                          "`");
    }
}

}  // namespace detail

inline void validate_config(const PipelineConfig& cfg) {
    if (cfg.instances_per_image < 0)
        throw ConfigError("instances_per_image must be >= 0");
    if (!(cfg.depth_min_m > 0.0) || !(cfg.depth_min_m <= cfg.depth_max_m))
        throw ConfigError("depth range invalid: require 0 < depth_min_m <= depth_max_m "
                          "(depth_min_m, depth_max_m)");
    if (cfg.lane_prior_prob < 0.0 || cfg.lane_prior_prob > 1.0)
        throw ConfigError("lane_prior_prob must be in [0,1]");
    if (cfg.lane_lateral_sigma_px < 0.0)
        throw ConfigError("lane_lateral_sigma_px must be >= 0");
    if (cfg.max_attempts_per_instance < 1)
        throw ConfigError("max_attempts_per_instance must be >= 1");
    if (cfg.occlusion_max_fraction < 0.0 || cfg.occlusion_max_fraction > 1.0)
        throw ConfigError("occlusion_max_fraction must be in [0,1]");
    if (cfg.freespace_min_fraction < 0.0 || cfg.freespace_min_fraction > 1.0)
        throw ConfigError("freespace_min_fraction must be in [0,1]");
    if (cfg.freespace_contact_scale < 0.0 || cfg.freespace_contact_scale > 1.0)
        throw ConfigError("freespace_contact_scale must be in [0,1]");
    if (!(cfg.hsv.scale_min > 0.0) || !(cfg.hsv.scale_min <= cfg.hsv.scale_max))
        throw ConfigError("hsv scale clamp invalid: require 0 < hsv_scale_min <= "
                          "hsv_scale_max (hsv_scale_min, hsv_scale_max)");
    if (cfg.blend.feather_sigma < 0.0)
        throw ConfigError("feather_sigma must be >= 0");
    if (!(cfg.blend.poisson_tol > 0.0))
        throw ConfigError("poisson_tol must be > 0");
    if (cfg.blend.poisson_max_iters < 1)
        throw ConfigError("poisson_max_iters must be >= 1");
    for (const auto& [cat, id] : cfg.class_ids)
        if (id < 0)
            throw ConfigError("class_id_" + cat + " must be >= 0");
}

inline PipelineConfig parse_config_text(const std::string& text,
                                        const std::string& origin = "<config>") {
    PipelineConfig cfg;
    std::istringstream in(text);
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
        const std::string at = origin + ":" + std::to_string(line_no);
        std::string eq, value;
        if (!(ls >> eq >> value) || eq != "=")
            throw ConfigError(at + ": expected `key = value`");
        std::string rest;
        if (ls >> rest)
            throw ConfigError(at + ": trailing content after value for key " + key);

        using detail::parse_bool;
        using detail::parse_double;
        using detail::parse_int;
        using detail::parse_u64;

        if (key == "instances_per_image")
            cfg.instances_per_image = static_cast<int>(parse_int(value, key));
        else if (key == "depth_min_m")
            cfg.depth_min_m = parse_double(value, key);
        else if (key == "depth_max_m")
            cfg.depth_max_m = parse_double(value, key);
        else if (key == "lane_prior_prob")
            cfg.lane_prior_prob = parse_double(value, key);
        else if (key == "lane_lateral_sigma_px")
            cfg.lane_lateral_sigma_px = parse_double(value, key);
        else if (key == "max_attempts_per_instance")
            cfg.max_attempts_per_instance = static_cast<int>(parse_int(value, key));
        else if (key == "occlusion_max_fraction")
            cfg.occlusion_max_fraction = parse_double(value, key);
        else if (key == "freespace_min_fraction")
            cfg.freespace_min_fraction = parse_double(value, key);
        else if (key == "freespace_contact_scale")
            cfg.freespace_contact_scale = parse_double(value, key);
        else if (key == "hsv_scale_min")
            cfg.hsv.scale_min = parse_double(value, key);
        else if (key == "hsv_scale_max")
            cfg.hsv.scale_max = parse_double(value, key);
        else if (key == "hsv_scale_direction") {
            if (value == "match_region")
                cfg.hsv.direction = HsvScaleDirection::match_region;
            else if (value == "instance_over_region")
                cfg.hsv.direction = HsvScaleDirection::instance_over_region;
            else
                throw ConfigError(at + ": unknown hsv_scale_direction `" + value +
                                  "` (valid: match_region, instance_over_region)");
        } else if (key == "blend_mode") {
            try {
                cfg.blend.mode = parse_blend_mode(value);
            } catch (const ConfigError& e) {
                throw ConfigError(at + ": " + e.what());
            }
        } else if (key == "feather_sigma")
            cfg.blend.feather_sigma = parse_double(value, key);
        else if (key == "poisson_tol")
            cfg.blend.poisson_tol = parse_double(value, key);
        else if (key == "poisson_max_iters")
            cfg.blend.poisson_max_iters = static_cast<int>(parse_int(value, key));
        else if (key == "seed")
            cfg.seed = parse_u64(value, key);
        else if (key == "allow_hflip")
            cfg.allow_hflip = parse_bool(value, key);
        else if (key == "clip_occluded_boxes")
            cfg.clip_occluded_boxes = parse_bool(value, key);
        else if (key.rfind("class_id_", 0) == 0 && key.size() > 9)
            cfg.class_ids[key.substr(9)] = static_cast<int>(parse_int(value, key));
        else
            throw ConfigError(at + ": unknown config key `" + key + "`");
    }
    validate_config(cfg);
    return cfg;
}

inline PipelineConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.string());
}

// Effective-config echo for the run manifest; key order is fixed.
inline nlohmann::ordered_json config_to_json(const PipelineConfig& cfg) {
    nlohmann::ordered_json j;
    j["instances_per_image"] = cfg.instances_per_image;
    j["depth_min_m"] = cfg.depth_min_m;
    j["depth_max_m"] = cfg.depth_max_m;
    j["lane_prior_prob"] = cfg.lane_prior_prob;
    j["lane_lateral_sigma_px"] = cfg.lane_lateral_sigma_px;
    j["max_attempts_per_instance"] = cfg.max_attempts_per_instance;
    j["occlusion_max_fraction"] = cfg.occlusion_max_fraction;
    j["freespace_min_fraction"] = cfg.freespace_min_fraction;
    j["freespace_contact_scale"] = cfg.freespace_contact_scale;
    j["hsv_scale_min"] = cfg.hsv.scale_min;
    j["hsv_scale_max"] = cfg.hsv.scale_max;
    j["hsv_scale_direction"] = cfg.hsv.direction == HsvScaleDirection::match_region
                                   ? "match_region"
                                   : "instance_over_region";
    j["blend_mode"] = blend_mode_name(cfg.blend.mode);
    j["feather_sigma"] = cfg.blend.feather_sigma;
    j["poisson_tol"] = cfg.blend.poisson_tol;
    j["poisson_max_iters"] = cfg.blend.poisson_max_iters;
    j["seed"] = cfg.seed;
    j["allow_hflip"] = cfg.allow_hflip;
    j["clip_occluded_boxes"] = cfg.clip_occluded_boxes;
    nlohmann::ordered_json classes = nlohmann::ordered_json::object();
    for (const auto& [cat, id] : cfg.class_ids)
        classes[cat] = id;
    j["class_ids"] = classes;
    return j;
}

// One-line-per-key reference printed by the CLI's --help.
inline std::string config_keys_help() {
    return
        "config keys (flat `key = value` lines, `#` comments):\n"
        "  instances_per_image        int >= 0, default 5\n"
        "  depth_min_m, depth_max_m   placement depth range in meters, default 5..60\n"
        "  lane_prior_prob            probability of lane-guided column sampling, default 0.5\n"
        "  lane_lateral_sigma_px      Gaussian jitter around the lane column, default 15\n"
        "  max_attempts_per_instance  rejection-sampling cap, default 50\n"
        "  occlusion_max_fraction     max allowed coverage by road users, default 0.5\n"
        "  freespace_min_fraction     required freespace share of the contact segment, default 0.8\n"
        "  freespace_contact_scale    contact segment halfwidth as a share of box halfwidth, default 0.6\n"
        "  hsv_scale_min, hsv_scale_max  clamp for saturation/value scales, default 0.5..2.0\n"
        "  hsv_scale_direction        match_region | instance_over_region, default match_region\n"
        "  blend_mode                 plain | gaussian | poisson, default poisson\n"
        "  feather_sigma              alpha feather sigma for gaussian mode, default 2.0\n"
        "  poisson_tol                solver max-norm residual stop, default 1e-4\n"
        "  poisson_max_iters          solver iteration cap, default 10000\n"
        "  seed                       global seed, default 0\n"
        "  allow_hflip                random horizontal cutout flip, default false\n"
        "  clip_occluded_boxes        shrink boxes hidden behind nearer pastes, default false\n"
        "  class_id_<category>        label id override per category (default: sorted order)\n";
}

}  // namespace scenepaste
