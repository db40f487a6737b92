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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenepaste/config.hpp"
#include "scenepaste/error.hpp"
#include "scenepaste/instance_bank.hpp"
#include "scenepaste/placement.hpp"

namespace scenepaste {

// One detector-ready label: class id plus box center/size normalized by the
// image dimensions.
struct LabelRecord {
    int class_id = 0;
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;
};

// Category ids come from config overrides; categories without an override
// are numbered in sorted order starting past the largest override. With no
// overrides, sorted categories map to 0..n-1.
inline std::map<std::string, int> build_class_table(const PipelineConfig& cfg,
                                                    const Bank& bank) {
    std::map<std::string, int> table = cfg.class_ids;
    int next_id = 0;
    for (const auto& [cat, id] : table)
        next_id = std::max(next_id, id + 1);
    for (const auto& cat : bank.categories())
        if (!table.count(cat))
            table[cat] = next_id++;
    return table;
}

inline LabelRecord make_label(const Annotation& ann, const std::map<std::string, int>& table,
                              int image_width, int image_height) {
    const auto it = table.find(ann.category);
    if (it == table.end())
        throw Error("category `" + ann.category + "` missing from class table");
    LabelRecord rec;
    rec.class_id = it->second;
    rec.cx = (ann.box.x1 + ann.box.x2) / 2.0 / image_width;
    rec.cy = (ann.box.y1 + ann.box.y2) / 2.0 / image_height;
    rec.w = static_cast<double>(ann.box.width()) / image_width;
    rec.h = static_cast<double>(ann.box.height()) / image_height;
    if (rec.cx < 0.0 || rec.cx > 1.0 || rec.cy < 0.0 || rec.cy > 1.0 || rec.w <= 0.0 ||
        rec.w > 1.0 || rec.h <= 0.0 || rec.h > 1.0)
        throw Error("annotation box outside image for category " + ann.category);
    return rec;
}

// Six-decimal fixed point keeps label bytes identical across platforms.
inline std::string format_label_line(const LabelRecord& rec) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%d %.6f %.6f %.6f %.6f\n", rec.class_id, rec.cx, rec.cy,
                  rec.w, rec.h);
    return buf;
}

// One line per annotation, in paste order. Parsing a line back and
// denormalizing recovers the pixel box within half a pixel per coordinate.
inline void write_labels(const AugmentedSample& sample,
                         const std::map<std::string, int>& class_table,
                         const std::filesystem::path& out_path) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out)
        throw IoError("cannot write label file " + out_path.string());
    for (const auto& ann : sample.annotations)
        out << format_label_line(
            make_label(ann, class_table, sample.image.width(), sample.image.height()));
    if (!out)
        throw IoError("failed writing label file " + out_path.string());
}

struct ImageManifestEntry {
    int index = 0;
    std::string background;
    std::uint64_t global_seed = 0;
    std::uint64_t image_index = 0;
    ImageStats stats;
};

struct RunManifest {
    nlohmann::ordered_json config_echo;
    std::uint64_t global_seed = 0;
    std::vector<ImageManifestEntry> images;
    double wall_time_s = 0.0;
};

inline nlohmann::ordered_json manifest_to_json(const RunManifest& manifest) {
    nlohmann::ordered_json j;
    j["config"] = manifest.config_echo;
    j["global_seed"] = manifest.global_seed;

    long long accepted = 0, skipped = 0, attempts = 0, warnings = 0;
    nlohmann::ordered_json images = nlohmann::ordered_json::array();
    for (const auto& entry : manifest.images) {
        nlohmann::ordered_json e;
        e["index"] = entry.index;
        e["background"] = entry.background;
        e["seed_record"] = {entry.global_seed, entry.image_index};
        e["accepted"] = entry.stats.accepted;
        e["skipped"] = entry.stats.skipped;
        e["attempts"] = entry.stats.attempts;
        e["hsv_skips"] = entry.stats.hsv_skips;
        nlohmann::ordered_json warn = nlohmann::ordered_json::array();
        for (const auto& w : entry.stats.blend_warnings) {
            warn.push_back({{"instance", w.instance},
                            {"channel", w.channel},
                            {"iterations", w.iterations},
                            {"final_residual", w.final_residual}});
        }
        e["blend_warnings"] = warn;
        images.push_back(std::move(e));
        accepted += entry.stats.accepted;
        skipped += entry.stats.skipped;
        attempts += entry.stats.attempts;
        warnings += static_cast<long long>(entry.stats.blend_warnings.size());
    }
    j["images"] = images;

    nlohmann::ordered_json totals;
    totals["images"] = manifest.images.size();
    totals["accepted"] = accepted;
    totals["skipped"] = skipped;
    totals["attempts"] = attempts;
    totals["blend_warnings"] = warnings;
    j["totals"] = totals;
    j["wall_time_s"] = manifest.wall_time_s;
    return j;
}

inline void write_manifest(const RunManifest& manifest, const std::filesystem::path& out_path) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out)
        throw IoError("cannot write manifest " + out_path.string());
    out << manifest_to_json(manifest).dump(2) << "\n";
    if (!out)
        throw IoError("failed writing manifest " + out_path.string());
}

}  // namespace scenepaste
