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

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "scenepaste/annotation_io.hpp"
#include "scenepaste/config.hpp"
#include "scenepaste/error.hpp"
#include "scenepaste/placement.hpp"
#include "scenepaste/png_io.hpp"
#include "scenepaste/preview.hpp"
#include "scenepaste/scene_context.hpp"

namespace scenepaste {

struct RunRequest {
    std::filesystem::path config_path;  // optional; defaults apply when empty
    std::filesystem::path backgrounds_dir;
    std::filesystem::path context_dir;
    std::filesystem::path masks_dir;
    std::filesystem::path manifest_path;  // bank manifest
    std::filesystem::path camera_path;    // optional global camera
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed;    // overrides the config key
    std::optional<int> count;             // output image limit; cycles bundles beyond the set
    int workers = 1;
    bool preview = false;
    bool provenance = false;
};

namespace detail {

struct Bundle {
    std::string name;
    ImageD image;
    SceneContext context;
};

inline std::string image_stem(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "aug_%06d", index);
    return buf;
}

// Bundle discovery: for NAME.png the context files are NAME.freespace.png,
// NAME.lanes.png, NAME.roadusers.txt; NAME.camera.txt overrides the global
// camera file when present.
inline std::vector<Bundle> load_bundles(const RunRequest& request, std::ostream& log) {
    std::vector<std::filesystem::path> backgrounds;
    for (const auto& entry : std::filesystem::directory_iterator(request.backgrounds_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".png")
            backgrounds.push_back(entry.path());
    std::sort(backgrounds.begin(), backgrounds.end());
    if (backgrounds.empty())
        throw LoadError("no .png backgrounds in " + request.backgrounds_dir.string());

    std::vector<Bundle> bundles;
    for (const auto& bg_path : backgrounds) {
        const std::string name = bg_path.stem().string();
        Bundle bundle;
        bundle.name = bg_path.filename().string();
        bundle.image = load_background(bg_path);

        std::filesystem::path camera = request.context_dir / (name + ".camera.txt");
        if (!std::filesystem::exists(camera)) {
            if (request.camera_path.empty())
                throw LoadError("no camera file for " + bundle.name +
                                ": pass --camera or provide " + camera.string());
            camera = request.camera_path;
        }
        bundle.context = load_context_with_size(
            bundle.image.width(), bundle.image.height(),
            request.context_dir / (name + ".freespace.png"),
            request.context_dir / (name + ".lanes.png"),
            request.context_dir / (name + ".roadusers.txt"), camera);
        for (const auto& warning : bundle.context.warnings)
            log << "warning: " << warning << "\n";
        bundles.push_back(std::move(bundle));
    }
    return bundles;
}

}  // namespace detail

struct RunSummary {
    int images = 0;
    long long accepted = 0;
    long long skipped = 0;
    long long attempts = 0;
    long long blend_warnings = 0;
    double wall_time_s = 0.0;
};

// Full generation run. All inputs are validated before any output is
// created; dataset jobs are long and late failures waste them. Returns the
// process exit status: 0 ok, 1 validation failure, 2 runtime I/O failure.
inline int run(const RunRequest& request, std::ostream& log,
               RunSummary* summary_out = nullptr) {
    namespace fs = std::filesystem;
    const auto start = std::chrono::steady_clock::now();

    PipelineConfig cfg;
    std::vector<detail::Bundle> bundles;
    std::optional<Bank> bank;
    try {
        if (!request.config_path.empty())
            cfg = parse_config(request.config_path);
        if (request.seed)
            cfg.seed = *request.seed;
        if (request.count && *request.count < 0)
            throw ConfigError("--count must be >= 0");
        if (request.workers < 1)
            throw ConfigError("--workers must be >= 1");
        auto require_dir = [](const char* flag, const fs::path& path) {
            if (!fs::is_directory(path))
                throw LoadError(std::string(flag) + " directory not found: " + path.string());
        };
        require_dir("--backgrounds", request.backgrounds_dir);
        require_dir("--context", request.context_dir);
        require_dir("--masks", request.masks_dir);
        if (!fs::is_regular_file(request.manifest_path))
            throw LoadError("bank manifest not found: " + request.manifest_path.string());
        if (!request.camera_path.empty() && !fs::is_regular_file(request.camera_path))
            throw LoadError("camera file not found: " + request.camera_path.string());

        bank.emplace(load_bank(request.masks_dir, request.manifest_path));
        bundles = detail::load_bundles(request, log);
    } catch (const Error& e) {
        log << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 1;
    }

    const int image_count =
        request.count ? *request.count : static_cast<int>(bundles.size());
    const auto class_table = build_class_table(cfg, *bank);

    try {
        fs::create_directories(request.out_dir / "images");
        fs::create_directories(request.out_dir / "labels");
        if (request.preview)
            fs::create_directories(request.out_dir / "previews");
        if (request.provenance)
            fs::create_directories(request.out_dir / "provenance");
    } catch (const fs::filesystem_error& e) {
        log << "error: cannot create output directories: " << e.what() << "\n";
        return 2;
    }

    std::vector<ImageManifestEntry> entries(static_cast<std::size_t>(image_count));
    std::atomic<int> next_index{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto process_one = [&](int index) {
        const detail::Bundle& bundle =
            bundles[static_cast<std::size_t>(index) % bundles.size()];
        AugmentedSample sample =
            augment_image(bundle.image, bundle.context, *bank, cfg, cfg.seed,
                          static_cast<std::uint64_t>(index), request.provenance);

        const std::string stem = detail::image_stem(index);
        write_png(request.out_dir / "images" / (stem + ".png"), to_u8(sample.image));
        write_labels(sample, class_table, request.out_dir / "labels" / (stem + ".txt"));
        if (request.preview)
            emit_preview(bundle.image, sample, request.out_dir / "previews" / (stem + ".png"));
        if (request.provenance) {
            RasterU8 mask(sample.provenance_mask.width(), sample.provenance_mask.height(), 1);
            for (std::size_t i = 0; i < mask.data().size(); ++i) {
                const std::int32_t v = sample.provenance_mask.data()[i];
                mask.data()[i] =
                    v < 0 ? 0 : static_cast<std::uint8_t>(std::min<std::int32_t>(v + 1, 255));
            }
            write_png(request.out_dir / "provenance" / (stem + ".png"), mask);
        }

        ImageManifestEntry entry;
        entry.index = index;
        entry.background = bundle.name;
        entry.global_seed = sample.global_seed;
        entry.image_index = sample.image_index;
        entry.stats = sample.stats;
        entries[static_cast<std::size_t>(index)] = std::move(entry);
    };

    auto worker = [&] {
        while (!failed.load()) {
            const int index = next_index.fetch_add(1);
            if (index >= image_count)
                return;
            try {
                process_one(index);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error)
                    first_error = std::current_exception();
                failed.store(true);
            }
        }
    };

    {
        std::vector<std::thread> pool;
        const int n_workers = std::max(1, std::min(request.workers, image_count > 0 ? image_count : 1));
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int i = 0; i < n_workers; ++i)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }

    if (first_error) {
        try {
            std::rethrow_exception(first_error);
        } catch (const std::exception& e) {
            log << "error: " << e.what() << "\n";
        }
        return 2;
    }

    RunSummary summary;
    summary.images = image_count;
    for (const auto& entry : entries) {
        summary.accepted += entry.stats.accepted;
        summary.skipped += entry.stats.skipped;
        summary.attempts += entry.stats.attempts;
        summary.blend_warnings += static_cast<long long>(entry.stats.blend_warnings.size());
    }
    summary.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    RunManifest manifest;
    manifest.config_echo = config_to_json(cfg);
    manifest.global_seed = cfg.seed;
    manifest.images = std::move(entries);
    manifest.wall_time_s = summary.wall_time_s;
    try {
        write_manifest(manifest, request.out_dir / "manifest.json");
    } catch (const IoError& e) {
        log << "error: " << e.what() << "\n";
        return 2;
    }

    const long long proposed = summary.accepted + summary.skipped;
    log << "images: " << summary.images << "\n"
        << "instances accepted: " << summary.accepted << " skipped: " << summary.skipped
        << "\n"
        << "mean attempts per instance: "
        << (proposed > 0 ? static_cast<double>(summary.attempts) / proposed : 0.0) << "\n"
        << "non-convergent blends: " << summary.blend_warnings << "\n"
        << "wall time: " << summary.wall_time_s << " s\n";
    if (summary_out)
        *summary_out = summary;
    return 0;
}

}  // namespace scenepaste
