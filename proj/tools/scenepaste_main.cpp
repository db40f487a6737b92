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

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "scenepaste/config.hpp"
#include "scenepaste/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"scenepaste: context-aware copy-paste image augmentation for "
                 "rare-object detection datasets"};
    app.footer(scenepaste::config_keys_help() +
               "\nflags override config-file keys; exit codes: 0 success, "
               "1 validation failure, 2 runtime I/O failure");

    scenepaste::RunRequest request;
    std::string config, backgrounds, context, masks, manifest, camera, out;
    std::uint64_t seed = 0;
    int count = 0;

    app.add_option("--config", config, "pipeline config file (flat key = value)");
    app.add_option("--backgrounds", backgrounds, "directory of background .png images")
        ->required();
    app.add_option("--context", context,
                   "directory of NAME.freespace.png / NAME.lanes.png / NAME.roadusers.txt")
        ->required();
    app.add_option("--masks", masks, "directory of cutout RGBA .png files")->required();
    app.add_option("--manifest", manifest,
                   "bank manifest: `<path> <category> <h_min> <h_max>` per line")
        ->required();
    app.add_option("--camera", camera,
                   "global camera file (NAME.camera.txt in --context overrides per image)");
    app.add_option("--out", out, "output directory")->required();
    auto* seed_opt = app.add_option("--seed", seed, "global seed override");
    auto* count_opt =
        app.add_option("--count", count, "number of images to generate (cycles backgrounds)");
    app.add_option("--workers", request.workers, "concurrent image workers")
        ->default_val(1);
    app.add_flag("--preview", request.preview, "write side-by-side preview images");
    app.add_flag("--provenance", request.provenance,
                 "write per-pixel paste-order masks (instrumentation)");

    CLI11_PARSE(app, argc, argv);

    request.config_path = config;
    request.backgrounds_dir = backgrounds;
    request.context_dir = context;
    request.masks_dir = masks;
    request.manifest_path = manifest;
    request.camera_path = camera;
    request.out_dir = out;
    if (!seed_opt->empty())
        request.seed = seed;
    if (!count_opt->empty())
        request.count = count;

    return scenepaste::run(request, std::cout);
}
