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
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scenepaste/blending.hpp"
#include "scenepaste/camera.hpp"
#include "scenepaste/color_adapt.hpp"
#include "scenepaste/config.hpp"
#include "scenepaste/instance_bank.hpp"
#include "scenepaste/raster.hpp"
#include "scenepaste/rng.hpp"
#include "scenepaste/scene_context.hpp"

namespace scenepaste {

// A validated decision for one cutout: ground-contact pixel, depth, the
// exact pixel height from the camera model, and the resulting paste box.
struct Placement {
    double depth_m = 0.0;
    PixelPoint contact;   // x = column, y = ground-contact row
    double height_px = 0.0;
    std::string cutout_ref;
    PixelBox box;
};

struct ProposeOutcome {
    bool accepted = false;
    Placement placement;
    PlacementReason reason = PlacementReason::ok;
};

struct Annotation {
    std::string category;
    PixelBox box;
};

struct BlendWarning {
    int instance = 0;  // instance slot within the image
    int channel = 0;
    int iterations = 0;
    double final_residual = 0.0;
};

struct ImageStats {
    int accepted = 0;
    int skipped = 0;
    int attempts = 0;
    int hsv_skips = 0;
    std::vector<BlendWarning> blend_warnings;
};

struct AugmentedSample {
    ImageD image;  // RGB
    std::vector<Annotation> annotations;   // paste order (far to near)
    std::vector<Placement> placements;     // same order as annotations source
    std::uint64_t global_seed = 0;
    std::uint64_t image_index = 0;
    ImageStats stats;
    // Paste-sequence id per pixel covered by an opaque paste, -1 elsewhere.
    // Populated in instrumented runs only.
    Raster<std::int32_t> provenance_mask;
    bool has_provenance_mask = false;
};

inline double sample_depth(const PipelineConfig& cfg, RandomStream& rng) {
    return rng.uniform(cfg.depth_min_m, cfg.depth_max_m);
}

// One placement proposal: depth, contact row from the ground-plane model,
// lane-prior or freespace column, height from the real-height draw, then
// full constraint validation. Rejections are values, not errors. The draw
// order (depth, branch, column [, jitter], real height) is fixed; altering
// it changes every downstream image.
inline ProposeOutcome propose_placement(const SceneContext& ctx, const InstanceCutout& cutout,
                                        const PipelineConfig& cfg, RandomStream& rng) {
    const double depth = sample_depth(cfg, rng);
    const int row = round_half_up(row_from_distance(ctx.intrinsics, ctx.extrinsics, depth));

    const bool lane_branch = rng.bernoulli(cfg.lane_prior_prob);
    const bool row_in_image = row >= 0 && row < ctx.height;

    int col = 0;
    bool have_col = false;
    if (lane_branch && row_in_image) {
        const auto lane_cols = lane_columns_at_row(ctx, row);
        if (!lane_cols.empty()) {
            const auto pick = lane_cols[rng.next_below(lane_cols.size())];
            const double jitter = rng.normal() * cfg.lane_lateral_sigma_px;
            col = round_half_up(pick.first + jitter);
            have_col = true;
        }
    }
    if (!have_col) {
        std::vector<int> free_cols;
        if (row_in_image)
            for (int x = 0; x < ctx.width; ++x)
                if (ctx.freespace.at(x, row) != 0)
                    free_cols.push_back(x);
        if (free_cols.empty())
            return ProposeOutcome{false, {}, PlacementReason::off_freespace};
        col = free_cols[rng.next_below(free_cols.size())];
    }

    const double h_real = rng.uniform(cutout.h_real_min, cutout.h_real_max);
    const double h_px = pixel_height(ctx.intrinsics, h_real, depth);
    const auto [w_i, h_i] = scaled_dims(cutout, std::max(1, round_half_up(h_px)));

    PixelBox box;
    box.x1 = col - w_i / 2;
    box.x2 = box.x1 + w_i;
    box.y2 = row + 1;  // bottom row of the box is the contact row
    box.y1 = box.y2 - h_i;

    const PixelPoint contact{col, row};
    const PlacementVerdict verdict = validate_placement(ctx, box, contact, cfg);
    if (!verdict.accepted)
        return ProposeOutcome{false, {}, verdict.reason};
    return ProposeOutcome{true,
                          Placement{depth, contact, h_px, cutout.source_id, box},
                          PlacementReason::ok};
}

namespace detail {

inline PixelBox tight_box_of_alpha(const Raster<double>& alpha) {
    PixelBox tight{alpha.width(), alpha.height(), 0, 0};
    for (int y = 0; y < alpha.height(); ++y)
        for (int x = 0; x < alpha.width(); ++x)
            if (alpha.at(x, y) > 0.0) {
                tight.x1 = std::min(tight.x1, x);
                tight.y1 = std::min(tight.y1, y);
                tight.x2 = std::max(tight.x2, x + 1);
                tight.y2 = std::max(tight.y2, y + 1);
            }
    return tight;
}

}  // namespace detail

// Generates one augmented sample. Per-image randomness derives from
// hash(global_seed, image_index) and per-instance streams split from it, so
// results do not depend on worker scheduling. Accepted placements paste far
// to near; nearer objects overdraw farther ones.
inline AugmentedSample augment_image(const ImageD& background, const SceneContext& ctx,
                                     const Bank& bank, const PipelineConfig& cfg,
                                     std::uint64_t global_seed, std::uint64_t image_index,
                                     bool record_provenance = false) {
    AugmentedSample sample;
    sample.image = background;
    sample.global_seed = global_seed;
    sample.image_index = image_index;

    const RandomStream image_stream(RandomStream::mix(global_seed, image_index));

    struct Accepted {
        Placement placement;
        InstanceCutout cutout;  // pre-resize, flip already applied
        int instance_index = 0;
    };
    std::vector<Accepted> accepted;

    for (int i = 0; i < cfg.instances_per_image; ++i) {
        RandomStream stream = image_stream.child(static_cast<std::uint64_t>(i));
        InstanceCutout working = sample_cutout(bank, stream);
        if (cfg.allow_hflip && stream.bernoulli(0.5))
            working = hflip_cutout(working);

        bool placed = false;
        for (int attempt = 0; attempt < cfg.max_attempts_per_instance; ++attempt) {
            ++sample.stats.attempts;
            ProposeOutcome outcome = propose_placement(ctx, working, cfg, stream);
            if (outcome.accepted) {
                accepted.push_back(Accepted{outcome.placement, std::move(working), i});
                placed = true;
                break;
            }
        }
        placed ? ++sample.stats.accepted : ++sample.stats.skipped;
    }

    std::stable_sort(accepted.begin(), accepted.end(),
                     [](const Accepted& a, const Accepted& b) {
                         return a.placement.depth_m > b.placement.depth_m;
                     });

    const bool track_coverage = record_provenance || cfg.clip_occluded_boxes;
    Raster<std::int32_t> coverage;
    if (track_coverage)
        coverage = Raster<std::int32_t>(background.width(), background.height(), 1, -1);

    struct Pasted {
        std::string category;
        PixelBox tight_box;
        Raster<double> alpha;  // kept only when boxes may be clipped
    };
    std::vector<Pasted> pasted;

    for (std::size_t k = 0; k < accepted.size(); ++k) {
        const Accepted& rec = accepted[k];
        const PixelBox& box = rec.placement.box;
        const PixelPoint top_left{box.x1, box.y1};

        InstanceCutout resized = resize_cutout(rec.cutout, box.height());
        const RegionStats region = region_stats(sample.image, box);
        HsvAdaptInfo info;
        InstanceCutout adapted = adapt_cutout_hsv(resized, region, cfg.hsv, &info);
        sample.stats.hsv_skips += (info.s_skipped ? 1 : 0) + (info.v_skipped ? 1 : 0);

        Raster<double> alpha = cutout_alpha(adapted);
        switch (cfg.blend.mode) {
            case BlendMode::plain:
                alpha_composite_into(sample.image, adapted, top_left);
                break;
            case BlendMode::gaussian: {
                alpha = feather_alpha(alpha, cfg.blend.feather_sigma);
                alpha_composite_into(sample.image, adapted, top_left, &alpha);
                break;
            }
            case BlendMode::poisson: {
                const BlendOutcome outcome =
                    poisson_blend_into(sample.image, adapted, top_left, cfg.blend);
                for (int c = 0; c < 3; ++c) {
                    const auto& st = outcome.channels[static_cast<std::size_t>(c)];
                    if (!st.converged)
                        sample.stats.blend_warnings.push_back(BlendWarning{
                            rec.instance_index, c, st.iterations, st.final_residual});
                }
                break;
            }
        }

        const PixelBox local_tight = detail::tight_box_of_alpha(alpha);
        const PixelBox tight{box.x1 + local_tight.x1, box.y1 + local_tight.y1,
                             box.x1 + local_tight.x2, box.y1 + local_tight.y2};

        if (track_coverage)
            for (int y = 0; y < alpha.height(); ++y)
                for (int x = 0; x < alpha.width(); ++x)
                    if (alpha.at(x, y) >= 0.5)
                        coverage.at(box.x1 + x, box.y1 + y) = static_cast<std::int32_t>(k);

        sample.placements.push_back(rec.placement);
        pasted.push_back(Pasted{rec.cutout.category, tight,
                                cfg.clip_occluded_boxes ? std::move(alpha) : Raster<double>()});
    }

    // Annotations are recorded after all pasting so nearer instances can
    // clip farther ones when that is enabled.
    for (std::size_t k = 0; k < pasted.size(); ++k) {
        const Pasted& p = pasted[k];
        if (!cfg.clip_occluded_boxes) {
            sample.annotations.push_back(Annotation{p.category, p.tight_box});
            continue;
        }
        const PixelBox& box = accepted[k].placement.box;
        PixelBox visible{background.width(), background.height(), 0, 0};
        bool any = false;
        for (int y = 0; y < p.alpha.height(); ++y) {
            for (int x = 0; x < p.alpha.width(); ++x) {
                if (p.alpha.at(x, y) <= 0.0)
                    continue;
                const std::int32_t owner = coverage.at(box.x1 + x, box.y1 + y);
                if (owner > static_cast<std::int32_t>(k))
                    continue;  // hidden behind a nearer paste
                visible.x1 = std::min(visible.x1, box.x1 + x);
                visible.y1 = std::min(visible.y1, box.y1 + y);
                visible.x2 = std::max(visible.x2, box.x1 + x + 1);
                visible.y2 = std::max(visible.y2, box.y1 + y + 1);
                any = true;
            }
        }
        if (any)
            sample.annotations.push_back(Annotation{p.category, visible});
    }

    if (record_provenance) {
        sample.provenance_mask = std::move(coverage);
        sample.has_provenance_mask = true;
    }
    return sample;
}

}  // namespace scenepaste
