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

#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "scenepaste/placement.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace scenepaste;

namespace {

Bank small_bank() {
    std::vector<InstanceCutout> cutouts;
    cutouts.push_back(fixtures::make_cone_cutout(40, 80, 18.0, 0.85, 0.9, "cone_a"));
    cutouts.push_back(fixtures::make_cone_cutout(52, 104, 26.0, 0.8, 0.85, "cone_b"));
    cutouts.push_back(fixtures::make_cone_cutout(36, 72, 12.0, 0.9, 0.95, "cone_c"));
    return Bank(std::move(cutouts));
}

PipelineConfig plain_cfg() {
    PipelineConfig cfg;
    cfg.blend.mode = BlendMode::plain;
    return cfg;
}

}  // namespace

TEST_CASE("depth sampling", "[placement]") {
    PipelineConfig cfg;

    SECTION("degenerate interval always returns its value") {
        cfg.depth_min_m = cfg.depth_max_m = 20.0;
        RandomStream rng(1);
        for (int i = 0; i < 50; ++i)
            CHECK(sample_depth(cfg, rng) == 20.0);
    }
    SECTION("empirical mean over [5,60]") {
        RandomStream rng(5);
        double sum = 0.0;
        for (int i = 0; i < 10000; ++i)
            sum += sample_depth(cfg, rng);
        CHECK(sum / 10000.0 == Catch::Approx(32.5).margin(1.0));
    }
    SECTION("fixed seed replays the sequence") {
        RandomStream a(9), b(9);
        for (int i = 0; i < 100; ++i)
            REQUIRE(sample_depth(cfg, a) == sample_depth(cfg, b));
    }
}

TEST_CASE("placement proposals", "[placement]") {
    const fixtures::ContextSpec spec;  // 640x360, permissive freespace
    const SceneContext ctx = fixtures::build_context(spec);
    const InstanceCutout cone = fixtures::make_cone_cutout(40, 80);
    PipelineConfig cfg = plain_cfg();

    SECTION("accepted proposals track the ground-plane geometry") {
        RandomStream rng(100);
        int accepted = 0;
        for (int i = 0; i < 400; ++i) {
            const ProposeOutcome out = propose_placement(ctx, cone, cfg, rng);
            if (!out.accepted)
                continue;
            ++accepted;
            const Placement& p = out.placement;
            // bottom row of the box is the contact row, which is Eq. 1 rounded
            const double exact_row = row_from_distance(ctx.intrinsics, ctx.extrinsics,
                                                       p.depth_m);
            CHECK(p.box.y2 - 1 == p.contact.y);
            CHECK(std::abs(p.contact.y - exact_row) <= 0.5 + 1e-9);
            // box height is Eq. 2 rounded
            CHECK(std::abs(p.box.height() - p.height_px) <= 1.0);
            // bottom center within a pixel of the contact column
            CHECK(std::abs((p.box.x1 + p.box.x2) / 2.0 - p.contact.x) <= 1.0);
            // recomputed distance from the rounded row brackets the depth
            const double d_lo = distance_from_row(ctx.intrinsics, ctx.extrinsics,
                                                  p.contact.y + 0.5);
            const double d_hi = distance_from_row(ctx.intrinsics, ctx.extrinsics,
                                                  p.contact.y - 0.5);
            CHECK(p.depth_m >= d_lo - 1e-9);
            CHECK(p.depth_m <= d_hi + 1e-9);
            // and validation re-passes
            CHECK(validate_placement(ctx, p.box, p.contact, cfg).accepted);
        }
        CHECK(accepted > 200);
    }

    SECTION("empty freespace rejects with off_freespace") {
        fixtures::ContextSpec barren = spec;
        barren.empty_freespace = true;
        barren.with_lanes = false;
        const SceneContext bare_ctx = fixtures::build_context(barren);
        RandomStream rng(7);
        for (int i = 0; i < 50; ++i) {
            const ProposeOutcome out = propose_placement(bare_ctx, cone, cfg, rng);
            REQUIRE_FALSE(out.accepted);
            REQUIRE(out.reason == PlacementReason::off_freespace);
        }
    }

    SECTION("pure lane prior with zero jitter lands on the lane column") {
        // context with a single lane column per row
        SceneContext lane_ctx = fixtures::build_context(spec);
        lane_ctx.lanes = RasterU8(lane_ctx.width, lane_ctx.height, 1, 0);
        for (int y = 0; y < lane_ctx.height; ++y)
            lane_ctx.lanes.at(444, y) = 1;
        lane_ctx.lane_count = 1;
        cfg.lane_prior_prob = 1.0;
        cfg.lane_lateral_sigma_px = 0.0;
        RandomStream rng(13);
        int accepted = 0;
        for (int i = 0; i < 200; ++i) {
            const ProposeOutcome out = propose_placement(lane_ctx, cone, cfg, rng);
            if (out.accepted) {
                ++accepted;
                REQUIRE(out.placement.contact.x == 444);
            }
        }
        CHECK(accepted > 100);
    }
}

TEST_CASE("augmenting one image", "[placement]") {
    const fixtures::ContextSpec spec;
    const SceneContext ctx = fixtures::build_context(spec);
    const ImageD bg = fixtures::make_background(spec.width, spec.height, 0);
    const Bank bank = small_bank();
    PipelineConfig cfg = plain_cfg();

    SECTION("zero instances returns the background bit-identically") {
        cfg.instances_per_image = 0;
        const AugmentedSample sample = augment_image(bg, ctx, bank, cfg, 42, 0);
        CHECK(sample.image == bg);
        CHECK(sample.annotations.empty());
        CHECK(sample.stats.accepted == 0);
        CHECK(sample.stats.attempts == 0);
    }

    SECTION("permissive context places all five instances") {
        const AugmentedSample sample = augment_image(bg, ctx, bank, cfg, 42, 0);
        CHECK(sample.annotations.size() == 5);
        CHECK(sample.stats.accepted == 5);
        CHECK(sample.stats.skipped == 0);
        for (std::size_t i = 0; i < sample.placements.size(); ++i) {
            const Placement& p = sample.placements[i];
            CHECK(validate_placement(ctx, p.box, p.contact, cfg).accepted);
            // annotation box matches the placement box (alpha-tight paste)
            CHECK(sample.annotations[i].box == p.box);
        }
    }

    SECTION("adversarial context skips everything with full attempt accounting") {
        fixtures::ContextSpec barren = spec;
        barren.empty_freespace = true;
        barren.with_lanes = false;
        const SceneContext bare_ctx = fixtures::build_context(barren);
        const AugmentedSample sample = augment_image(bg, bare_ctx, bank, cfg, 42, 0);
        CHECK(sample.annotations.empty());
        CHECK(sample.stats.accepted == 0);
        CHECK(sample.stats.skipped == 5);
        CHECK(sample.stats.attempts == 5 * cfg.max_attempts_per_instance);
        CHECK(sample.image == bg);
    }

    SECTION("repeat runs are bit-identical; seeds change the output") {
        const AugmentedSample a = augment_image(bg, ctx, bank, cfg, 42, 3);
        const AugmentedSample b = augment_image(bg, ctx, bank, cfg, 42, 3);
        REQUIRE(a.image == b.image);
        REQUIRE(a.annotations.size() == b.annotations.size());
        for (std::size_t i = 0; i < a.annotations.size(); ++i)
            REQUIRE(a.annotations[i].box == b.annotations[i].box);

        const AugmentedSample c = augment_image(bg, ctx, bank, cfg, 43, 3);
        CHECK(a.image != c.image);
    }

    SECTION("placements paste far to near and scale monotonically") {
        const AugmentedSample sample = augment_image(bg, ctx, bank, cfg, 11, 2, true);
        REQUIRE(sample.placements.size() >= 2);
        for (std::size_t i = 1; i < sample.placements.size(); ++i)
            CHECK(sample.placements[i - 1].depth_m >= sample.placements[i].depth_m);
        REQUIRE(sample.has_provenance_mask);

        // nearer (later) pastes own every contested pixel
        for (std::size_t k = 0; k < sample.placements.size(); ++k) {
            const PixelBox& box = sample.placements[k].box;
            for (int y = box.y1; y < box.y2; ++y)
                for (int x = box.x1; x < box.x2; ++x) {
                    const std::int32_t owner = sample.provenance_mask.at(x, y);
                    if (owner >= 0)
                        CHECK(owner < static_cast<std::int32_t>(sample.placements.size()));
                }
        }
    }

    SECTION("same real height scales strictly with depth") {
        // pin the bank to one cutout with a degenerate height range
        std::vector<InstanceCutout> one;
        one.push_back(fixtures::make_cone_cutout(40, 80, 20.0, 0.85, 0.9, "fixed"));
        one[0].h_real_min = one[0].h_real_max = 0.7;
        const Bank fixed_bank(std::move(one));
        const AugmentedSample sample = augment_image(bg, ctx, fixed_bank, cfg, 5, 1);
        REQUIRE(sample.placements.size() >= 3);
        for (std::size_t i = 1; i < sample.placements.size(); ++i) {
            const auto& far = sample.placements[i - 1];
            const auto& near = sample.placements[i];
            if (far.depth_m > near.depth_m)
                CHECK(far.height_px < near.height_px);
        }
    }

    SECTION("depth-ordered overdraw verified by provenance on forced overlap") {
        // freespace narrowed to a strip so instances must overlap
        SceneContext strip_ctx = fixtures::build_context(spec);
        for (int y = 0; y < strip_ctx.height; ++y)
            for (int x = 0; x < strip_ctx.width; ++x)
                if (x < 300 || x > 340)
                    strip_ctx.freespace.at(x, y) = 0;
        PipelineConfig strip_cfg = cfg;
        strip_cfg.lane_prior_prob = 0.0;
        strip_cfg.instances_per_image = 6;
        const AugmentedSample sample =
            augment_image(bg, strip_ctx, bank, strip_cfg, 21, 0, true);
        REQUIRE(sample.placements.size() >= 2);

        // reconstruct each instance's opaque footprint independently: in
        // plain mode the pasted alpha is exactly the resized cutout's
        auto opaque_at = [&](const Placement& p, int x, int y) {
            for (const auto& cutout : bank.cutouts()) {
                if (cutout.source_id != p.cutout_ref)
                    continue;
                const InstanceCutout resized = resize_cutout(cutout, p.box.height());
                const int cx = x - p.box.x1, cy = y - p.box.y1;
                return cx >= 0 && cx < resized.width() && cy >= 0 && cy < resized.height() &&
                       resized.pixels.at(cx, cy, 3) >= 0.5;
            }
            return false;
        };

        bool overlapped = false;
        for (std::size_t a = 0; a < sample.placements.size(); ++a)
            for (std::size_t b = a + 1; b < sample.placements.size(); ++b)
                if (sample.placements[a].box.intersect(sample.placements[b].box).valid())
                    overlapped = true;
        CHECK(overlapped);

        // the owner of every pixel is the nearest (latest-pasted) instance
        // whose opaque footprint covers it
        RandomStream probe(55);
        for (int trial = 0; trial < 4000; ++trial) {
            const int x = static_cast<int>(probe.next_below(
                static_cast<std::uint64_t>(strip_ctx.width)));
            const int y = static_cast<int>(probe.next_below(
                static_cast<std::uint64_t>(strip_ctx.height)));
            std::int32_t expected = -1;
            for (std::size_t k = 0; k < sample.placements.size(); ++k)
                if (opaque_at(sample.placements[k], x, y))
                    expected = static_cast<std::int32_t>(k);
            REQUIRE(sample.provenance_mask.at(x, y) == expected);
            if (expected >= 0)
                for (std::size_t k = 0; k < sample.placements.size(); ++k)
                    if (opaque_at(sample.placements[k], x, y))
                        REQUIRE(sample.placements[static_cast<std::size_t>(expected)].depth_m <=
                                sample.placements[k].depth_m + 1e-12);
        }
    }

    SECTION("clipped boxes stay inside the unclipped ones") {
        PipelineConfig clip_cfg = cfg;
        clip_cfg.instances_per_image = 6;
        clip_cfg.clip_occluded_boxes = true;
        PipelineConfig raw_cfg = clip_cfg;
        raw_cfg.clip_occluded_boxes = false;

        SceneContext strip_ctx = fixtures::build_context(spec);
        for (int y = 0; y < strip_ctx.height; ++y)
            for (int x = 0; x < strip_ctx.width; ++x)
                if (x < 300 || x > 340)
                    strip_ctx.freespace.at(x, y) = 0;

        const AugmentedSample clipped =
            augment_image(bg, strip_ctx, bank, clip_cfg, 21, 0);
        const AugmentedSample raw = augment_image(bg, strip_ctx, bank, raw_cfg, 21, 0);
        REQUIRE(clipped.placements.size() == raw.placements.size());
        CHECK(clipped.annotations.size() <= raw.annotations.size());
        // images are unaffected by the annotation mode
        CHECK(clipped.image == raw.image);
        for (const auto& ann : clipped.annotations) {
            bool contained = false;
            for (const auto& r : raw.annotations)
                if (ann.box.x1 >= r.box.x1 && ann.box.y1 >= r.box.y1 &&
                    ann.box.x2 <= r.box.x2 && ann.box.y2 <= r.box.y2)
                    contained = true;
            CHECK(contained);
        }
    }

    SECTION("cutout flipping is seeded and changes only pixel content") {
        PipelineConfig flip_cfg = cfg;
        flip_cfg.allow_hflip = true;
        const AugmentedSample flip_a = augment_image(bg, ctx, bank, flip_cfg, 42, 0);
        const AugmentedSample flip_b = augment_image(bg, ctx, bank, flip_cfg, 42, 0);
        REQUIRE(flip_a.image == flip_b.image);
        CHECK(flip_a.stats.accepted == 5);
        // flip draws shift the per-instance streams, so placements differ
        // from the no-flip run
        const AugmentedSample plain_run = augment_image(bg, ctx, bank, cfg, 42, 0);
        CHECK(flip_a.image != plain_run.image);
    }

    SECTION("gaussian and poisson modes respect their bounds and converge") {
        PipelineConfig gauss_cfg = cfg;
        gauss_cfg.blend.mode = BlendMode::gaussian;
        const AugmentedSample gauss = augment_image(bg, ctx, bank, gauss_cfg, 3, 0);
        CHECK(gauss.stats.accepted == 5);

        PipelineConfig poisson_cfg = cfg;
        poisson_cfg.blend.mode = BlendMode::poisson;
        const AugmentedSample poisson = augment_image(bg, ctx, bank, poisson_cfg, 3, 0);
        CHECK(poisson.stats.accepted == 5);
        CHECK(poisson.stats.blend_warnings.empty());
        for (const auto& p : poisson.placements) {
            CHECK(p.box.x1 >= 1);
            CHECK(p.box.y1 >= 1);
            CHECK(p.box.x2 <= ctx.width - 1);
            CHECK(p.box.y2 <= ctx.height - 1);
        }
    }
}
