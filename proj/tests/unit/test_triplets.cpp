#include <map>
#include <set>

#include "doctest.h"
#include "seatrack/embednet.hpp"
#include "seatrack/triplets.hpp"
#include "support/temp_dir.hpp"

using namespace seatrack;

namespace {

struct GradientFrames : FrameSource {
    int64_t frames = 10;
    GrayImage load(int64_t frame_id) const override {
        if (frame_id < 0 || frame_id >= frames) throw std::runtime_error("frame " + std::to_string(frame_id) + " missing");
        GrayImage img(120, 80);
        for (int r = 0; r < img.height; ++r)
            for (int c = 0; c < img.width; ++c)
                img.at(r, c) = static_cast<float>(0.5 + 0.4 * std::sin(0.13 * c + 0.07 * r + 0.2 * frame_id));
        return img;
    }
};

AnnotationFile two_objects(int frames) {
    AnnotationFile a;
    a.sequence = "t";
    for (int f = 0; f < frames; ++f)
        a.frames.push_back({f, {{1, {10.0 + f, 10, 20, 16}}, {2, {70, 40.0 + f, 24, 18}}}});
    return a;
}

JitterConfig jitter(int samples = 3, uint64_t seed = 42) {
    JitterConfig j;
    j.samples_per_anchor = samples;
    j.seed = seed;
    return j;
}

}  // namespace

TEST_CASE("config validation") {
    JitterConfig j;
    CHECK_NOTHROW(j.validate());
    j.max_translation_frac = 0.5;
    CHECK_THROWS(j.validate());
    j = JitterConfig{};
    j.scale_low = 1.3;
    CHECK_THROWS(j.validate());
    j = JitterConfig{};
    j.samples_per_anchor = 0;
    CHECK_THROWS(j.validate());
    AugmentConfig a;
    a.probability = 1.5;
    CHECK_THROWS(a.validate());
}

TEST_CASE("zero jitter reproduces the input box") {
    JitterConfig j = jitter(5);
    j.max_translation_frac = 0.0;
    j.scale_low = j.scale_high = 1.0;
    const BoundingBox box{12.5, 7.25, 30, 20};
    const auto s = sample_positive_boxes(box, j, {100, 100});
    REQUIRE(s.boxes.size() == 5);
    for (const auto& b : s.boxes) CHECK(b == box);
}

TEST_CASE("jittered boxes intersect the input and are deterministic") {
    Rng rng(3);
    for (int k = 0; k < 200; ++k) {
        JitterConfig j = jitter(4, rng.next());
        j.max_translation_frac = rng.uniform(0.0, 0.49);
        j.scale_low = rng.uniform(0.5, 1.0);
        j.scale_high = j.scale_low + rng.uniform(0.0, 1.0);
        const BoundingBox box{rng.uniform(0, 80), rng.uniform(0, 80), rng.uniform(3, 20), rng.uniform(3, 20)};
        const auto s = sample_positive_boxes(box, j, {100, 100});
        CHECK(static_cast<int>(s.boxes.size()) + s.skipped == 4);
        for (const auto& b : s.boxes) {
            CHECK(intersection_area(b, box) > 0.0);
            CHECK(b.x >= 0.0);
            CHECK(b.right() <= 100.0);
        }
        CHECK(sample_positive_boxes(box, j, {100, 100}).boxes == s.boxes);
    }
}

TEST_CASE("tiny clipped samples are skipped and counted") {
    JitterConfig j = jitter(4);
    j.max_translation_frac = 0.0;
    j.scale_low = j.scale_high = 1.0;
    const auto s = sample_positive_boxes({-2.5, 0, 4, 4}, j, {50, 50});
    CHECK(s.boxes.empty());
    CHECK(s.skipped == 4);
}

TEST_CASE("collect_negatives") {
    const std::vector<GroundTruthBox> single{{0, 1, {0, 0, 5, 5}}};
    CHECK(collect_negatives(single, 1, {}).empty());
    const std::vector<GroundTruthBox> three{{0, 1, {0, 0, 5, 5}}, {0, 2, {10, 0, 5, 5}}, {0, 3, {20, 0, 5, 5}}};
    const auto n = collect_negatives(three, 2, {});
    REQUIRE(n.size() == 2);
    CHECK(n[0].source.id == 1);
    CHECK(n[1].source.id == 3);
    const auto w = collect_negatives(three, 2, {{0, 40, 5, 5}, {10, 40, 5, 5}});
    REQUIRE(w.size() == 4);
    CHECK(w[2].source.kind == NegativeSource::Kind::Water);
    CHECK(w[3].source.id == 1);
    CHECK(w[3].source.label() == "water 1");
    CHECK(n[0].source.label() == "object 1");
}

TEST_CASE("water boxes fall inside their region") {
    Rng rng(1);
    const BoundingBox region{20, 60, 50, 15};
    for (int k = 0; k < 100; ++k) {
        const BoundingBox b = sample_water_box(region, rng.uniform(2, 80), rng.uniform(2, 30), rng);
        CHECK(b.x >= region.x);
        CHECK(b.y >= region.y);
        CHECK(b.right() <= region.right() + 1e-9);
        CHECK(b.bottom() <= region.bottom() + 1e-9);
    }
}

TEST_CASE("dataset counts and labelling") {
    GradientFrames frames;
    const auto ds = build_triplet_dataset(frames, two_objects(10), {}, jitter(3), {}, 8);
    CHECK(ds.triplets.size() == 60);
    CHECK(ds.report.skipped_positive_boxes == 0);
    for (const auto& t : ds.triplets) {
        CHECK(t.anchor_object_id == t.provenance.object_id);
        CHECK(t.negative_source.kind == NegativeSource::Kind::Object);
        CHECK(t.negative_source.id != t.anchor_object_id);
        CHECK(t.anchor.resolution == 8);
    }
    for (size_t i = 1; i < ds.triplets.size(); ++i) {
        const auto& a = ds.triplets[i - 1].provenance;
        const auto& b = ds.triplets[i].provenance;
        CHECK(std::tie(a.frame_id, a.object_id, a.sample_index) < std::tie(b.frame_id, b.object_id, b.sample_index));
    }
}

TEST_CASE("single object without water yields no triplets") {
    GradientFrames frames;
    AnnotationFile a;
    a.sequence = "one";
    for (int f = 0; f < 5; ++f) a.frames.push_back({f, {{1, {10, 10, 20, 16}}}});
    const auto ds = build_triplet_dataset(frames, a, {}, jitter(), {}, 8);
    CHECK(ds.triplets.empty());
    CHECK(ds.report.objects_without_negatives == std::vector<int64_t>{1});

    const auto with_water = build_triplet_dataset(frames, a, {{0, 60, 120, 20}}, jitter(2), {}, 8);
    CHECK(with_water.triplets.size() == 10);
    for (const auto& t : with_water.triplets) CHECK(t.negative_source.kind == NegativeSource::Kind::Water);
}

TEST_CASE("negatives fall back to the nearest other frame") {
    GradientFrames frames;
    AnnotationFile a;
    a.sequence = "split";
    a.frames.push_back({0, {{1, {10, 10, 20, 16}}}});
    a.frames.push_back({3, {{2, {60, 40, 20, 16}}}});
    a.frames.push_back({5, {{2, {60, 40, 20, 16}}}});
    const auto ds = build_triplet_dataset(frames, a, {}, jitter(1), {}, 8);
    REQUIRE(ds.triplets.size() == 3);
    CHECK(ds.triplets[0].provenance.negative_frame_id == 3);
    CHECK(ds.triplets[1].provenance.negative_frame_id == 0);
    CHECK(ds.triplets[2].provenance.negative_frame_id == 0);
}

TEST_CASE("negatives are paired round robin") {
    GradientFrames frames;
    AnnotationFile a;
    a.sequence = "rr";
    a.frames.push_back({0, {{1, {5, 5, 12, 12}}, {2, {30, 5, 12, 12}}, {3, {60, 5, 12, 12}}}});
    const auto ds = build_triplet_dataset(frames, a, {}, jitter(4), {}, 6);
    std::vector<int64_t> neg_for_1;
    for (const auto& t : ds.triplets)
        if (t.anchor_object_id == 1) neg_for_1.push_back(t.negative_source.id);
    CHECK(neg_for_1 == std::vector<int64_t>{2, 3, 2, 3});
}

TEST_CASE("augmentation off gives plain jitter crops") {
    GradientFrames frames;
    const JitterConfig j = jitter(3, 9);
    const auto ds = build_triplet_dataset(frames, two_objects(4), {}, j, {}, 10);
    for (const auto& t : ds.triplets) {
        CHECK_FALSE(t.provenance.augment.has_value());
        CHECK(t.positive == extract_patch(frames.load(t.provenance.frame_id), t.provenance.positive_box, 10));
        CHECK(t.anchor == extract_patch(frames.load(t.provenance.frame_id), t.provenance.anchor_box, 10));
    }
}

TEST_CASE("augmentation on transforms a share of positives") {
    GradientFrames frames;
    AugmentConfig aug;
    aug.enabled = true;
    aug.probability = 1.0;
    const auto ds = build_triplet_dataset(frames, two_objects(4), {}, jitter(3, 9), aug, 10);
    for (const auto& t : ds.triplets) {
        REQUIRE(t.provenance.augment.has_value());
        const auto& p = *t.provenance.augment;
        CHECK(std::abs(p.shear_x) <= aug.max_shear);
        CHECK(std::abs(p.shear_y) <= aug.max_shear);
        CHECK(std::abs(p.rotation) <= aug.max_rotation);
        const Patch crop = extract_patch(frames.load(t.provenance.frame_id), t.provenance.positive_box, 10);
        CHECK(t.positive == apply_affine(crop, p));
    }
    aug.probability = 0.0;
    for (const auto& t : build_triplet_dataset(frames, two_objects(4), {}, jitter(3, 9), aug, 10).triplets)
        CHECK_FALSE(t.provenance.augment.has_value());
}

TEST_CASE("dataset construction is deterministic") {
    GradientFrames frames;
    AugmentConfig aug;
    aug.enabled = true;
    const auto a = build_triplet_dataset(frames, two_objects(6), {{0, 60, 120, 20}}, jitter(3, 5), aug, 8);
    const auto b = build_triplet_dataset(frames, two_objects(6), {{0, 60, 120, 20}}, jitter(3, 5), aug, 8);
    CHECK(serialize_triplets(a.triplets, 8) == serialize_triplets(b.triplets, 8));
    CHECK(format_dataset_manifest(a, jitter(3, 5), aug, 8) == format_dataset_manifest(b, jitter(3, 5), aug, 8));
    const auto c = build_triplet_dataset(frames, two_objects(6), {{0, 60, 120, 20}}, jitter(3, 6), aug, 8);
    CHECK(serialize_triplets(a.triplets, 8) != serialize_triplets(c.triplets, 8));
}

TEST_CASE("missing frame is named") {
    GradientFrames frames;
    frames.frames = 3;
    try {
        build_triplet_dataset(frames, two_objects(5), {}, jitter(), {}, 8);
        FAIL("expected an error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("frame 3") != std::string::npos);
    }
}

TEST_CASE("zero jitter smoke: loss equals the clamped margin term") {
    GradientFrames frames;
    JitterConfig j = jitter(1);
    j.max_translation_frac = 0.0;
    j.scale_low = j.scale_high = 1.0;
    const auto ds = build_triplet_dataset(frames, two_objects(3), {}, j, {}, 8);
    NetConfig cfg = desk_conv_config();
    cfg.patch_resolution = 8;
    const Weights w = init_weights(cfg, 1);
    for (const auto& t : ds.triplets) {
        CHECK(t.anchor == t.positive);
        const auto ea = forward(cfg, w, t.anchor), en = forward(cfg, w, t.negative);
        const double expected = std::max(cfg.margin - squared_distance(ea, en), 0.0);
        CHECK(triplet_loss(ea, forward(cfg, w, t.positive), en, cfg.margin) == expected);
    }
}

TEST_CASE("triplet file and water file round trip") {
    testing::TempDir dir;
    GradientFrames frames;
    AugmentConfig aug;
    aug.enabled = true;
    const auto ds = build_triplet_dataset(frames, two_objects(3), {{0, 60, 120, 20}}, jitter(2), aug, 6);
    write_triplets(dir / "t.bin", ds.triplets, 6);
    const auto back = read_triplets(dir / "t.bin");
    REQUIRE(back.size() == ds.triplets.size());
    for (size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].anchor == ds.triplets[i].anchor);
        CHECK(back[i].positive == ds.triplets[i].positive);
        CHECK(back[i].negative == ds.triplets[i].negative);
        CHECK(back[i].negative_source == ds.triplets[i].negative_source);
        CHECK(back[i].provenance.augment == ds.triplets[i].provenance.augment);
    }
    const auto bytes = serialize_triplets(ds.triplets, 6);
    CHECK_THROWS_AS(deserialize_triplets(std::span(bytes).first(bytes.size() - 1)), TripletFileError);
    CHECK_THROWS_AS(read_triplets(dir / "none.bin"), TripletFileError);

    const std::vector<BoundingBox> regions{{1, 2, 3, 4}, {5, 6, 7, 8}};
    write_water_regions(dir / "water.json", "t", regions);
    CHECK(read_water_regions(dir / "water.json") == regions);
}
