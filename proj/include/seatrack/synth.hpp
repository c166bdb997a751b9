#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "seatrack/geometry.hpp"
#include "seatrack/image.hpp"
#include "seatrack/io.hpp"
#include "seatrack/triplets.hpp"

namespace seatrack {

struct VelocityChange {
    int64_t frame = 0;  // velocity applies from this frame's step onward
    double vx = 0.0;
    double vy = 0.0;
};

struct SceneObject {
    BoundingBox initial;
    double vx = 0.0;
    double vy = 0.0;
    int texture_id = 0;
    std::vector<VelocityChange> velocity_changes;  // sorted by frame
};

// How overlapping objects are drawn: the later object in front, or the
// mean of all covering textures.
enum class OverlapRendering { Occlude, Blend };

struct SceneConfig {
    std::string name = "scene";
    int width = 640;
    int height = 480;
    int64_t frame_count = 60;
    std::vector<SceneObject> objects;
    double background_mean = 0.15;
    double noise_sigma = 0.03;
    double miss_probability = 0.0;
    double false_positive_rate = 0.0;  // probability of one water false positive per frame
    double detection_jitter = 1.0;     // px, uniform on each box coordinate
    double min_visible_fraction = 0.7;  // below this the detector misses the object
    OverlapRendering overlap = OverlapRendering::Blend;
    std::vector<BoundingBox> water_regions;
    uint64_t seed = 7;

    void validate() const;
};

enum class Preset { Static, Drift, Crossing, Reentry, Clutter };

Preset parse_preset(const std::string& name);
std::string to_string(Preset p);
SceneConfig preset(Preset p);
SceneConfig preset(const std::string& name);

// Unclipped box of object `index` at `frame`.
BoundingBox object_box(const SceneObject& obj, int64_t frame);

// Intensity of texture `id` at normalized object coordinates (u, v) in [0,1).
double texture_value(int texture_id, double u, double v);

struct SceneTruth {
    AnnotationFile ground_truth;
    std::vector<Detection> detections;  // per frame in left-to-right order
    std::vector<BoundingBox> water_regions;
};

SceneTruth generate_truth(const SceneConfig& cfg);
GrayImage render_frame(const SceneConfig& cfg, int64_t frame);

// Fraction of the object's pixels that are inside the image and not hidden
// behind a later object (Occlude) at `frame`.
double visible_fraction(const SceneConfig& cfg, size_t object_index, int64_t frame);

// Frames rendered on demand, no disk round trip.
class SyntheticFrames : public FrameSource {
public:
    explicit SyntheticFrames(SceneConfig cfg) : cfg_(std::move(cfg)) {}
    GrayImage load(int64_t frame_id) const override;

private:
    SceneConfig cfg_;
};

// Writes frames/NNNNNN.pgm, gt.json, detections.txt, water.json and
// manifest.json into `dir`; returns the manifest (with base_dir set).
SequenceManifest write_sequence(const SceneConfig& cfg, const std::filesystem::path& dir);

}  // namespace seatrack
