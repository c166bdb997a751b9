#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "seatrack/geometry.hpp"
#include "seatrack/image.hpp"
#include "seatrack/io.hpp"
#include "seatrack/rng.hpp"

namespace seatrack {

struct JitterConfig {
    double max_translation_frac = 0.2;
    double scale_low = 0.8;
    double scale_high = 1.2;
    int samples_per_anchor = 3;
    uint64_t seed = 0;

    void validate() const;
};

struct AugmentConfig {
    bool enabled = false;
    double max_shear = 0.2;
    double max_rotation = 15.0 * 3.14159265358979323846 / 180.0;
    double probability = 0.5;

    void validate() const;
};

// Where a negative came from: another annotated object, or a water patch.
struct NegativeSource {
    enum class Kind { Object, Water };
    Kind kind = Kind::Object;
    int64_t id = 0;  // object id, or water region index

    std::string label() const;
    bool operator==(const NegativeSource&) const = default;
};

struct Provenance {
    int64_t frame_id = 0;
    int64_t object_id = 0;
    int sample_index = 0;
    BoundingBox anchor_box;
    BoundingBox positive_box;
    std::optional<AffineParams> augment;
    BoundingBox negative_box;
    int64_t negative_frame_id = 0;
};

struct Triplet {
    Patch anchor;
    Patch positive;
    Patch negative;
    int64_t anchor_object_id = 0;
    NegativeSource negative_source;
    Provenance provenance;
};

struct ImageBounds {
    double width = 0.0;
    double height = 0.0;
};

struct PositiveSamples {
    std::vector<BoundingBox> boxes;
    std::vector<int> sample_indices;  // index of each kept box among the draws
    int skipped = 0;                  // draws smaller than 2x2 px after clipping
};

// Jittered copies of `box`: center shifted by uniform draws in
// +-max_translation_frac * (w, h), size scaled by a uniform draw in
// [scale_low, scale_high], clipped to the image. `stream_key` selects an
// independent random stream (combined with cfg.seed).
PositiveSamples sample_positive_boxes(const BoundingBox& box, const JitterConfig& cfg,
                                      const ImageBounds& bounds, uint64_t stream_key = 0);

struct NegativeCandidate {
    BoundingBox box;
    NegativeSource source;
};

// Other objects in the frame first (annotation order), then water boxes.
std::vector<NegativeCandidate> collect_negatives(const std::vector<GroundTruthBox>& frame_annotations,
                                                 int64_t anchor_id,
                                                 const std::vector<BoundingBox>& water_boxes);

// Random box with the anchor's size placed inside a water region (clipped
// to the region when the region is smaller).
BoundingBox sample_water_box(const BoundingBox& region, double w, double h, Rng& rng);

struct DatasetReport {
    int skipped_positive_boxes = 0;
    std::vector<int64_t> objects_without_negatives;
};

struct TripletDataset {
    std::vector<Triplet> triplets;
    DatasetReport report;
};

struct FrameSource {
    // Returns the image of a frame; throws naming the frame when missing.
    virtual GrayImage load(int64_t frame_id) const = 0;
    virtual ~FrameSource() = default;
};

class ManifestFrames : public FrameSource {
public:
    explicit ManifestFrames(SequenceManifest manifest) : manifest_(std::move(manifest)) {}
    GrayImage load(int64_t frame_id) const override;

private:
    SequenceManifest manifest_;
};

// One triplet per kept positive sample of every annotated object instance,
// ordered by (frame_id, object_id, sample index).
TripletDataset build_triplet_dataset(const FrameSource& frames, const AnnotationFile& annotations,
                                     const std::vector<BoundingBox>& water_regions,
                                     const JitterConfig& jitter, const AugmentConfig& augment,
                                     int resolution);

// Audit manifest: provenance of every triplet, as JSON.
std::string format_dataset_manifest(const TripletDataset& dataset, const JitterConfig& jitter,
                                    const AugmentConfig& augment, int resolution);

// Water regions are stored in the annotations schema; every box of every
// frame entry is a region and ids are ignored.
std::vector<BoundingBox> read_water_regions(const std::filesystem::path& path);
void write_water_regions(const std::filesystem::path& path, const std::string& sequence,
                         const std::vector<BoundingBox>& regions);

// Draws shear/rotation uniformly within the configured bounds.
AffineParams draw_affine(const AugmentConfig& cfg, Rng& rng);

}  // namespace seatrack

namespace seatrack {

class TripletFileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Binary triplet file: magic "SEATRKT\0", u32 version, i32 resolution,
// u64 count, then per triplet its provenance and three patches, all
// little-endian.
std::vector<uint8_t> serialize_triplets(const std::vector<Triplet>& triplets, int resolution);
std::vector<Triplet> deserialize_triplets(std::span<const uint8_t> bytes, const std::string& source = "<memory>");
void write_triplets(const std::filesystem::path& path, const std::vector<Triplet>& triplets, int resolution);
std::vector<Triplet> read_triplets(const std::filesystem::path& path);

}  // namespace seatrack
