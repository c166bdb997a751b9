#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seatrack/geometry.hpp"

namespace seatrack {

namespace fs = std::filesystem;

struct AnnotatedBox {
    int64_t id = 0;
    BoundingBox box;

    bool operator==(const AnnotatedBox&) const = default;
};

struct AnnotatedFrame {
    int64_t frame_id = 0;
    std::vector<AnnotatedBox> boxes;

    bool operator==(const AnnotatedFrame&) const = default;
};

// In-memory form of the annotations JSON file. Also used for tracker output
// (ids are track ids) and for water-region files (ids ignored).
struct AnnotationFile {
    std::string sequence;
    std::vector<AnnotatedFrame> frames;

    bool operator==(const AnnotationFile&) const = default;

    // Boxes of `frame_id`, or an empty list when the frame has no entry.
    const std::vector<AnnotatedBox>& boxes_for(int64_t frame_id) const;
    std::vector<GroundTruthBox> flatten() const;
    static AnnotationFile from_boxes(std::string sequence, const std::vector<GroundTruthBox>& boxes,
                                     int64_t frame_count = 0);
};

struct SequenceManifest {
    std::string name;
    int64_t frame_count = 0;
    int image_width = 0;
    int image_height = 0;
    std::string image_path_pattern;  // printf-style, one integer conversion, e.g. "frames/%06d.pgm"
    // Optional sidecars, relative to the manifest directory.
    std::string annotations;
    std::string detections;
    std::string water;

    fs::path base_dir;  // directory the manifest was loaded from; not serialized

    fs::path frame_path(int64_t frame_id) const;
    fs::path resolve(const std::string& relative) const;
};

// Expands a printf-style pattern with exactly one %d conversion (flags '0'
// and a width are allowed; "%%" is a literal percent).
std::string expand_frame_pattern(std::string_view pattern, int64_t frame_id);

std::vector<Detection> read_detections(const fs::path& path);
std::vector<Detection> parse_detections(std::string_view text, std::string_view source = "<memory>");
std::string format_detections(const std::vector<Detection>& detections);
void write_detections(const fs::path& path, const std::vector<Detection>& detections);

AnnotationFile read_annotations(const fs::path& path);
AnnotationFile parse_annotations(std::string_view text, std::string_view source = "<memory>");
std::string format_annotations(const AnnotationFile& file);
void write_annotations(const fs::path& path, const AnnotationFile& file);

// Enforces per-frame id uniqueness, positive ids, unique frame ids, valid boxes.
void validate_annotations(const AnnotationFile& file);

SequenceManifest read_manifest(const fs::path& path);
std::string format_manifest(const SequenceManifest& manifest);
void write_manifest(const fs::path& path, const SequenceManifest& manifest);
// Checks that every referenced frame exists and has the declared size.
void validate_manifest_frames(const SequenceManifest& manifest);

// Shortest decimal that round-trips the double.
std::string format_real(double v);

std::string read_text_file(const fs::path& path);
// Writes via a temporary sibling file and rename, so readers never observe a
// partially written file.
void write_file_atomic(const fs::path& path, std::string_view contents);

}  // namespace seatrack
