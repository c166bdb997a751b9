#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "seatrack/assignment.hpp"
#include "seatrack/embednet.hpp"
#include "seatrack/io.hpp"
#include "seatrack/triplets.hpp"

namespace seatrack {

struct FrameMatch {
    int64_t object_id = 0;
    int64_t track_id = 0;

    bool operator==(const FrameMatch&) const = default;
};

struct MatchOptions {
    double iou_threshold = 0.3;
    // Match on centroid distance instead of overlap.
    bool centroid = false;
    double centroid_gate = 50.0;  // px
};

// Hungarian correspondence between ground truth and track boxes; sorted by
// object id.
std::vector<FrameMatch> match_frame(const std::vector<AnnotatedBox>& gt, const std::vector<AnnotatedBox>& tracks,
                                    const MatchOptions& options = {});

// Per-frame identity switch counts. A switch is a matched id that differs
// from the object's last matched id; gaps keep the last id.
std::vector<int> count_switches(const std::vector<std::vector<FrameMatch>>& per_frame);

struct FrameEval {
    int64_t frame_id = 0;
    int num_objects = 0;
    int num_switches = 0;
    std::vector<FrameMatch> matches;
};

struct MotaReport {
    std::vector<FrameEval> frames;
    double mota = 0.0;
    int64_t frames_scored = 0;
};

class NoScorableFrames : public std::runtime_error {
public:
    NoScorableFrames() : std::runtime_error("no scorable frames: every frame has zero ground-truth objects") {}
};

// Mean over frames with objects of (1 - switches / objects).
MotaReport mota(std::vector<FrameEval> frames);

// Matches every ground-truth frame against the track output and scores it.
MotaReport evaluate_sequence(const AnnotationFile& ground_truth, const AnnotationFile& tracks,
                             const MatchOptions& options = {});

std::string format_mota_report(const MotaReport& report);

struct DistanceMatrixOptions {
    // Instances per object, evenly spaced over its frames; 0 keeps all.
    size_t max_samples_per_object = 0;
};

struct DistanceMatrixReport {
    std::vector<int64_t> object_ids;
    std::vector<size_t> sample_counts;
    Matrix distances;  // mean squared embedding distance
    std::vector<int64_t> excluded;  // objects with fewer than 2 samples

    bool diagonal_is_row_minimum() const;
};

DistanceMatrixReport distance_matrix_report(const AnnotationFile& annotations, const FrameSource& frames,
                                            const Checkpoint& checkpoint, const DistanceMatrixOptions& options = {});

std::string format_distance_matrix(const DistanceMatrixReport& report);

}  // namespace seatrack

namespace seatrack {

// Fraction of queries whose nearest gallery embedding (squared distance,
// earliest on ties) carries the query's label.
double retrieval_accuracy(const std::vector<Embedding>& gallery, const std::vector<int64_t>& gallery_labels,
                          const std::vector<Embedding>& queries, const std::vector<int64_t>& query_labels);

}  // namespace seatrack
