#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "seatrack/assignment.hpp"
#include "seatrack/embednet.hpp"
#include "seatrack/geometry.hpp"
#include "seatrack/io.hpp"
#include "seatrack/triplets.hpp"

namespace seatrack {

enum class AppearanceMetric { SqEuclidean, Cosine };

std::string to_string(AppearanceMetric m);
AppearanceMetric parse_appearance_metric(const std::string& s);

struct TrackerConfig {
    double lambda = 0.5;                  // weight of the motion term
    double cost_threshold = 0.3;          // gate on stage 1/2 costs
    double init_distance_threshold = 50;  // px, tentative matching gate
    int n_init = 2;
    int max_age = 30;
    int budget = 10;
    AppearanceMetric appearance_metric = AppearanceMetric::SqEuclidean;
    double min_confidence = 0.25;

    void validate() const;
    bool operator==(const TrackerConfig&) const = default;
};

enum class TrackState { Tentative, Confirmed, Lost };

std::string to_string(TrackState s);

struct Track {
    int64_t track_id = 0;
    TrackState state = TrackState::Tentative;
    BoundingBox last_box;
    int hits = 0;
    int time_since_update = 0;
    std::deque<Embedding> gallery;
};

struct ReportedTrack {
    int64_t track_id = 0;
    BoundingBox box;
    TrackState state = TrackState::Confirmed;
};

struct FrameResult {
    std::vector<ReportedTrack> reported;  // sorted by track id
    std::vector<int64_t> created;
    std::vector<int64_t> removed;
};

// Centroid distance over the image diagonal, clipped to 1.
Matrix motion_cost(std::span<const Track> tracks, std::span<const Detection> detections, double image_diag);

// Minimum over each track's gallery; both metrics scaled into [0,1].
Matrix appearance_cost(std::span<const Track> tracks, std::span<const Embedding> embeddings,
                       AppearanceMetric metric);

Matrix combined_cost(const Matrix& motion, const Matrix& appearance, double lambda);

class Tracker {
public:
    Tracker(TrackerConfig cfg, int image_width, int image_height);

    // `embeddings[k]` belongs to `detections[k]`; detections below
    // min_confidence must already be filtered out.
    FrameResult step(std::span<const Detection> detections, std::span<const Embedding> embeddings);

    const std::vector<Track>& tracks() const { return tracks_; }
    const TrackerConfig& config() const { return cfg_; }

private:
    void mark_matched(Track& t, const Detection& det, const Embedding& emb);

    TrackerConfig cfg_;
    double diag_;
    int64_t next_id_ = 1;
    std::vector<Track> tracks_;
};

struct SequenceRun {
    AnnotationFile tracks;         // one entry per frame, ids are track ids
    std::vector<double> step_ms;   // wall clock per frame: patches, embedding, association
};

// Runs the tracker over every frame of a sequence. Errors are rethrown with
// the frame index prefixed.
SequenceRun run_sequence(const TrackerConfig& cfg, const SequenceManifest& manifest,
                         const std::vector<Detection>& detections, const FrameSource& frames,
                         const Checkpoint& checkpoint);

std::string format_timings(const SequenceRun& run);

}  // namespace seatrack

namespace seatrack {

// The two halves of run_sequence, for callers that reuse embeddings across
// many tracker configurations. Results match run_sequence exactly.
std::vector<Embedding> embed_detections(const SequenceManifest& manifest, const std::vector<Detection>& detections,
                                        const FrameSource& frames, const Checkpoint& checkpoint);
AnnotationFile track_embedded(const TrackerConfig& cfg, const SequenceManifest& manifest,
                              const std::vector<Detection>& detections, const std::vector<Embedding>& embeddings);

}  // namespace seatrack
