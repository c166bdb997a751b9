#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "seatrack/evaluation.hpp"
#include "seatrack/tracker.hpp"

namespace seatrack {

enum class SweepStage { Checkpoints, CostMetrics, TrackerParams };

std::string to_string(SweepStage s);

struct NamedCheckpoint {
    std::string label;
    Checkpoint checkpoint;
};

struct CostMetricCandidate {
    std::string label;
    double lambda = 0.5;
};

// appearance (0), distance (1), combined (0.5).
std::vector<CostMetricCandidate> default_cost_metrics();

// Partial tracker configuration; unset fields keep the inherited value.
struct TrackerOverrides {
    std::optional<double> cost_threshold;
    std::optional<double> init_distance_threshold;
    std::optional<int> n_init;
    std::optional<int> max_age;
    std::optional<int> budget;
    std::optional<AppearanceMetric> appearance_metric;
    std::optional<double> min_confidence;

    void apply(TrackerConfig& cfg) const;
    std::string label() const;
};

// Reads a JSON object with any of the TrackerConfig field names.
TrackerOverrides parse_tracker_overrides(const std::string& json_text);
TrackerConfig parse_tracker_config(const std::string& json_text, TrackerConfig base = {});
std::string format_tracker_config(const TrackerConfig& cfg);

struct SweepSequence {
    SequenceManifest manifest;
    AnnotationFile ground_truth;
    std::vector<Detection> detections;
    std::shared_ptr<const FrameSource> frames;
};

struct SweepPlan {
    std::vector<NamedCheckpoint> checkpoints;
    std::vector<CostMetricCandidate> cost_metrics = default_cost_metrics();
    std::vector<TrackerOverrides> tracker_params = {TrackerOverrides{}};
};

struct SweepRow {
    size_t index = 0;
    std::string label;
    std::optional<double> score;  // mean MOTA over the sequences; empty when the candidate failed
    std::vector<std::optional<double>> per_sequence;
    std::string error;
};

struct SweepTable {
    SweepStage stage = SweepStage::Checkpoints;
    std::vector<std::string> sequences;
    std::vector<SweepRow> rows;
    size_t best = 0;
};

struct SweepResult {
    std::vector<SweepTable> tables;
    size_t best_checkpoint = 0;
    TrackerConfig best_config;
    std::optional<double> best_score;
};

// Stages run in order; each evaluates its candidates on top of the best of
// the previous stages. Ties go to the earlier candidate.
SweepResult sweep(const SweepPlan& plan, const TrackerConfig& base, const std::vector<SweepSequence>& sequences,
                  const MatchOptions& match = {});

std::string format_sweep_table(const SweepTable& table);

}  // namespace seatrack
