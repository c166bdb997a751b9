#include "seatrack/evaluation.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "json.hpp"

#include "seatrack/image.hpp"

namespace seatrack {

using nlohmann::json;

std::vector<FrameMatch> match_frame(const std::vector<AnnotatedBox>& gt, const std::vector<AnnotatedBox>& tracks,
                                    const MatchOptions& options) {
    std::vector<FrameMatch> out;
    if (gt.empty() || tracks.empty()) return out;
    Matrix cost(gt.size(), tracks.size());
    for (size_t r = 0; r < gt.size(); ++r)
        for (size_t c = 0; c < tracks.size(); ++c)
            cost(r, c) = options.centroid ? centroid_distance(gt[r].box, tracks[c].box)
                                          : 1.0 - iou(gt[r].box, tracks[c].box);
    const double gate = options.centroid ? options.centroid_gate : 1.0 - options.iou_threshold;
    const Assignment a = hungarian_assign(cost, gate);
    for (const auto& [r, c] : a.matches) {
        if (!options.centroid && iou(gt[r].box, tracks[c].box) < options.iou_threshold) continue;
        out.push_back({gt[r].id, tracks[c].id});
    }
    std::sort(out.begin(), out.end(),
              [](const FrameMatch& a, const FrameMatch& b) { return a.object_id < b.object_id; });
    return out;
}

std::vector<int> count_switches(const std::vector<std::vector<FrameMatch>>& per_frame) {
    std::map<int64_t, int64_t> last;
    std::vector<int> out;
    out.reserve(per_frame.size());
    for (const auto& frame : per_frame) {
        int n = 0;
        for (const auto& m : frame) {
            auto [it, inserted] = last.try_emplace(m.object_id, m.track_id);
            if (!inserted && it->second != m.track_id) {
                ++n;
                it->second = m.track_id;
            }
        }
        out.push_back(n);
    }
    return out;
}

MotaReport mota(std::vector<FrameEval> frames) {
    MotaReport report;
    double sum = 0.0;
    for (const auto& f : frames) {
        if (f.num_switches < 0 || f.num_switches > f.num_objects)
            throw std::invalid_argument("frame " + std::to_string(f.frame_id) + ": " +
                                        std::to_string(f.num_switches) + " switches for " +
                                        std::to_string(f.num_objects) + " objects");
        if (f.num_objects == 0) continue;
        sum += 1.0 - static_cast<double>(f.num_switches) / f.num_objects;
        ++report.frames_scored;
    }
    if (report.frames_scored == 0) throw NoScorableFrames();
    report.mota = sum / static_cast<double>(report.frames_scored);
    report.frames = std::move(frames);
    return report;
}

MotaReport evaluate_sequence(const AnnotationFile& ground_truth, const AnnotationFile& tracks,
                             const MatchOptions& options) {
    std::vector<AnnotatedFrame> gt_frames = ground_truth.frames;
    std::sort(gt_frames.begin(), gt_frames.end(),
              [](const AnnotatedFrame& a, const AnnotatedFrame& b) { return a.frame_id < b.frame_id; });
    std::vector<std::vector<FrameMatch>> matches;
    for (const auto& f : gt_frames) matches.push_back(match_frame(f.boxes, tracks.boxes_for(f.frame_id), options));
    const std::vector<int> switches = count_switches(matches);
    std::vector<FrameEval> evals;
    for (size_t i = 0; i < gt_frames.size(); ++i)
        evals.push_back({gt_frames[i].frame_id, static_cast<int>(gt_frames[i].boxes.size()), switches[i],
                         std::move(matches[i])});
    return mota(std::move(evals));
}

std::string format_mota_report(const MotaReport& report) {
    json frames = json::array();
    int64_t total_switches = 0;
    for (const auto& f : report.frames) {
        json m = json::array();
        for (const auto& x : f.matches) m.push_back({{"object_id", x.object_id}, {"track_id", x.track_id}});
        frames.push_back({{"frame_id", f.frame_id},
                          {"num_objects", f.num_objects},
                          {"num_switches", f.num_switches},
                          {"matches", std::move(m)}});
        total_switches += f.num_switches;
    }
    json j = {{"mota", report.mota},
              {"frames_scored", report.frames_scored},
              {"total_switches", total_switches},
              {"frames", std::move(frames)}};
    return j.dump(1) + "\n";
}

bool DistanceMatrixReport::diagonal_is_row_minimum() const {
    for (size_t i = 0; i < distances.rows(); ++i)
        for (size_t j = 0; j < distances.cols(); ++j)
            if (j != i && !(distances(i, i) < distances(i, j))) return false;
    return true;
}

DistanceMatrixReport distance_matrix_report(const AnnotationFile& annotations, const FrameSource& frames,
                                            const Checkpoint& checkpoint, const DistanceMatrixOptions& options) {
    check_weights(checkpoint.config, checkpoint.weights);
    std::map<int64_t, std::vector<GroundTruthBox>> instances;
    for (const auto& b : annotations.flatten()) instances[b.object_id].push_back(b);

    DistanceMatrixReport report;
    std::map<int64_t, std::vector<GroundTruthBox>> chosen;
    for (auto& [id, boxes] : instances) {
        std::sort(boxes.begin(), boxes.end(),
                  [](const GroundTruthBox& a, const GroundTruthBox& b) { return a.frame_id < b.frame_id; });
        std::vector<GroundTruthBox> pick;
        const size_t n = boxes.size(), k = options.max_samples_per_object;
        if (k == 0 || n <= k) {
            pick = boxes;
        } else {
            for (size_t s = 0; s < k; ++s) pick.push_back(boxes[s * n / k]);
        }
        if (pick.size() < 2) {
            report.excluded.push_back(id);
            continue;
        }
        chosen[id] = std::move(pick);
    }
    if (chosen.size() < 2)
        throw ValidationError("distance matrix needs at least 2 objects with 2 or more samples, found " +
                              std::to_string(chosen.size()));

    std::map<int64_t, std::vector<std::pair<int64_t, size_t>>> by_frame;  // frame -> (object, sample)
    std::map<int64_t, std::vector<Embedding>> embs;
    for (const auto& [id, boxes] : chosen) {
        embs[id].resize(boxes.size());
        for (size_t s = 0; s < boxes.size(); ++s) by_frame[boxes[s].frame_id].emplace_back(id, s);
    }
    for (const auto& [f, refs] : by_frame) {
        const GrayImage img = frames.load(f);
        for (const auto& [id, s] : refs)
            embs[id][s] = forward(checkpoint.config, checkpoint.weights,
                                  extract_patch(img, chosen[id][s].box, checkpoint.config.patch_resolution));
    }

    const size_t K = chosen.size();
    report.distances = Matrix(K, K);
    std::vector<const std::vector<Embedding>*> sets;
    for (const auto& [id, e] : embs) {
        report.object_ids.push_back(id);
        report.sample_counts.push_back(e.size());
        sets.push_back(&e);
    }
    for (size_t i = 0; i < K; ++i)
        for (size_t j = i; j < K; ++j) {
            double sum = 0.0;
            size_t count = 0;
            const auto& a = *sets[i];
            const auto& b = *sets[j];
            for (size_t p = 0; p < a.size(); ++p)
                for (size_t q = (i == j ? p + 1 : 0); q < b.size(); ++q) {
                    sum += squared_distance(a[p], b[q]);
                    ++count;
                }
            report.distances(i, j) = report.distances(j, i) = sum / static_cast<double>(count);
        }
    return report;
}

std::string format_distance_matrix(const DistanceMatrixReport& report) {
    json rows = json::array();
    for (size_t i = 0; i < report.distances.rows(); ++i) {
        json row = json::array();
        for (size_t j = 0; j < report.distances.cols(); ++j) row.push_back(report.distances(i, j));
        rows.push_back(std::move(row));
    }
    json j = {{"object_ids", report.object_ids},
              {"sample_counts", report.sample_counts},
              {"distances", std::move(rows)},
              {"excluded", report.excluded},
              {"diagonal_is_row_minimum", report.diagonal_is_row_minimum()}};
    return j.dump(1) + "\n";
}

}  // namespace seatrack

namespace seatrack {

double retrieval_accuracy(const std::vector<Embedding>& gallery, const std::vector<int64_t>& gallery_labels,
                          const std::vector<Embedding>& queries, const std::vector<int64_t>& query_labels) {
    if (gallery.size() != gallery_labels.size() || queries.size() != query_labels.size())
        throw std::invalid_argument("retrieval_accuracy: embeddings and labels differ in length");
    if (gallery.empty() || queries.empty()) throw std::invalid_argument("retrieval_accuracy: empty gallery or query set");
    size_t hits = 0;
    for (size_t q = 0; q < queries.size(); ++q) {
        size_t best = 0;
        double best_d = squared_distance(queries[q], gallery[0]);
        for (size_t g = 1; g < gallery.size(); ++g) {
            const double d = squared_distance(queries[q], gallery[g]);
            if (d < best_d) {
                best_d = d;
                best = g;
            }
        }
        if (gallery_labels[best] == query_labels[q]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(queries.size());
}

}  // namespace seatrack
