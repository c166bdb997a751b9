#include <chrono>
#include <map>
#include <sstream>

#include "seatrack/image.hpp"
#include "seatrack/tracker.hpp"

namespace seatrack {

SequenceRun run_sequence(const TrackerConfig& cfg, const SequenceManifest& manifest,
                         const std::vector<Detection>& detections, const FrameSource& frames,
                         const Checkpoint& checkpoint) {
    cfg.validate();
    checkpoint.config.validate();
    check_weights(checkpoint.config, checkpoint.weights);

    std::map<int64_t, std::vector<Detection>> by_frame;
    for (const auto& d : detections) {
        if (d.frame_id >= manifest.frame_count)
            throw ValidationError("detection in frame " + std::to_string(d.frame_id) + " but the sequence has " +
                                  std::to_string(manifest.frame_count) + " frames");
        if (d.confidence >= cfg.min_confidence) by_frame[d.frame_id].push_back(d);
    }

    Tracker tracker(cfg, manifest.image_width, manifest.image_height);
    SequenceRun run;
    run.tracks.sequence = manifest.name;
    for (int64_t f = 0; f < manifest.frame_count; ++f) {
        try {
            const auto start = std::chrono::steady_clock::now();
            static const std::vector<Detection> kNone;
            const auto it = by_frame.find(f);
            const std::vector<Detection>& dets = it == by_frame.end() ? kNone : it->second;
            std::vector<Embedding> embs;
            if (!dets.empty()) {
                const GrayImage img = frames.load(f);
                std::vector<Patch> patches;
                patches.reserve(dets.size());
                for (const auto& d : dets) patches.push_back(extract_patch(img, d.box, checkpoint.config.patch_resolution));
                embs = forward_batch(checkpoint.config, checkpoint.weights, patches);
            }
            const FrameResult res = tracker.step(dets, embs);
            const auto stop = std::chrono::steady_clock::now();
            AnnotatedFrame out;
            out.frame_id = f;
            for (const auto& r : res.reported) out.boxes.push_back({r.track_id, r.box});
            run.tracks.frames.push_back(std::move(out));
            run.step_ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
        } catch (const std::exception& e) {
            throw std::runtime_error("frame " + std::to_string(f) + ": " + e.what());
        }
    }
    return run;
}

std::string format_timings(const SequenceRun& run) {
    std::ostringstream out;
    out << "frame_id,step_ms\n";
    for (size_t i = 0; i < run.step_ms.size(); ++i)
        out << run.tracks.frames[i].frame_id << ',' << format_real(run.step_ms[i]) << '\n';
    return out.str();
}

}  // namespace seatrack

namespace seatrack {

std::vector<Embedding> embed_detections(const SequenceManifest& manifest, const std::vector<Detection>& detections,
                                        const FrameSource& frames, const Checkpoint& checkpoint) {
    std::map<int64_t, std::vector<size_t>> by_frame;
    for (size_t i = 0; i < detections.size(); ++i) {
        if (detections[i].frame_id >= manifest.frame_count)
            throw ValidationError("detection in frame " + std::to_string(detections[i].frame_id) +
                                  " but the sequence has " + std::to_string(manifest.frame_count) + " frames");
        by_frame[detections[i].frame_id].push_back(i);
    }
    std::vector<Embedding> out(detections.size());
    for (const auto& [f, idx] : by_frame) {
        try {
            const GrayImage img = frames.load(f);
            std::vector<Patch> patches;
            for (size_t i : idx) patches.push_back(extract_patch(img, detections[i].box, checkpoint.config.patch_resolution));
            auto embs = forward_batch(checkpoint.config, checkpoint.weights, patches);
            for (size_t k = 0; k < idx.size(); ++k) out[idx[k]] = std::move(embs[k]);
        } catch (const std::exception& e) {
            throw std::runtime_error("frame " + std::to_string(f) + ": " + e.what());
        }
    }
    return out;
}

AnnotationFile track_embedded(const TrackerConfig& cfg, const SequenceManifest& manifest,
                              const std::vector<Detection>& detections, const std::vector<Embedding>& embeddings) {
    if (detections.size() != embeddings.size())
        throw std::invalid_argument("track_embedded: detection and embedding counts differ");
    std::map<int64_t, std::vector<size_t>> by_frame;
    for (size_t i = 0; i < detections.size(); ++i)
        if (detections[i].confidence >= cfg.min_confidence) by_frame[detections[i].frame_id].push_back(i);
    Tracker tracker(cfg, manifest.image_width, manifest.image_height);
    AnnotationFile out;
    out.sequence = manifest.name;
    for (int64_t f = 0; f < manifest.frame_count; ++f) {
        std::vector<Detection> dets;
        std::vector<Embedding> embs;
        if (auto it = by_frame.find(f); it != by_frame.end())
            for (size_t i : it->second) {
                dets.push_back(detections[i]);
                embs.push_back(embeddings[i]);
            }
        try {
            const FrameResult res = tracker.step(dets, embs);
            AnnotatedFrame frame;
            frame.frame_id = f;
            for (const auto& r : res.reported) frame.boxes.push_back({r.track_id, r.box});
            out.frames.push_back(std::move(frame));
        } catch (const std::exception& e) {
            throw std::runtime_error("frame " + std::to_string(f) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace seatrack
