#include "seatrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace seatrack {

std::string to_string(AppearanceMetric m) { return m == AppearanceMetric::Cosine ? "COSINE" : "SQ_EUCLIDEAN"; }

AppearanceMetric parse_appearance_metric(const std::string& s) {
    if (s == "SQ_EUCLIDEAN" || s == "sq_euclidean") return AppearanceMetric::SqEuclidean;
    if (s == "COSINE" || s == "cosine") return AppearanceMetric::Cosine;
    throw ValidationError("unknown appearance metric '" + s + "' (SQ_EUCLIDEAN, COSINE)");
}

std::string to_string(TrackState s) {
    switch (s) {
        case TrackState::Tentative: return "TENTATIVE";
        case TrackState::Confirmed: return "CONFIRMED";
        case TrackState::Lost: return "LOST";
    }
    return "?";
}

void TrackerConfig::validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError("tracker: lambda must lie in [0,1]");
    if (!(cost_threshold >= 0.0 && cost_threshold <= 1.0))
        throw ValidationError("tracker: cost_threshold must lie in [0,1]");
    if (!(init_distance_threshold >= 0.0) || !std::isfinite(init_distance_threshold))
        throw ValidationError("tracker: init_distance_threshold must be a non-negative number of pixels");
    if (n_init < 1) throw ValidationError("tracker: n_init must be >= 1");
    if (max_age < 1) throw ValidationError("tracker: max_age must be >= 1");
    if (budget < 1) throw ValidationError("tracker: budget must be >= 1");
    if (!(min_confidence >= 0.0 && min_confidence <= 1.0))
        throw ValidationError("tracker: min_confidence must lie in [0,1]");
}

namespace {

using Index = std::vector<size_t>;

Index all_of(size_t n) {
    Index idx(n);
    std::iota(idx.begin(), idx.end(), size_t{0});
    return idx;
}

Matrix motion_sub(std::span<const Track> tracks, const Index& ti, std::span<const Detection> dets,
                  const Index& di, double diag) {
    Matrix m(ti.size(), di.size());
    for (size_t r = 0; r < ti.size(); ++r)
        for (size_t c = 0; c < di.size(); ++c)
            m(r, c) = std::min(1.0, centroid_distance(tracks[ti[r]].last_box, dets[di[c]].box) / diag);
    return m;
}

double metric_cost(const Embedding& a, const Embedding& b, AppearanceMetric metric) {
    if (a.size() != b.size()) throw std::invalid_argument("appearance_cost: embedding dimension mismatch");
    if (metric == AppearanceMetric::SqEuclidean) return std::min(1.0, squared_distance(a, b) / 4.0);
    double dot = 0.0;
    for (size_t k = 0; k < a.size(); ++k) dot += a[k] * b[k];
    return std::clamp((1.0 - dot) / 2.0, 0.0, 1.0);
}

Matrix appearance_sub(std::span<const Track> tracks, const Index& ti, std::span<const Embedding> embs,
                      const Index& di, AppearanceMetric metric) {
    Matrix m(ti.size(), di.size());
    for (size_t r = 0; r < ti.size(); ++r) {
        const Track& t = tracks[ti[r]];
        if (t.gallery.empty())
            throw std::logic_error("appearance_cost: track " + std::to_string(t.track_id) + " has an empty gallery");
        for (size_t c = 0; c < di.size(); ++c) {
            double best = 1.0;
            for (const auto& g : t.gallery) best = std::min(best, metric_cost(g, embs[di[c]], metric));
            m(r, c) = best;
        }
    }
    return m;
}

}  // namespace

Matrix motion_cost(std::span<const Track> tracks, std::span<const Detection> detections, double image_diag) {
    if (!(image_diag > 0.0)) throw std::invalid_argument("motion_cost: image diagonal must be positive");
    return motion_sub(tracks, all_of(tracks.size()), detections, all_of(detections.size()), image_diag);
}

Matrix appearance_cost(std::span<const Track> tracks, std::span<const Embedding> embeddings,
                       AppearanceMetric metric) {
    return appearance_sub(tracks, all_of(tracks.size()), embeddings, all_of(embeddings.size()), metric);
}

Matrix combined_cost(const Matrix& motion, const Matrix& appearance, double lambda) {
    if (motion.rows() != appearance.rows() || motion.cols() != appearance.cols())
        throw std::invalid_argument("combined_cost: shape mismatch " + std::to_string(motion.rows()) + "x" +
                                    std::to_string(motion.cols()) + " vs " + std::to_string(appearance.rows()) +
                                    "x" + std::to_string(appearance.cols()));
    Matrix out(motion.rows(), motion.cols());
    for (size_t r = 0; r < motion.rows(); ++r)
        for (size_t c = 0; c < motion.cols(); ++c)
            out(r, c) = lambda * motion(r, c) + (1.0 - lambda) * appearance(r, c);
    return out;
}

Tracker::Tracker(TrackerConfig cfg, int image_width, int image_height)
    : cfg_(cfg), diag_(std::hypot(static_cast<double>(image_width), static_cast<double>(image_height))) {
    cfg_.validate();
    if (image_width < 1 || image_height < 1) throw ValidationError("tracker: image size must be positive");
}

void Tracker::mark_matched(Track& t, const Detection& det, const Embedding& emb) {
    t.last_box = det.box;
    t.time_since_update = 0;
    ++t.hits;
    t.gallery.push_back(emb);
    while (t.gallery.size() > static_cast<size_t>(cfg_.budget)) t.gallery.pop_front();
}

FrameResult Tracker::step(std::span<const Detection> detections, std::span<const Embedding> embeddings) {
    if (detections.size() != embeddings.size())
        throw std::invalid_argument("tracker step: " + std::to_string(detections.size()) + " detections but " +
                                    std::to_string(embeddings.size()) + " embeddings");
    FrameResult result;
    std::vector<bool> det_used(detections.size(), false);
    std::vector<bool> track_matched(tracks_.size(), false);

    auto remaining = [&] {
        Index di;
        for (size_t d = 0; d < detections.size(); ++d)
            if (!det_used[d]) di.push_back(d);
        return di;
    };
    auto in_state = [&](TrackState s) {
        Index ti;
        for (size_t t = 0; t < tracks_.size(); ++t)
            if (tracks_[t].state == s) ti.push_back(t);
        return ti;
    };
    auto apply = [&](const Index& ti, const Index& di, const Matrix& cost, double gate) {
        const Assignment a = hungarian_assign(cost, gate);
        for (const auto& [r, c] : a.matches) {
            Track& t = tracks_[ti[r]];
            mark_matched(t, detections[di[c]], embeddings[di[c]]);
            track_matched[ti[r]] = true;
            det_used[di[c]] = true;
        }
    };

    // Stage 1: confirmed tracks on the combined cost.
    {
        const Index ti = in_state(TrackState::Confirmed), di = remaining();
        if (!ti.empty() && !di.empty()) {
            const Matrix motion = motion_sub(tracks_, ti, detections, di, diag_);
            const Matrix cost =
                cfg_.lambda == 1.0
                    ? motion
                    : combined_cost(motion, appearance_sub(tracks_, ti, embeddings, di, cfg_.appearance_metric),
                                    cfg_.lambda);
            apply(ti, di, cost, cfg_.cost_threshold);
        }
    }
    // Stage 2: lost tracks restored on appearance alone.
    {
        const Index ti = in_state(TrackState::Lost), di = remaining();
        if (!ti.empty() && !di.empty()) {
            apply(ti, di, appearance_sub(tracks_, ti, embeddings, di, cfg_.appearance_metric), cfg_.cost_threshold);
            for (size_t t : ti)
                if (track_matched[t]) tracks_[t].state = TrackState::Confirmed;
        }
    }
    // Stage 3: tentative tracks on raw centroid distance.
    {
        const Index ti = in_state(TrackState::Tentative), di = remaining();
        if (!ti.empty() && !di.empty()) {
            Matrix cost(ti.size(), di.size());
            for (size_t r = 0; r < ti.size(); ++r)
                for (size_t c = 0; c < di.size(); ++c)
                    cost(r, c) = centroid_distance(tracks_[ti[r]].last_box, detections[di[c]].box);
            apply(ti, di, cost, cfg_.init_distance_threshold);
        }
    }

    std::vector<Track> kept;
    kept.reserve(tracks_.size() + detections.size());
    for (size_t t = 0; t < tracks_.size(); ++t) {
        Track& tr = tracks_[t];
        if (track_matched[t]) {
            if (tr.state == TrackState::Tentative && tr.hits >= cfg_.n_init) tr.state = TrackState::Confirmed;
            kept.push_back(std::move(tr));
            continue;
        }
        tr.hits = 0;
        ++tr.time_since_update;
        if (tr.state == TrackState::Tentative || (tr.state == TrackState::Lost && tr.time_since_update > cfg_.max_age)) {
            result.removed.push_back(tr.track_id);
            continue;
        }
        tr.state = TrackState::Lost;
        if (tr.time_since_update > cfg_.max_age) {
            result.removed.push_back(tr.track_id);
            continue;
        }
        kept.push_back(std::move(tr));
    }
    // Stage 4: leftover detections start new tracks.
    for (size_t d = 0; d < detections.size(); ++d) {
        if (det_used[d]) continue;
        Track t;
        t.track_id = next_id_++;
        mark_matched(t, detections[d], embeddings[d]);
        if (t.hits >= cfg_.n_init) t.state = TrackState::Confirmed;
        result.created.push_back(t.track_id);
        kept.push_back(std::move(t));
    }
    tracks_ = std::move(kept);

    for (const auto& t : tracks_)
        if (t.state == TrackState::Confirmed && t.time_since_update == 0)
            result.reported.push_back({t.track_id, t.last_box, t.state});
    std::sort(result.reported.begin(), result.reported.end(),
              [](const ReportedTrack& a, const ReportedTrack& b) { return a.track_id < b.track_id; });
    return result;
}

}  // namespace seatrack
