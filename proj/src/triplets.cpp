#include "seatrack/triplets.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <cmath>
#include <map>

#include "json.hpp"

namespace seatrack {

using nlohmann::json;

void JitterConfig::validate() const {
    if (!(max_translation_frac >= 0.0 && max_translation_frac < 0.5))
        throw std::invalid_argument("JitterConfig: max_translation_frac must lie in [0, 0.5)");
    if (!(scale_low > 0.0) || !(scale_low <= scale_high) || !std::isfinite(scale_high))
        throw std::invalid_argument("JitterConfig: scale range must satisfy 0 < low <= high");
    if (samples_per_anchor < 1) throw std::invalid_argument("JitterConfig: samples_per_anchor must be >= 1");
}

void AugmentConfig::validate() const {
    if (!(probability >= 0.0 && probability <= 1.0))
        throw std::invalid_argument("AugmentConfig: probability must lie in [0,1]");
    if (!(max_shear >= 0.0) || !(max_rotation >= 0.0))
        throw std::invalid_argument("AugmentConfig: bounds must be non-negative");
}

std::string NegativeSource::label() const {
    return (kind == Kind::Object ? "object " : "water ") + std::to_string(id);
}

PositiveSamples sample_positive_boxes(const BoundingBox& box, const JitterConfig& cfg, const ImageBounds& bounds,
                                      uint64_t stream_key) {
    cfg.validate();
    validate(box, "anchor box");
    Rng rng(derive_seed(cfg.seed, {stream_key, 0x504F53ULL}));
    PositiveSamples out;
    const double t = cfg.max_translation_frac;
    for (int s = 0; s < cfg.samples_per_anchor; ++s) {
        const double dx = rng.uniform(-t, t) * box.w;
        const double dy = rng.uniform(-t, t) * box.h;
        const double scale = rng.uniform(cfg.scale_low, cfg.scale_high);
        const double w = box.w * scale;
        const double h = box.h * scale;
        BoundingBox b{box.x + dx - (w - box.w) / 2.0, box.y + dy - (h - box.h) / 2.0, w, h};
        b = clip_to(b, bounds.width, bounds.height);
        if (b.w < 2.0 || b.h < 2.0) {
            ++out.skipped;
            continue;
        }
        out.boxes.push_back(b);
        out.sample_indices.push_back(s);
    }
    return out;
}

std::vector<NegativeCandidate> collect_negatives(const std::vector<GroundTruthBox>& frame_annotations,
                                                 int64_t anchor_id, const std::vector<BoundingBox>& water_boxes) {
    std::vector<NegativeCandidate> out;
    for (const auto& gt : frame_annotations)
        if (gt.object_id != anchor_id) out.push_back({gt.box, {NegativeSource::Kind::Object, gt.object_id}});
    for (size_t i = 0; i < water_boxes.size(); ++i)
        out.push_back({water_boxes[i], {NegativeSource::Kind::Water, static_cast<int64_t>(i)}});
    return out;
}

BoundingBox sample_water_box(const BoundingBox& region, double w, double h, Rng& rng) {
    const double bw = std::min(w, region.w);
    const double bh = std::min(h, region.h);
    const double x = region.x + rng.uniform() * (region.w - bw);
    const double y = region.y + rng.uniform() * (region.h - bh);
    return {x, y, bw, bh};
}

AffineParams draw_affine(const AugmentConfig& cfg, Rng& rng) {
    AffineParams p;
    p.shear_x = rng.uniform(-cfg.max_shear, cfg.max_shear);
    p.shear_y = rng.uniform(-cfg.max_shear, cfg.max_shear);
    p.rotation = rng.uniform(-cfg.max_rotation, cfg.max_rotation);
    return p;
}

GrayImage ManifestFrames::load(int64_t frame_id) const {
    if (frame_id < 0 || frame_id >= manifest_.frame_count)
        throw std::runtime_error("frame " + std::to_string(frame_id) + " is outside the sequence (" +
                                 std::to_string(manifest_.frame_count) + " frames)");
    const auto path = manifest_.frame_path(frame_id);
    if (!std::filesystem::exists(path))
        throw std::runtime_error("frame " + std::to_string(frame_id) + " image missing: " + path.string());
    return load_image(path);
}

namespace {

std::vector<GroundTruthBox> frame_boxes(const AnnotatedFrame& f) {
    std::vector<GroundTruthBox> out;
    for (const auto& b : f.boxes) out.push_back({f.frame_id, b.id, b.box});
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.object_id < b.object_id; });
    return out;
}

}  // namespace

TripletDataset build_triplet_dataset(const FrameSource& frames, const AnnotationFile& annotations,
                                     const std::vector<BoundingBox>& water_regions, const JitterConfig& jitter,
                                     const AugmentConfig& augment, int resolution) {
    jitter.validate();
    augment.validate();
    if (resolution < 2) throw std::invalid_argument("patch resolution must be >= 2");

    std::vector<const AnnotatedFrame*> ordered;
    for (const auto& f : annotations.frames)
        if (!f.boxes.empty()) ordered.push_back(&f);
    std::sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->frame_id < b->frame_id; });

    TripletDataset ds;
    std::map<int64_t, GrayImage> cache;
    auto image = [&](int64_t frame_id) -> const GrayImage& {
        auto it = cache.find(frame_id);
        if (it == cache.end()) it = cache.emplace(frame_id, frames.load(frame_id)).first;
        return it->second;
    };

    for (size_t ordinal = 0; ordinal < ordered.size(); ++ordinal) {
        const AnnotatedFrame& frame = *ordered[ordinal];
        // Keep only the current frame (plus any fallback frames loaded below).
        for (auto it = cache.begin(); it != cache.end();)
            it = it->first == frame.frame_id ? std::next(it) : cache.erase(it);
        const GrayImage& img = image(frame.frame_id);
        const ImageBounds bounds{static_cast<double>(img.width), static_cast<double>(img.height)};
        const auto objects = frame_boxes(frame);

        for (const auto& obj : objects) {
            const uint64_t fkey = static_cast<uint64_t>(frame.frame_id);
            const uint64_t okey = static_cast<uint64_t>(obj.object_id);

            std::vector<BoundingBox> water;
            for (size_t r = 0; r < water_regions.size(); ++r) {
                Rng wr(derive_seed(jitter.seed, {fkey, okey, 0x574154ULL, r}));
                water.push_back(sample_water_box(water_regions[r], obj.box.w, obj.box.h, wr));
            }
            auto negatives = collect_negatives(objects, obj.object_id, water);
            int64_t negative_frame = frame.frame_id;
            if (negatives.empty()) {
                // Nearest other frame with a different object; earlier frame wins ties.
                const AnnotatedFrame* best = nullptr;
                for (const AnnotatedFrame* other : ordered) {
                    if (other == &frame) continue;
                    auto cand = collect_negatives(frame_boxes(*other), obj.object_id, {});
                    if (cand.empty()) continue;
                    const auto dist = std::abs(other->frame_id - frame.frame_id);
                    if (!best || dist < std::abs(best->frame_id - frame.frame_id)) best = other;
                }
                if (best) {
                    negatives = collect_negatives(frame_boxes(*best), obj.object_id, {});
                    negative_frame = best->frame_id;
                }
            }
            if (negatives.empty()) {
                auto& missing = ds.report.objects_without_negatives;
                if (std::find(missing.begin(), missing.end(), obj.object_id) == missing.end())
                    missing.push_back(obj.object_id);
                continue;
            }

            const Patch anchor = extract_patch(img, obj.box, resolution);
            const auto positives = sample_positive_boxes(obj.box, jitter, bounds, derive_seed(fkey, {okey}));
            ds.report.skipped_positive_boxes += positives.skipped;
            for (size_t k = 0; k < positives.boxes.size(); ++k) {
                const int sample = positives.sample_indices[k];
                Triplet t;
                t.anchor = anchor;
                t.anchor_object_id = obj.object_id;
                t.positive = extract_patch(img, positives.boxes[k], resolution);
                t.provenance.frame_id = frame.frame_id;
                t.provenance.object_id = obj.object_id;
                t.provenance.sample_index = sample;
                t.provenance.anchor_box = obj.box;
                t.provenance.positive_box = positives.boxes[k];
                if (augment.enabled) {
                    Rng ar(derive_seed(jitter.seed, {fkey, okey, static_cast<uint64_t>(sample), 0x415547ULL}));
                    if (ar.bernoulli(augment.probability)) {
                        const AffineParams params = draw_affine(augment, ar);
                        t.positive = apply_affine(t.positive, params);
                        t.provenance.augment = params;
                    }
                }
                const auto& neg = negatives[(ordinal + static_cast<size_t>(sample)) % negatives.size()];
                t.negative = extract_patch(image(negative_frame), neg.box, resolution);
                t.negative_source = neg.source;
                t.provenance.negative_box = neg.box;
                t.provenance.negative_frame_id = negative_frame;
                ds.triplets.push_back(std::move(t));
            }
        }
    }
    return ds;
}

namespace {

json box_json(const BoundingBox& b) { return json::array({b.x, b.y, b.w, b.h}); }

}  // namespace

std::string format_dataset_manifest(const TripletDataset& dataset, const JitterConfig& jitter,
                                    const AugmentConfig& augment, int resolution) {
    json doc = json::object();
    doc["resolution"] = resolution;
    doc["jitter"] = {{"max_translation_frac", jitter.max_translation_frac},
                     {"scale_range", json::array({jitter.scale_low, jitter.scale_high})},
                     {"samples_per_anchor", jitter.samples_per_anchor},
                     {"seed", jitter.seed}};
    doc["augment"] = {{"enabled", augment.enabled},
                      {"max_shear", augment.max_shear},
                      {"max_rotation", augment.max_rotation},
                      {"probability", augment.probability}};
    json items = json::array();
    for (const auto& t : dataset.triplets) {
        const auto& p = t.provenance;
        json item = {{"frame", p.frame_id},
                     {"object", p.object_id},
                     {"sample", p.sample_index},
                     {"anchor_box", box_json(p.anchor_box)},
                     {"positive_box", box_json(p.positive_box)},
                     {"negative", {{"source", t.negative_source.label()},
                                   {"frame", p.negative_frame_id},
                                   {"box", box_json(p.negative_box)}}}};
        if (p.augment)
            item["augment"] = {{"shear_x", p.augment->shear_x},
                               {"shear_y", p.augment->shear_y},
                               {"rotation", p.augment->rotation}};
        else
            item["augment"] = nullptr;
        items.push_back(std::move(item));
    }
    doc["triplets"] = std::move(items);
    doc["report"] = {{"skipped_positive_boxes", dataset.report.skipped_positive_boxes},
                     {"objects_without_negatives", dataset.report.objects_without_negatives}};
    return doc.dump(1) + "\n";
}

std::vector<BoundingBox> read_water_regions(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    std::vector<BoundingBox> out;
    if (!doc.is_object() || !doc.contains("frames") || !doc["frames"].is_array())
        throw ValidationError(path.string() + ": field 'frames' missing or not an array");
    for (const auto& f : doc["frames"]) {
        if (!f.is_object() || !f.contains("boxes") || !f["boxes"].is_array())
            throw ValidationError(path.string() + ": frame entry without 'boxes' array");
        for (const auto& b : f["boxes"]) {
            for (const char* k : {"x", "y", "w", "h"})
                if (!b.contains(k) || !b[k].is_number())
                    throw ValidationError(path.string() + ": water box field '" + k + "' missing or not a number");
            BoundingBox box{b["x"].get<double>(), b["y"].get<double>(), b["w"].get<double>(), b["h"].get<double>()};
            validate(box, path.string() + " water region");
            out.push_back(box);
        }
    }
    return out;
}

void write_water_regions(const std::filesystem::path& path, const std::string& sequence,
                         const std::vector<BoundingBox>& regions) {
    AnnotationFile f;
    f.sequence = sequence;
    AnnotatedFrame frame;
    frame.frame_id = 0;
    for (size_t i = 0; i < regions.size(); ++i) frame.boxes.push_back({static_cast<int64_t>(i + 1), regions[i]});
    f.frames.push_back(std::move(frame));
    write_annotations(path, f);
}

}  // namespace seatrack

namespace seatrack {

namespace {

constexpr char kTripletMagic[8] = {'S', 'E', 'A', 'T', 'R', 'K', 'T', '\0'};
constexpr uint32_t kTripletVersion = 1;

class Writer {
public:
    template <typename T>
    void put(T v) {
        uint8_t raw[sizeof(T)];
        std::memcpy(raw, &v, sizeof(T));
        if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
        bytes.insert(bytes.end(), raw, raw + sizeof(T));
    }
    void box(const BoundingBox& b) {
        for (double v : {b.x, b.y, b.w, b.h}) put(v);
    }
    std::vector<uint8_t> bytes;
};

class Reader {
public:
    Reader(std::span<const uint8_t> b, std::string source) : bytes_(b), source_(std::move(source)) {}
    template <typename T>
    T get() {
        if (pos_ + sizeof(T) > bytes_.size()) throw TripletFileError(source_ + ": truncated triplet file");
        uint8_t raw[sizeof(T)];
        std::memcpy(raw, bytes_.data() + pos_, sizeof(T));
        if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
        pos_ += sizeof(T);
        T v;
        std::memcpy(&v, raw, sizeof(T));
        return v;
    }
    BoundingBox box() {
        BoundingBox b;
        b.x = get<double>();
        b.y = get<double>();
        b.w = get<double>();
        b.h = get<double>();
        return b;
    }
    bool done() const { return pos_ == bytes_.size(); }

private:
    std::span<const uint8_t> bytes_;
    std::string source_;
    size_t pos_ = 0;
};

}  // namespace

std::vector<uint8_t> serialize_triplets(const std::vector<Triplet>& triplets, int resolution) {
    Writer w;
    w.bytes.insert(w.bytes.end(), kTripletMagic, kTripletMagic + 8);
    w.put(kTripletVersion);
    w.put(static_cast<int32_t>(resolution));
    w.put(static_cast<uint64_t>(triplets.size()));
    for (const auto& t : triplets) {
        for (const Patch* p : {&t.anchor, &t.positive, &t.negative})
            if (p->resolution != resolution)
                throw std::invalid_argument("serialize_triplets: patch resolution differs from " +
                                            std::to_string(resolution));
        const Provenance& pv = t.provenance;
        w.put(static_cast<int64_t>(t.anchor_object_id));
        w.put(static_cast<uint8_t>(t.negative_source.kind == NegativeSource::Kind::Water ? 1 : 0));
        w.put(static_cast<int64_t>(t.negative_source.id));
        w.put(static_cast<int64_t>(pv.frame_id));
        w.put(static_cast<int64_t>(pv.object_id));
        w.put(static_cast<int32_t>(pv.sample_index));
        w.box(pv.anchor_box);
        w.box(pv.positive_box);
        w.put(static_cast<uint8_t>(pv.augment ? 1 : 0));
        const AffineParams a = pv.augment.value_or(AffineParams{});
        for (double v : {a.shear_x, a.shear_y, a.rotation}) w.put(v);
        w.box(pv.negative_box);
        w.put(static_cast<int64_t>(pv.negative_frame_id));
        for (const Patch* p : {&t.anchor, &t.positive, &t.negative})
            for (double v : p->data) w.put(v);
    }
    return std::move(w.bytes);
}

std::vector<Triplet> deserialize_triplets(std::span<const uint8_t> bytes, const std::string& source) {
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kTripletMagic, 8) != 0)
        throw TripletFileError(source + ": not a triplet file (bad magic)");
    Reader r(bytes.subspan(8), source);
    const auto version = r.get<uint32_t>();
    if (version != kTripletVersion)
        throw TripletFileError(source + ": unsupported triplet file version " + std::to_string(version));
    const int resolution = r.get<int32_t>();
    if (resolution < 2) throw TripletFileError(source + ": invalid patch resolution " + std::to_string(resolution));
    const auto count = r.get<uint64_t>();
    const size_t patch_bytes = static_cast<size_t>(resolution) * static_cast<size_t>(resolution) * 8 * 3;
    if (count > bytes.size() / patch_bytes) throw TripletFileError(source + ": truncated triplet file");
    std::vector<Triplet> out;
    out.reserve(count);
    for (uint64_t i = 0; i < count; ++i) {
        Triplet t;
        Provenance& pv = t.provenance;
        t.anchor_object_id = r.get<int64_t>();
        t.negative_source.kind = r.get<uint8_t>() ? NegativeSource::Kind::Water : NegativeSource::Kind::Object;
        t.negative_source.id = r.get<int64_t>();
        pv.frame_id = r.get<int64_t>();
        pv.object_id = r.get<int64_t>();
        pv.sample_index = r.get<int32_t>();
        pv.anchor_box = r.box();
        pv.positive_box = r.box();
        const bool has_aug = r.get<uint8_t>() != 0;
        AffineParams a;
        a.shear_x = r.get<double>();
        a.shear_y = r.get<double>();
        a.rotation = r.get<double>();
        if (has_aug) pv.augment = a;
        pv.negative_box = r.box();
        pv.negative_frame_id = r.get<int64_t>();
        for (Patch* p : {&t.anchor, &t.positive, &t.negative}) {
            *p = Patch(resolution);
            for (double& v : p->data) {
                v = r.get<double>();
                if (!std::isfinite(v)) throw TripletFileError(source + ": non-finite patch value");
            }
        }
        out.push_back(std::move(t));
    }
    if (!r.done()) throw TripletFileError(source + ": trailing bytes after " + std::to_string(count) + " triplets");
    return out;
}

void write_triplets(const std::filesystem::path& path, const std::vector<Triplet>& triplets, int resolution) {
    const auto bytes = serialize_triplets(triplets, resolution);
    write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::vector<Triplet> read_triplets(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TripletFileError("cannot open triplet file " + path.string());
    const std::vector<uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return deserialize_triplets(bytes, path.string());
}

}  // namespace seatrack
