#include "seatrack/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "seatrack/rng.hpp"

namespace seatrack {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void SceneConfig::validate() const {
    if (width < 1 || height < 1) throw std::invalid_argument("SceneConfig: image size must be positive");
    if (frame_count < 1) throw std::invalid_argument("SceneConfig: frame_count must be >= 1");
    for (double p : {miss_probability, false_positive_rate, min_visible_fraction})
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("SceneConfig: probabilities must lie in [0,1]");
    if (!(noise_sigma >= 0.0) || !(detection_jitter >= 0.0))
        throw std::invalid_argument("SceneConfig: noise and jitter must be non-negative");
    for (const auto& o : objects) seatrack::validate(o.initial, "scene object");
    for (const auto& w : water_regions) seatrack::validate(w, "water region");
    if (false_positive_rate > 0.0 && water_regions.empty())
        throw std::invalid_argument("SceneConfig: false positives need at least one water region");
}

Preset parse_preset(const std::string& name) {
    std::string up = name;
    std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
    if (up == "STATIC") return Preset::Static;
    if (up == "DRIFT") return Preset::Drift;
    if (up == "CROSSING") return Preset::Crossing;
    if (up == "REENTRY") return Preset::Reentry;
    if (up == "CLUTTER") return Preset::Clutter;
    throw std::invalid_argument("unknown preset '" + name + "' (STATIC, DRIFT, CROSSING, REENTRY, CLUTTER)");
}

std::string to_string(Preset p) {
    switch (p) {
        case Preset::Static: return "STATIC";
        case Preset::Drift: return "DRIFT";
        case Preset::Crossing: return "CROSSING";
        case Preset::Reentry: return "REENTRY";
        case Preset::Clutter: return "CLUTTER";
    }
    return "?";
}

namespace {

std::vector<BoundingBox> default_water() { return {{20, 410, 250, 60}, {360, 410, 260, 60}}; }

}  // namespace

SceneConfig preset(Preset p) {
    SceneConfig cfg;
    cfg.name = to_string(p);
    cfg.water_regions = default_water();
    switch (p) {
        case Preset::Static:
            cfg.frame_count = 20;
            cfg.objects = {{{300, 220, 40, 30}, 0, 0, 0, {}}};
            break;
        case Preset::Drift:
            cfg.objects = {{{80, 100, 40, 30}, 1.5, 0.5, 0, {}},
                           {{400, 90, 44, 30}, -1.0, 0.8, 1, {}},
                           {{120, 300, 36, 28}, 1.2, -0.4, 2, {}},
                           {{460, 320, 42, 32}, -1.4, -0.6, 3, {}}};
            break;
        case Preset::Crossing:
            // Pairs meet head-on: A/B centroids coincide at frame 30, C/D at 45.
            cfg.objects = {{{100, 200, 40, 30}, 4, 0, 0, {}},
                           {{340, 200, 40, 30}, -4, 0, 1, {}},
                           {{150, 330, 40, 30}, 3, 0, 2, {}},
                           {{420, 330, 40, 30}, -3, 0, 3, {}}};
            break;
        case Preset::Reentry:
            // Object 1 leaves through the right edge and turns back at frame 22.
            cfg.objects = {{{480, 120, 40, 30}, 8, 0, 0, {{22, -8, 0}}},
                           {{100, 80, 44, 30}, 1.0, 0.5, 1, {}},
                           {{200, 300, 36, 28}, -1.0, 0.3, 2, {}},
                           {{420, 260, 42, 32}, -1.2, 0.4, 3, {}}};
            break;
        case Preset::Clutter:
            cfg.objects = {{{60, 150, 40, 30}, 2.0, 0.3, 0, {}},
                           {{520, 120, 44, 30}, -2.0, 0.6, 1, {}},
                           {{250, 320, 36, 28}, 1.0, -0.8, 2, {}},
                           {{380, 230, 42, 32}, -0.8, 0.9, 3, {}}};
            cfg.miss_probability = 0.1;
            cfg.false_positive_rate = 0.5;
            break;
    }
    return cfg;
}

SceneConfig preset(const std::string& name) { return preset(parse_preset(name)); }

BoundingBox object_box(const SceneObject& obj, int64_t frame) {
    double x = obj.initial.x, y = obj.initial.y, vx = obj.vx, vy = obj.vy;
    int64_t t = 0;
    for (const auto& ch : obj.velocity_changes) {
        if (ch.frame >= frame) break;
        x += vx * static_cast<double>(ch.frame - t);
        y += vy * static_cast<double>(ch.frame - t);
        t = ch.frame;
        vx = ch.vx;
        vy = ch.vy;
    }
    x += vx * static_cast<double>(frame - t);
    y += vy * static_cast<double>(frame - t);
    return {x, y, obj.initial.w, obj.initial.h};
}

namespace {

struct TextureParams {
    double freq;
    double angle;
    double phase;
    double base;
};

TextureParams texture_params(int id) {
    static constexpr std::array<TextureParams, 4> kTable{{
        {2.0, 0.0, 0.0, 0.60},
        {2.0, kPi / 2, 0.0, 0.55},
        {3.0, kPi / 4, kPi / 3, 0.65},
        {1.5, 3 * kPi / 4, kPi / 2, 0.50},
    }};
    if (id >= 0 && id < static_cast<int>(kTable.size())) return kTable[static_cast<size_t>(id)];
    const int k = std::abs(id);
    return {1.5 + 0.5 * (k % 4), ((k * 37) % 180) * kPi / 180.0, k * 0.9, 0.5 + 0.05 * (k % 4)};
}

bool covers(const BoundingBox& b, double px, double py) {
    return px >= b.x && px < b.right() && py >= b.y && py < b.bottom();
}

}  // namespace

double texture_value(int texture_id, double u, double v) {
    const TextureParams p = texture_params(texture_id);
    const double s = u * std::cos(p.angle) + v * std::sin(p.angle);
    return std::clamp(p.base + 0.3 * std::sin(2 * kPi * p.freq * s + p.phase), 0.0, 1.0);
}

GrayImage render_frame(const SceneConfig& cfg, int64_t frame) {
    cfg.validate();
    GrayImage img(cfg.width, cfg.height, static_cast<float>(cfg.background_mean));
    if (cfg.noise_sigma > 0.0) {
        Rng rng(derive_seed(cfg.seed, {static_cast<uint64_t>(frame), 0x4E4F495345ULL}));
        for (float& px : img.data)
            px = static_cast<float>(std::clamp(cfg.background_mean + cfg.noise_sigma * rng.normal(), 0.0, 1.0));
    }
    std::vector<BoundingBox> boxes;
    for (const auto& o : cfg.objects) boxes.push_back(object_box(o, frame));
    for (size_t i = 0; i < boxes.size(); ++i) {
        const BoundingBox& b = boxes[i];
        const BoundingBox c = clip_to(b, cfg.width, cfg.height);
        if (c.w <= 0 || c.h <= 0) continue;
        const int r0 = static_cast<int>(std::floor(c.y)), r1 = static_cast<int>(std::ceil(c.bottom()));
        const int c0 = static_cast<int>(std::floor(c.x)), c1 = static_cast<int>(std::ceil(c.right()));
        for (int r = r0; r < r1; ++r) {
            const double py = r + 0.5;
            for (int col = c0; col < c1; ++col) {
                const double px = col + 0.5;
                if (!covers(b, px, py)) continue;
                const double val = texture_value(cfg.objects[i].texture_id, (px - b.x) / b.w, (py - b.y) / b.h);
                if (cfg.overlap == OverlapRendering::Occlude) {
                    img.at(r, col) = static_cast<float>(val);
                    continue;
                }
                // Blend: mean over every object covering this pixel, written once by the first.
                bool earlier = false;
                for (size_t j = 0; j < i && !earlier; ++j) earlier = covers(boxes[j], px, py);
                if (earlier) continue;
                double sum = val;
                int count = 1;
                for (size_t j = i + 1; j < boxes.size(); ++j)
                    if (covers(boxes[j], px, py)) {
                        sum += texture_value(cfg.objects[j].texture_id, (px - boxes[j].x) / boxes[j].w,
                                             (py - boxes[j].y) / boxes[j].h);
                        ++count;
                    }
                img.at(r, col) = static_cast<float>(sum / count);
            }
        }
    }
    return img;
}

double visible_fraction(const SceneConfig& cfg, size_t index, int64_t frame) {
    const BoundingBox b = object_box(cfg.objects.at(index), frame);
    std::vector<BoundingBox> front;
    if (cfg.overlap == OverlapRendering::Occlude)
        for (size_t j = index + 1; j < cfg.objects.size(); ++j) front.push_back(object_box(cfg.objects[j], frame));
    long total = 0, visible = 0;
    const int r0 = static_cast<int>(std::floor(b.y)), r1 = static_cast<int>(std::ceil(b.bottom()));
    const int c0 = static_cast<int>(std::floor(b.x)), c1 = static_cast<int>(std::ceil(b.right()));
    for (int r = r0; r < r1; ++r)
        for (int c = c0; c < c1; ++c) {
            const double px = c + 0.5, py = r + 0.5;
            if (!covers(b, px, py)) continue;
            ++total;
            if (r < 0 || c < 0 || r >= cfg.height || c >= cfg.width) continue;
            bool hidden = false;
            for (const auto& f : front) hidden = hidden || covers(f, px, py);
            if (!hidden) ++visible;
        }
    return total ? static_cast<double>(visible) / static_cast<double>(total) : 0.0;
}

SceneTruth generate_truth(const SceneConfig& cfg) {
    cfg.validate();
    SceneTruth truth;
    truth.ground_truth.sequence = cfg.name;
    truth.water_regions = cfg.water_regions;
    for (int64_t f = 0; f < cfg.frame_count; ++f) {
        AnnotatedFrame gt;
        gt.frame_id = f;
        std::vector<Detection> dets;
        Rng rng(derive_seed(cfg.seed, {static_cast<uint64_t>(f), 0x444554ULL}));
        for (size_t i = 0; i < cfg.objects.size(); ++i) {
            const BoundingBox full = object_box(cfg.objects[i], f);
            const BoundingBox clipped = clip_to(full, cfg.width, cfg.height);
            // Draws happen for every object so one object's visibility does
            // not shift the others' random streams.
            const double miss_draw = rng.uniform();
            std::array<double, 4> jit{};
            for (double& j : jit) j = rng.uniform(-cfg.detection_jitter, cfg.detection_jitter);
            const double conf = 0.9 + 0.1 * rng.uniform();
            if (clipped.w < 1.0 || clipped.h < 1.0) continue;
            gt.boxes.push_back({static_cast<int64_t>(i + 1), clipped});
            if (visible_fraction(cfg, i, f) < cfg.min_visible_fraction) continue;
            if (miss_draw < cfg.miss_probability) continue;
            BoundingBox d{clipped.x + jit[0], clipped.y + jit[1], clipped.w + jit[2], clipped.h + jit[3]};
            d = clip_to(d, cfg.width, cfg.height);
            if (d.w < 1.0 || d.h < 1.0) continue;
            dets.push_back({f, d, std::min(conf, 1.0), 0});
        }
        if (rng.bernoulli(cfg.false_positive_rate)) {
            const auto& region = cfg.water_regions[static_cast<size_t>(rng.below(cfg.water_regions.size()))];
            const double w = rng.uniform(24.0, 48.0), h = rng.uniform(16.0, 32.0);
            const BoundingBox box = sample_water_box(region, w, h, rng);
            dets.push_back({f, box, 0.5 + 0.4 * rng.uniform(), 0});
        }
        std::stable_sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
            return a.box.x != b.box.x ? a.box.x < b.box.x : a.box.y < b.box.y;
        });
        truth.detections.insert(truth.detections.end(), dets.begin(), dets.end());
        truth.ground_truth.frames.push_back(std::move(gt));
    }
    return truth;
}

GrayImage SyntheticFrames::load(int64_t frame_id) const {
    if (frame_id < 0 || frame_id >= cfg_.frame_count)
        throw std::runtime_error("frame " + std::to_string(frame_id) + " is outside the synthetic sequence");
    return render_frame(cfg_, frame_id);
}

SequenceManifest write_sequence(const SceneConfig& cfg, const std::filesystem::path& dir) {
    cfg.validate();
    std::filesystem::create_directories(dir / "frames");
    SequenceManifest m;
    m.name = cfg.name;
    m.frame_count = cfg.frame_count;
    m.image_width = cfg.width;
    m.image_height = cfg.height;
    m.image_path_pattern = "frames/%06d.pgm";
    m.annotations = "gt.json";
    m.detections = "detections.txt";
    m.water = "water.json";
    m.base_dir = dir;
    for (int64_t f = 0; f < cfg.frame_count; ++f) save_pgm(m.frame_path(f), render_frame(cfg, f));
    const SceneTruth truth = generate_truth(cfg);
    write_annotations(dir / m.annotations, truth.ground_truth);
    write_detections(dir / m.detections, truth.detections);
    write_water_regions(dir / m.water, cfg.name, truth.water_regions);
    write_manifest(dir / "manifest.json", m);
    return m;
}

}  // namespace seatrack
