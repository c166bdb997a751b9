#pragma once

#include <string>
#include <vector>

#include "seatrack/io.hpp"

namespace testing {

struct MotaFixture {
    std::string name;
    seatrack::AnnotationFile ground_truth;
    seatrack::AnnotationFile tracks;
    double expected_mota = 0.0;
    std::vector<int> expected_switches;
    long expected_frames_scored = 0;
};

// One object per frame; `ids[f]` is the track id covering it (0 = no track).
inline MotaFixture single_object_trace(std::string name, const std::vector<int64_t>& ids, double expected,
                                       std::vector<int> switches) {
    MotaFixture fx;
    fx.name = std::move(name);
    fx.ground_truth.sequence = fx.tracks.sequence = fx.name;
    for (size_t f = 0; f < ids.size(); ++f) {
        const seatrack::BoundingBox box{10.0 + 5.0 * f, 20, 30, 20};
        fx.ground_truth.frames.push_back({static_cast<int64_t>(f), {{1, box}}});
        seatrack::AnnotatedFrame tf{static_cast<int64_t>(f), {}};
        if (ids[f] != 0) tf.boxes.push_back({ids[f], {box.x + 1, box.y - 1, 30, 20}});
        fx.tracks.frames.push_back(tf);
    }
    fx.expected_mota = expected;
    fx.expected_switches = std::move(switches);
    fx.expected_frames_scored = static_cast<long>(ids.size());
    return fx;
}

inline MotaFixture all_correct() {
    MotaFixture fx;
    fx.name = "all-correct";
    fx.ground_truth.sequence = fx.tracks.sequence = fx.name;
    for (int64_t f = 0; f < 5; ++f) {
        const seatrack::BoundingBox a{10.0 + 3 * f, 10, 20, 20}, b{200.0 - 3 * f, 100, 25, 15};
        fx.ground_truth.frames.push_back({f, {{1, a}, {2, b}}});
        fx.tracks.frames.push_back({f, {{7, b}, {3, a}}});
        fx.expected_switches.push_back(0);
    }
    fx.expected_mota = 1.0;
    fx.expected_frames_scored = 5;
    return fx;
}

// Four frames, one object, the track id changes at the third frame.
inline MotaFixture one_switch() { return single_object_trace("one-switch", {1, 1, 2, 2}, 0.75, {0, 0, 1, 0}); }

// Track ids 1,1,2,2,1: switches at the third and fifth frames.
inline MotaFixture two_switches() {
    return single_object_trace("two-switches", {1, 1, 2, 2, 1}, 3.0 / 5.0, {0, 0, 1, 0, 1});
}

// one_switch with empty ground-truth frames interleaved.
inline MotaFixture one_switch_with_empty_frames() {
    MotaFixture base = one_switch();
    MotaFixture fx;
    fx.name = "one-switch-empty-frames";
    fx.ground_truth.sequence = fx.tracks.sequence = fx.name;
    int64_t next = 0;
    for (size_t i = 0; i < base.ground_truth.frames.size(); ++i) {
        auto g = base.ground_truth.frames[i];
        auto t = base.tracks.frames[i];
        g.frame_id = t.frame_id = next++;
        fx.ground_truth.frames.push_back(g);
        fx.tracks.frames.push_back(t);
        fx.expected_switches.push_back(base.expected_switches[i]);
        fx.ground_truth.frames.push_back({next, {}});
        fx.tracks.frames.push_back({next, {{5, {300, 300, 10, 10}}}});
        fx.expected_switches.push_back(0);
        ++next;
    }
    fx.expected_mota = 0.75;
    fx.expected_frames_scored = 4;
    return fx;
}

}  // namespace testing
