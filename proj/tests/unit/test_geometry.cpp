#include "doctest.h"
#include "seatrack/geometry.hpp"
#include "seatrack/rng.hpp"

using namespace seatrack;

namespace {

BoundingBox random_box(Rng& rng) {
    return {rng.uniform(-50, 600), rng.uniform(-50, 400), rng.uniform(1, 120), rng.uniform(1, 90)};
}

}  // namespace

TEST_CASE("centroid distance") {
    const BoundingBox a{0, 0, 10, 10};
    CHECK(centroid_distance(a, a) == 0.0);
    CHECK(centroid_distance(a, {3, 4, 10, 10}) == doctest::Approx(5.0).epsilon(1e-15));
    // Centers matter, not corners: differently sized boxes around the same center.
    CHECK(centroid_distance({0, 0, 10, 10}, {-5, -5, 20, 20}) == 0.0);
}

TEST_CASE("centroid distance is symmetric and obeys the triangle inequality") {
    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        const BoundingBox a = random_box(rng), b = random_box(rng), c = random_box(rng);
        CHECK(centroid_distance(a, b) == centroid_distance(b, a));
        CHECK(centroid_distance(a, b) >= 0.0);
        CHECK(centroid_distance(a, c) <= centroid_distance(a, b) + centroid_distance(b, c) + 1e-9);
    }
}

TEST_CASE("iou fixtures") {
    const BoundingBox a{0, 0, 10, 10};
    CHECK(iou(a, a) == 1.0);
    CHECK(iou(a, {20, 20, 5, 5}) == 0.0);
    CHECK(iou(a, {10, 0, 10, 10}) == 0.0);  // touching edges share no area
    CHECK(iou(a, {5, 0, 10, 10}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(iou(a, {0, 0, 5, 10}) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("iou stays in [0,1] and shrinks as a translated copy slides away") {
    Rng rng(12);
    for (int i = 0; i < 200; ++i) {
        const BoundingBox a = random_box(rng), b = random_box(rng);
        const double v = iou(a, b);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(v == iou(b, a));
    }
    const BoundingBox base{10, 10, 40, 30};
    double prev = 1.0;
    for (int dx = 1; dx <= 45; ++dx) {
        const double v = iou(base, {base.x + dx, base.y, base.w, base.h});
        CHECK(v <= prev);
        prev = v;
    }
    CHECK(prev == 0.0);
}

TEST_CASE("box validation") {
    CHECK(is_valid({0, 0, 1, 1}));
    CHECK_FALSE(is_valid({0, 0, 0, 1}));
    CHECK_FALSE(is_valid({0, 0, 1, -2}));
    CHECK_FALSE(is_valid({std::nan(""), 0, 1, 1}));
    CHECK_FALSE(is_valid({0, 0, INFINITY, 1}));
    CHECK_THROWS_AS(validate({0, 0, 0, 1}, "detection"), ValidationError);
    CHECK_NOTHROW(validate({0, 0, 2, 1}));
}

TEST_CASE("clip_to") {
    CHECK(clip_to({-10, -5, 30, 20}, 640, 480) == BoundingBox{0, 0, 20, 15});
    CHECK(clip_to({630, 470, 30, 20}, 640, 480) == BoundingBox{630, 470, 10, 10});
    CHECK(clip_to({10, 10, 5, 5}, 640, 480) == BoundingBox{10, 10, 5, 5});
    const BoundingBox outside = clip_to({700, 10, 5, 5}, 640, 480);
    CHECK(outside.w <= 0.0);
}

TEST_CASE("derive_seed is order sensitive and deterministic") {
    CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
    CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
    CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
    Rng a(5), b(5);
    for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("rng helpers stay in range") {
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(rng.below(7) < 7u);
        const double v = rng.uniform(-2.0, 3.0);
        CHECK(v >= -2.0);
        CHECK(v < 3.0);
    }
}
