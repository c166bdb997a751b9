#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace seatrack {

// Pixel-space box, top-left corner plus size.
struct BoundingBox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double cx() const { return x + w / 2.0; }
    double cy() const { return y + h / 2.0; }
    double right() const { return x + w; }
    double bottom() const { return y + h; }
    double area() const { return w * h; }

    bool operator==(const BoundingBox&) const = default;
};

struct Detection {
    int64_t frame_id = 0;
    BoundingBox box;
    double confidence = 1.0;
    int class_label = 0;

    bool operator==(const Detection&) const = default;
};

struct GroundTruthBox {
    int64_t frame_id = 0;
    int64_t object_id = 0;
    BoundingBox box;

    bool operator==(const GroundTruthBox&) const = default;
};

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

bool is_valid(const BoundingBox& b);
// Throws ValidationError with `what` as context when the box is not valid.
void validate(const BoundingBox& b, const std::string& what = "box");

double centroid_distance(const BoundingBox& a, const BoundingBox& b);
double intersection_area(const BoundingBox& a, const BoundingBox& b);
double iou(const BoundingBox& a, const BoundingBox& b);

// Intersection of `b` with [0,width) x [0,height). Width/height may be <= 0
// when the box lies outside.
BoundingBox clip_to(const BoundingBox& b, double width, double height);

}  // namespace seatrack
