#include "seatrack/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace seatrack {

bool is_valid(const BoundingBox& b) {
    return std::isfinite(b.x) && std::isfinite(b.y) && std::isfinite(b.w) &&
           std::isfinite(b.h) && b.w > 0.0 && b.h > 0.0;
}

void validate(const BoundingBox& b, const std::string& what) {
    if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(b.w) ||
        !std::isfinite(b.h))
        throw ValidationError(what + ": non-finite coordinate");
    if (b.w <= 0.0) throw ValidationError(what + ": width must be positive");
    if (b.h <= 0.0) throw ValidationError(what + ": height must be positive");
}

double centroid_distance(const BoundingBox& a, const BoundingBox& b) {
    return std::hypot(a.cx() - b.cx(), a.cy() - b.cy());
}

double intersection_area(const BoundingBox& a, const BoundingBox& b) {
    const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
    const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    return iw * ih;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
    const double inter = intersection_area(a, b);
    if (inter <= 0.0) return 0.0;
    const double uni = a.area() + b.area() - inter;
    return std::clamp(inter / uni, 0.0, 1.0);
}

BoundingBox clip_to(const BoundingBox& b, double width, double height) {
    const double x0 = std::max(b.x, 0.0);
    const double y0 = std::max(b.y, 0.0);
    const double x1 = std::min(b.right(), width);
    const double y1 = std::min(b.bottom(), height);
    return {x0, y0, x1 - x0, y1 - y0};
}

}  // namespace seatrack
