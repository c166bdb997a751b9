#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "seatrack/geometry.hpp"

namespace seatrack {

// Single-channel image, row-major, intensities in [0,1].
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    GrayImage() = default;
    GrayImage(int w, int h, float fill = 0.0f)
        : width(w), height(h), data(static_cast<size_t>(w) * static_cast<size_t>(h), fill) {}

    float at(int row, int col) const { return data[static_cast<size_t>(row) * width + col]; }
    float& at(int row, int col) { return data[static_cast<size_t>(row) * width + col]; }

    bool operator==(const GrayImage&) const = default;
};

// Square fixed-resolution crop fed to the embedding network.
struct Patch {
    int resolution = 0;
    std::vector<double> data;

    Patch() = default;
    explicit Patch(int p, double fill = 0.0)
        : resolution(p), data(static_cast<size_t>(p) * static_cast<size_t>(p), fill) {}

    double at(int row, int col) const { return data[static_cast<size_t>(row) * resolution + col]; }
    double& at(int row, int col) { return data[static_cast<size_t>(row) * resolution + col]; }

    bool operator==(const Patch&) const = default;
};

// Shear then rotate, about the patch center. Rotation in radians.
struct AffineParams {
    double shear_x = 0.0;
    double shear_y = 0.0;
    double rotation = 0.0;

    bool is_identity() const { return shear_x == 0.0 && shear_y == 0.0 && rotation == 0.0; }
    bool operator==(const AffineParams&) const = default;
};

class ImageFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// 8-bit binary PGM (P5) or 8-bit grayscale PNG; chosen by file signature.
GrayImage load_image(const std::filesystem::path& path);
GrayImage decode_pgm(const std::vector<uint8_t>& bytes, const std::string& source = "<memory>");
GrayImage decode_png(const std::vector<uint8_t>& bytes, const std::string& source = "<memory>");

std::vector<uint8_t> encode_pgm(const GrayImage& img);
std::vector<uint8_t> encode_png(const GrayImage& img);
void save_pgm(const std::filesystem::path& path, const GrayImage& img);

// Bilinear read at continuous pixel coordinates where pixel (r,c) has its
// center at (c + 0.5, r + 0.5); samples off the image contribute zero.
double sample_bilinear(const GrayImage& img, double x, double y);

// P x P bilinear resampling of `box`. Output cell (i,j) samples the box at
// relative position ((j+0.5)/P, (i+0.5)/P). Throws when the box does not
// overlap the image.
Patch extract_patch(const GrayImage& img, const BoundingBox& box, int resolution);

// Inverse-mapped affine warp about the patch center, bilinear, zero padding.
Patch apply_affine(const Patch& patch, const AffineParams& params);

}  // namespace seatrack
