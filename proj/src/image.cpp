#include "seatrack/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "seatrack/io.hpp"

namespace seatrack {

namespace {

std::vector<uint8_t> read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open image " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

uint8_t quantize(float v) {
    const float c = std::clamp(v, 0.0f, 1.0f);
    return static_cast<uint8_t>(std::lround(c * 255.0f));
}

constexpr uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

}  // namespace

GrayImage load_image(const std::filesystem::path& path) {
    const std::vector<uint8_t> bytes = read_bytes(path);
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return decode_pgm(bytes, path.string());
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSignature, 8) == 0)
        return decode_png(bytes, path.string());
    throw ImageFormatError(path.string() + ": unsupported image format (expected binary PGM or PNG)");
}

GrayImage decode_pgm(const std::vector<uint8_t>& bytes, const std::string& source) {
    size_t pos = 0;
    auto fail = [&](const std::string& msg) -> void {
        throw ImageFormatError(source + ": corrupt PGM header: " + msg);
    };
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') fail("missing P5 magic");
    pos = 2;
    auto skip_ws = [&] {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(bytes[pos])) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto read_int = [&](const char* what) -> long {
        skip_ws();
        if (pos >= bytes.size() || !std::isdigit(bytes[pos])) fail(std::string("expected ") + what);
        long v = 0;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            v = v * 10 + (bytes[pos++] - '0');
            if (v > 1'000'000) fail(std::string(what) + " too large");
        }
        return v;
    };
    const long w = read_int("width");
    const long h = read_int("height");
    const long maxval = read_int("maxval");
    if (w <= 0 || h <= 0) fail("non-positive dimensions");
    if (maxval != 255) throw ImageFormatError(source + ": only 8-bit PGM (maxval 255) is supported");
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) fail("missing separator before raster");
    ++pos;
    const size_t n = static_cast<size_t>(w) * static_cast<size_t>(h);
    if (bytes.size() - pos < n) throw ImageFormatError(source + ": truncated PGM raster");
    GrayImage img(static_cast<int>(w), static_cast<int>(h));
    for (size_t i = 0; i < n; ++i) img.data[i] = static_cast<float>(bytes[pos + i]) / 255.0f;
    return img;
}

GrayImage decode_png(const std::vector<uint8_t>& bytes, const std::string& source) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
        throw ImageFormatError(source + ": corrupt PNG: " + image.message);
    if ((image.format & (PNG_FORMAT_FLAG_COLOR | PNG_FORMAT_FLAG_ALPHA | PNG_FORMAT_FLAG_LINEAR)) != 0) {
        png_image_free(&image);
        throw ImageFormatError(source + ": only 8-bit grayscale PNG is supported");
    }
    image.format = PNG_FORMAT_GRAY;
    std::vector<uint8_t> raster(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, raster.data(), 0, nullptr)) {
        png_image_free(&image);
        throw ImageFormatError(source + ": corrupt PNG: " + image.message);
    }
    GrayImage img(static_cast<int>(image.width), static_cast<int>(image.height));
    for (size_t i = 0; i < raster.size(); ++i) img.data[i] = static_cast<float>(raster[i]) / 255.0f;
    return img;
}

std::vector<uint8_t> encode_pgm(const GrayImage& img) {
    const std::string header =
        "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    std::vector<uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + img.data.size());
    for (float v : img.data) out.push_back(quantize(v));
    return out;
}

std::vector<uint8_t> encode_png(const GrayImage& img) {
    std::vector<uint8_t> raster(img.data.size());
    std::transform(img.data.begin(), img.data.end(), raster.begin(), quantize);
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width);
    image.height = static_cast<png_uint_32>(img.height);
    image.format = PNG_FORMAT_GRAY;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, raster.data(), 0, nullptr))
        throw std::runtime_error(std::string("PNG encode failed: ") + image.message);
    std::vector<uint8_t> out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, raster.data(), 0, nullptr))
        throw std::runtime_error(std::string("PNG encode failed: ") + image.message);
    out.resize(size);
    return out;
}

void save_pgm(const std::filesystem::path& path, const GrayImage& img) {
    const auto bytes = encode_pgm(img);
    write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

double sample_bilinear(const GrayImage& img, double x, double y) {
    const double u = x - 0.5;
    const double v = y - 0.5;
    const double fu = std::floor(u);
    const double fv = std::floor(v);
    const int c0 = static_cast<int>(fu);
    const int r0 = static_cast<int>(fv);
    const double ax = u - fu;
    const double ay = v - fv;
    auto px = [&](int r, int c) -> double {
        if (r < 0 || c < 0 || r >= img.height || c >= img.width) return 0.0;
        return img.at(r, c);
    };
    double out = 0.0;
    if (ax == 0.0 && ay == 0.0) return px(r0, c0);
    out += (1.0 - ax) * (1.0 - ay) * px(r0, c0);
    out += ax * (1.0 - ay) * px(r0, c0 + 1);
    out += (1.0 - ax) * ay * px(r0 + 1, c0);
    out += ax * ay * px(r0 + 1, c0 + 1);
    return out;
}

Patch extract_patch(const GrayImage& img, const BoundingBox& box, int resolution) {
    if (resolution < 2) throw std::invalid_argument("patch resolution must be >= 2");
    validate(box, "extract_patch box");
    if (box.right() <= 0.0 || box.bottom() <= 0.0 || box.x >= img.width || box.y >= img.height)
        throw std::invalid_argument("extract_patch: box lies entirely outside the image");
    Patch patch(resolution);
    const double p = resolution;
    for (int i = 0; i < resolution; ++i) {
        const double y = box.y + (i + 0.5) / p * box.h;
        for (int j = 0; j < resolution; ++j) {
            const double x = box.x + (j + 0.5) / p * box.w;
            patch.at(i, j) = std::clamp(sample_bilinear(img, x, y), 0.0, 1.0);
        }
    }
    return patch;
}

Patch apply_affine(const Patch& patch, const AffineParams& params) {
    if (params.is_identity()) return patch;
    const double c = std::cos(params.rotation);
    const double s = std::sin(params.rotation);
    // forward = R * S with S = [[1, shx], [shy, 1]]
    const double a = c - s * params.shear_y;
    const double b = c * params.shear_x - s;
    const double d = s + c * params.shear_y;
    const double e = s * params.shear_x + c;
    const double det = a * e - b * d;
    if (std::abs(det) < 1e-12) throw std::invalid_argument("apply_affine: singular transform");
    const double ia = e / det, ib = -b / det, id = -d / det, ie = a / det;

    const int n = patch.resolution;
    const double center = n / 2.0;
    Patch out(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double dx = j + 0.5 - center;
            const double dy = i + 0.5 - center;
            const double u = center + ia * dx + ib * dy - 0.5;
            const double v = center + id * dx + ie * dy - 0.5;
            const double fu = std::floor(u), fv = std::floor(v);
            const int c0 = static_cast<int>(fu), r0 = static_cast<int>(fv);
            const double ax = u - fu, ay = v - fv;
            auto px = [&](int r, int col) -> double {
                if (r < 0 || col < 0 || r >= n || col >= n) return 0.0;
                return patch.at(r, col);
            };
            const double val = (1.0 - ax) * (1.0 - ay) * px(r0, c0) + ax * (1.0 - ay) * px(r0, c0 + 1) +
                               (1.0 - ax) * ay * px(r0 + 1, c0) + ax * ay * px(r0 + 1, c0 + 1);
            out.at(i, j) = std::clamp(val, 0.0, 1.0);
        }
    }
    return out;
}

}  // namespace seatrack
