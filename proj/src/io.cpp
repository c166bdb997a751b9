#include "seatrack/io.hpp"

#include <unistd.h>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "seatrack/image.hpp"

namespace seatrack {

using nlohmann::json;

const std::vector<AnnotatedBox>& AnnotationFile::boxes_for(int64_t frame_id) const {
    static const std::vector<AnnotatedBox> kEmpty;
    for (const auto& f : frames)
        if (f.frame_id == frame_id) return f.boxes;
    return kEmpty;
}

std::vector<GroundTruthBox> AnnotationFile::flatten() const {
    std::vector<GroundTruthBox> out;
    for (const auto& f : frames)
        for (const auto& b : f.boxes) out.push_back({f.frame_id, b.id, b.box});
    return out;
}

AnnotationFile AnnotationFile::from_boxes(std::string sequence,
                                          const std::vector<GroundTruthBox>& boxes,
                                          int64_t frame_count) {
    AnnotationFile file;
    file.sequence = std::move(sequence);
    int64_t last = frame_count - 1;
    for (const auto& b : boxes) last = std::max(last, b.frame_id);
    file.frames.resize(static_cast<size_t>(last + 1));
    for (int64_t i = 0; i <= last; ++i) file.frames[static_cast<size_t>(i)].frame_id = i;
    for (const auto& b : boxes) {
        if (b.frame_id < 0) throw ValidationError("negative frame id");
        file.frames[static_cast<size_t>(b.frame_id)].boxes.push_back({b.object_id, b.box});
    }
    return file;
}

fs::path SequenceManifest::frame_path(int64_t frame_id) const {
    return base_dir / expand_frame_pattern(image_path_pattern, frame_id);
}

fs::path SequenceManifest::resolve(const std::string& relative) const {
    return base_dir / relative;
}

std::string expand_frame_pattern(std::string_view pattern, int64_t frame_id) {
    std::string out;
    int conversions = 0;
    for (size_t i = 0; i < pattern.size(); ++i) {
        const char c = pattern[i];
        if (c != '%') {
            out.push_back(c);
            continue;
        }
        if (i + 1 < pattern.size() && pattern[i + 1] == '%') {
            out.push_back('%');
            ++i;
            continue;
        }
        size_t j = i + 1;
        bool zero = false;
        if (j < pattern.size() && pattern[j] == '0') {
            zero = true;
            ++j;
        }
        int width = 0;
        while (j < pattern.size() && pattern[j] >= '0' && pattern[j] <= '9')
            width = width * 10 + (pattern[j++] - '0');
        if (j >= pattern.size() || pattern[j] != 'd')
            throw ValidationError("image_path_pattern: unsupported conversion in '" +
                                  std::string(pattern) + "'");
        std::string digits = std::to_string(frame_id);
        if (static_cast<int>(digits.size()) < width)
            digits.insert(0, static_cast<size_t>(width) - digits.size(), zero ? '0' : ' ');
        out += digits;
        ++conversions;
        i = j;
    }
    if (conversions != 1)
        throw ValidationError("image_path_pattern must contain exactly one %d conversion: '" +
                              std::string(pattern) + "'");
    return out;
}

std::string format_real(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
    const fs::path parent = path.has_parent_path() ? path.parent_path() : fs::path(".");
    if (!fs::is_directory(parent))
        throw std::runtime_error("directory does not exist: " + parent.string());
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw std::runtime_error("cannot replace " + path.string());
    }
}

// --- detections ------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

[[noreturn]] void field_error(std::string_view source, size_t line, std::string_view field,
                              std::string_view msg) {
    throw ValidationError(std::string(source) + ":" + std::to_string(line) + ": field '" +
                          std::string(field) + "': " + std::string(msg));
}

template <typename T>
T parse_number(std::string_view text, std::string_view source, size_t line, std::string_view field) {
    text = trim(text);
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
        field_error(source, line, field, "malformed value '" + std::string(text) + "'");
    return value;
}

}  // namespace

std::vector<Detection> parse_detections(std::string_view text, std::string_view source) {
    static constexpr const char* kFields[] = {"frame_id", "x", "y", "w", "h", "confidence",
                                              "class_label"};
    std::vector<Detection> out;
    size_t line_no = 0;
    while (!text.empty()) {
        const size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (trim(line).empty()) continue;

        std::vector<std::string_view> parts;
        size_t start = 0;
        while (true) {
            const size_t comma = line.find(',', start);
            parts.push_back(line.substr(start, comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (parts.size() != 7)
            throw ValidationError(std::string(source) + ":" + std::to_string(line_no) +
                                  ": expected 7 fields, got " + std::to_string(parts.size()));
        Detection d;
        d.frame_id = parse_number<int64_t>(parts[0], source, line_no, kFields[0]);
        d.box.x = parse_number<double>(parts[1], source, line_no, kFields[1]);
        d.box.y = parse_number<double>(parts[2], source, line_no, kFields[2]);
        d.box.w = parse_number<double>(parts[3], source, line_no, kFields[3]);
        d.box.h = parse_number<double>(parts[4], source, line_no, kFields[4]);
        d.confidence = parse_number<double>(parts[5], source, line_no, kFields[5]);
        d.class_label = parse_number<int>(parts[6], source, line_no, kFields[6]);
        if (d.frame_id < 0) field_error(source, line_no, "frame_id", "must be non-negative");
        if (!(d.box.w > 0.0)) field_error(source, line_no, "w", "must be positive");
        if (!(d.box.h > 0.0)) field_error(source, line_no, "h", "must be positive");
        if (!(d.confidence >= 0.0 && d.confidence <= 1.0))
            field_error(source, line_no, "confidence", "must lie in [0,1]");
        try {
            validate(d.box);
        } catch (const ValidationError& e) {
            throw ValidationError(std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
        }
        out.push_back(d);
    }
    return out;
}

std::vector<Detection> read_detections(const fs::path& path) {
    return parse_detections(read_text_file(path), path.string());
}

std::string format_detections(const std::vector<Detection>& detections) {
    std::string out;
    for (const auto& d : detections) {
        out += std::to_string(d.frame_id);
        for (double v : {d.box.x, d.box.y, d.box.w, d.box.h, d.confidence}) {
            out += ',';
            out += format_real(v);
        }
        out += ',';
        out += std::to_string(d.class_label);
        out += '\n';
    }
    return out;
}

void write_detections(const fs::path& path, const std::vector<Detection>& detections) {
    write_file_atomic(path, format_detections(detections));
}

// --- annotations -----------------------------------------------------------

void validate_annotations(const AnnotationFile& file) {
    std::set<int64_t> frame_ids;
    for (const auto& f : file.frames) {
        if (f.frame_id < 0) throw ValidationError("negative frame_id " + std::to_string(f.frame_id));
        if (!frame_ids.insert(f.frame_id).second)
            throw ValidationError("duplicate frame_id " + std::to_string(f.frame_id));
        std::set<int64_t> ids;
        for (const auto& b : f.boxes) {
            const std::string where =
                "frame " + std::to_string(f.frame_id) + " box id " + std::to_string(b.id);
            if (b.id <= 0) throw ValidationError(where + ": id must be positive");
            if (!ids.insert(b.id).second) throw ValidationError(where + ": duplicate id in frame");
            validate(b.box, where);
        }
    }
}

namespace {

double json_real(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number())
        throw ValidationError(where + ": field '" + key + "' missing or not a number");
    return it->get<double>();
}

int64_t json_int(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number_integer())
        throw ValidationError(where + ": field '" + key + "' missing or not an integer");
    return it->get<int64_t>();
}

}  // namespace

AnnotationFile parse_annotations(std::string_view text, std::string_view source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string(source) + ": " + e.what());
    }
    const std::string src(source);
    if (!doc.is_object()) throw ValidationError(src + ": top level must be an object");
    AnnotationFile file;
    if (auto it = doc.find("sequence"); it != doc.end()) {
        if (!it->is_string()) throw ValidationError(src + ": field 'sequence' must be a string");
        file.sequence = it->get<std::string>();
    }
    auto frames = doc.find("frames");
    if (frames == doc.end() || !frames->is_array())
        throw ValidationError(src + ": field 'frames' missing or not an array");
    for (size_t fi = 0; fi < frames->size(); ++fi) {
        const json& jf = (*frames)[fi];
        const std::string where = src + ": frames[" + std::to_string(fi) + "]";
        if (!jf.is_object()) throw ValidationError(where + ": not an object");
        AnnotatedFrame frame;
        frame.frame_id = json_int(jf, "frame_id", where);
        auto boxes = jf.find("boxes");
        if (boxes == jf.end() || !boxes->is_array())
            throw ValidationError(where + ": field 'boxes' missing or not an array");
        for (size_t bi = 0; bi < boxes->size(); ++bi) {
            const json& jb = (*boxes)[bi];
            const std::string bwhere = where + ".boxes[" + std::to_string(bi) + "]";
            if (!jb.is_object()) throw ValidationError(bwhere + ": not an object");
            AnnotatedBox b;
            b.id = json_int(jb, "id", bwhere);
            b.box = {json_real(jb, "x", bwhere), json_real(jb, "y", bwhere),
                     json_real(jb, "w", bwhere), json_real(jb, "h", bwhere)};
            frame.boxes.push_back(b);
        }
        file.frames.push_back(std::move(frame));
    }
    try {
        validate_annotations(file);
    } catch (const ValidationError& e) {
        throw ValidationError(src + ": " + e.what());
    }
    return file;
}

AnnotationFile read_annotations(const fs::path& path) {
    return parse_annotations(read_text_file(path), path.string());
}

std::string format_annotations(const AnnotationFile& file) {
    json doc = json::object();
    doc["sequence"] = file.sequence;
    json frames = json::array();
    for (const auto& f : file.frames) {
        json boxes = json::array();
        for (const auto& b : f.boxes) {
            json jb = json::object();
            jb["id"] = b.id;
            jb["x"] = b.box.x;
            jb["y"] = b.box.y;
            jb["w"] = b.box.w;
            jb["h"] = b.box.h;
            boxes.push_back(std::move(jb));
        }
        json jf = json::object();
        jf["frame_id"] = f.frame_id;
        jf["boxes"] = std::move(boxes);
        frames.push_back(std::move(jf));
    }
    doc["frames"] = std::move(frames);
    return doc.dump(1) + "\n";
}

void write_annotations(const fs::path& path, const AnnotationFile& file) {
    validate_annotations(file);
    write_file_atomic(path, format_annotations(file));
}

// --- manifest --------------------------------------------------------------

SequenceManifest read_manifest(const fs::path& path) {
    const std::string src = path.string();
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ValidationError(src + ": " + e.what());
    }
    if (!doc.is_object()) throw ValidationError(src + ": top level must be an object");
    SequenceManifest m;
    auto str = [&](const char* key, bool required) -> std::string {
        auto it = doc.find(key);
        if (it == doc.end()) {
            if (required) throw ValidationError(src + ": field '" + key + "' missing");
            return {};
        }
        if (!it->is_string()) throw ValidationError(src + ": field '" + key + "' must be a string");
        return it->get<std::string>();
    };
    m.name = str("name", true);
    m.image_path_pattern = str("image_path_pattern", true);
    m.annotations = str("annotations", false);
    m.detections = str("detections", false);
    m.water = str("water", false);
    m.frame_count = json_int(doc, "frame_count", src);
    m.image_width = static_cast<int>(json_int(doc, "image_width", src));
    m.image_height = static_cast<int>(json_int(doc, "image_height", src));
    if (m.frame_count < 1) throw ValidationError(src + ": frame_count must be >= 1");
    if (m.image_width < 1 || m.image_height < 1)
        throw ValidationError(src + ": image dimensions must be positive");
    expand_frame_pattern(m.image_path_pattern, 0);
    m.base_dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    return m;
}

std::string format_manifest(const SequenceManifest& m) {
    json doc = json::object();
    doc["name"] = m.name;
    doc["frame_count"] = m.frame_count;
    doc["image_width"] = m.image_width;
    doc["image_height"] = m.image_height;
    doc["image_path_pattern"] = m.image_path_pattern;
    if (!m.annotations.empty()) doc["annotations"] = m.annotations;
    if (!m.detections.empty()) doc["detections"] = m.detections;
    if (!m.water.empty()) doc["water"] = m.water;
    return doc.dump(2) + "\n";
}

void write_manifest(const fs::path& path, const SequenceManifest& m) {
    write_file_atomic(path, format_manifest(m));
}

void validate_manifest_frames(const SequenceManifest& m) {
    for (int64_t i = 0; i < m.frame_count; ++i) {
        const fs::path p = m.frame_path(i);
        if (!fs::exists(p)) throw ValidationError("frame " + std::to_string(i) + " missing: " + p.string());
        const GrayImage img = load_image(p);
        if (img.width != m.image_width || img.height != m.image_height)
            throw ValidationError("frame " + std::to_string(i) + " has size " +
                                  std::to_string(img.width) + "x" + std::to_string(img.height) +
                                  ", manifest declares " + std::to_string(m.image_width) + "x" +
                                  std::to_string(m.image_height));
    }
}

}  // namespace seatrack
