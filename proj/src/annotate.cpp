#include "seatrack/annotate.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include "httplib.h"
#include "json.hpp"
#include "seatrack/assignment.hpp"
#include "seatrack/image.hpp"

namespace seatrack {

using nlohmann::json;

AnnotationSession::AnnotationSession(SequenceManifest manifest, std::filesystem::path annotations_path,
                                     double preassign_gate)
    : manifest_(std::move(manifest)), path_(std::move(annotations_path)), gate_(preassign_gate) {
    if (manifest_.frame_count < 1) throw ValidationError("manifest has no frames");
    if (!(gate_ >= 0.0)) throw ValidationError("preassign gate must be non-negative");
    const size_t n = static_cast<size_t>(manifest_.frame_count);
    frames_.resize(n);
    present_.assign(n, false);
    detections_.resize(n);
    if (std::filesystem::exists(path_)) {
        const AnnotationFile file = read_annotations(path_);
        validate_annotations(file);
        for (const auto& f : file.frames) {
            if (f.frame_id < 0 || f.frame_id >= manifest_.frame_count)
                throw ValidationError(path_.string() + ": frame " + std::to_string(f.frame_id) +
                                      " is outside the sequence");
            frames_[static_cast<size_t>(f.frame_id)] = f.boxes;
            present_[static_cast<size_t>(f.frame_id)] = true;
            bump_fresh_id(f.boxes);
        }
    }
    if (!manifest_.detections.empty()) {
        for (const auto& d : read_detections(manifest_.resolve(manifest_.detections)))
            if (d.frame_id < manifest_.frame_count) detections_[static_cast<size_t>(d.frame_id)].push_back(d);
    }
}

size_t AnnotationSession::index(int64_t i) const {
    if (i < 0 || i >= manifest_.frame_count)
        throw SessionError(404, "frame " + std::to_string(i) + " is outside 0.." +
                                    std::to_string(manifest_.frame_count - 1));
    return static_cast<size_t>(i);
}

void AnnotationSession::bump_fresh_id(const std::vector<AnnotatedBox>& boxes) {
    for (const auto& b : boxes) next_fresh_id_ = std::max(next_fresh_id_, b.id + 1);
}

const std::vector<AnnotatedBox>& AnnotationSession::frame(int64_t i) const { return frames_[index(i)]; }

std::vector<Detection> AnnotationSession::detections(int64_t i) const { return detections_[index(i)]; }

std::vector<AnnotatedBox> AnnotationSession::preassign(int64_t i) const {
    const size_t cur = index(i);
    if (i == 0) throw SessionError(400, "frame 0 has no previous frame");
    const auto& prev = frames_[cur - 1];
    std::vector<AnnotatedBox> proposal = frames_[cur];
    if (proposal.empty())
        for (const auto& d : detections_[cur]) proposal.push_back({0, d.box});
    Matrix cost(prev.size(), proposal.size());
    for (size_t r = 0; r < prev.size(); ++r)
        for (size_t c = 0; c < proposal.size(); ++c) cost(r, c) = centroid_distance(prev[r].box, proposal[c].box);
    const Assignment a = hungarian_assign(cost, gate_);
    std::vector<bool> assigned(proposal.size(), false);
    for (const auto& [r, c] : a.matches) {
        proposal[c].id = prev[r].id;
        assigned[c] = true;
    }
    int64_t fresh = next_fresh_id_;
    for (size_t c = 0; c < proposal.size(); ++c)
        if (!assigned[c]) proposal[c].id = fresh++;
    return proposal;
}

void AnnotationSession::put_frame(int64_t i, std::vector<AnnotatedBox> boxes) {
    const size_t k = index(i);
    std::set<int64_t> seen;
    for (const auto& b : boxes) {
        if (b.id < 1) throw SessionError(400, "box id " + std::to_string(b.id) + " must be positive");
        if (!seen.insert(b.id).second)
            throw SessionError(409, "id " + std::to_string(b.id) + " appears twice in frame " + std::to_string(i));
        if (!is_valid(b.box)) throw SessionError(400, "box " + std::to_string(b.id) + " has a non-positive size");
    }
    frames_[k] = std::move(boxes);
    present_[k] = true;
    bump_fresh_id(frames_[k]);
    dirty_ = true;
}

void AnnotationSession::delete_box(int64_t i, int64_t id) {
    auto& boxes = frames_[index(i)];
    auto it = std::find_if(boxes.begin(), boxes.end(), [&](const AnnotatedBox& b) { return b.id == id; });
    if (it == boxes.end())
        throw SessionError(404, "frame " + std::to_string(i) + " has no box with id " + std::to_string(id));
    boxes.erase(it);
    dirty_ = true;
}

void AnnotationSession::set_box_id(int64_t i, int64_t id, int64_t new_id) {
    auto& boxes = frames_[index(i)];
    auto it = std::find_if(boxes.begin(), boxes.end(), [&](const AnnotatedBox& b) { return b.id == id; });
    if (it == boxes.end())
        throw SessionError(404, "frame " + std::to_string(i) + " has no box with id " + std::to_string(id));
    if (new_id < 1) throw SessionError(400, "id " + std::to_string(new_id) + " must be positive");
    if (new_id == id) return;
    for (const auto& b : boxes)
        if (b.id == new_id)
            throw SessionError(409, "id " + std::to_string(new_id) + " is already used in frame " + std::to_string(i));
    it->id = new_id;
    next_fresh_id_ = std::max(next_fresh_id_, new_id + 1);
    dirty_ = true;
}

AnnotationFile AnnotationSession::snapshot() const {
    AnnotationFile f;
    f.sequence = manifest_.name;
    for (size_t i = 0; i < frames_.size(); ++i)
        if (present_[i] || !frames_[i].empty()) f.frames.push_back({static_cast<int64_t>(i), frames_[i]});
    return f;
}

void AnnotationSession::save() {
    write_annotations(path_, snapshot());
    dirty_ = false;
}

namespace {

json boxes_json(const std::vector<AnnotatedBox>& boxes) {
    json arr = json::array();
    for (const auto& b : boxes) arr.push_back({{"id", b.id}, {"x", b.box.x}, {"y", b.box.y}, {"w", b.box.w}, {"h", b.box.h}});
    return arr;
}

ApiResponse json_response(int status, const json& j) { return {status, "application/json", j.dump() + "\n"}; }

ApiResponse error_response(int status, const std::string& msg) { return json_response(status, {{"error", msg}}); }

bool parse_int(const std::string& s, int64_t& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    size_t start = 0;
    while (start <= path.size()) {
        size_t end = path.find('/', start);
        if (end == std::string::npos) end = path.size();
        if (end > start) parts.push_back(path.substr(start, end - start));
        start = end + 1;
    }
    return parts;
}

json parse_body(const std::string& body) {
    try {
        return json::parse(body);
    } catch (const json::parse_error& e) {
        throw SessionError(400, std::string("request body is not JSON: ") + e.what());
    }
}

double number_field(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number()) throw SessionError(400, where + ": field '" + key + "' must be a number");
    return it->get<double>();
}

int64_t int_field(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number_integer())
        throw SessionError(400, where + ": field '" + key + "' must be an integer");
    return it->get<int64_t>();
}

std::vector<AnnotatedBox> parse_boxes(const json& j) {
    const json* arr = &j;
    if (j.is_object()) {
        auto it = j.find("boxes");
        if (it == j.end()) throw SessionError(400, "body must contain a 'boxes' array");
        arr = &*it;
    }
    if (!arr->is_array()) throw SessionError(400, "'boxes' must be an array");
    std::vector<AnnotatedBox> out;
    for (size_t k = 0; k < arr->size(); ++k) {
        const json& b = (*arr)[k];
        const std::string where = "boxes[" + std::to_string(k) + "]";
        if (!b.is_object()) throw SessionError(400, where + " must be an object");
        out.push_back({int_field(b, "id", where),
                       {number_field(b, "x", where), number_field(b, "y", where), number_field(b, "w", where),
                        number_field(b, "h", where)}});
    }
    return out;
}

json frame_json(const AnnotationSession& s, int64_t i) {
    json dets = json::array();
    for (const auto& d : s.detections(i))
        dets.push_back({{"x", d.box.x}, {"y", d.box.y}, {"w", d.box.w}, {"h", d.box.h}, {"confidence", d.confidence}});
    return {{"frame_id", i}, {"boxes", boxes_json(s.frame(i))}, {"detections", std::move(dets)}};
}

ApiResponse route(AnnotationSession& s, const std::string& method, const std::vector<std::string>& p,
                  const std::string& body) {
    if (p.size() == 2 && p[1] == "sequence" && method == "GET") {
        const auto& m = s.manifest();
        return json_response(200, {{"name", m.name},
                                   {"frame_count", m.frame_count},
                                   {"image_width", m.image_width},
                                   {"image_height", m.image_height},
                                   {"has_detections", !m.detections.empty()},
                                   {"next_fresh_id", s.next_fresh_id()},
                                   {"preassign_gate", s.preassign_gate()},
                                   {"dirty", s.dirty()}});
    }
    if (p.size() == 2 && p[1] == "save" && method == "POST") {
        s.save();
        return json_response(200, {{"saved", s.annotations_path().string()}});
    }
    if (p.size() < 3 || p[1] != "frames") throw SessionError(404, "no such endpoint");
    int64_t i = 0;
    if (!parse_int(p[2], i)) throw SessionError(404, "frame index '" + p[2] + "' is not an integer");
    if (p.size() == 3) {
        if (method == "GET") return json_response(200, frame_json(s, i));
        if (method == "PUT") {
            s.put_frame(i, parse_boxes(parse_body(body)));
            return json_response(200, frame_json(s, i));
        }
        throw SessionError(405, method + " is not supported on " + "/api/frames/{i}");
    }
    if (p.size() == 4 && p[3] == "image" && method == "GET") {
        s.frame(i);
        GrayImage img;
        try {
            img = load_image(s.manifest().frame_path(i));
        } catch (const std::exception& e) {
            throw SessionError(500, e.what());
        }
        const auto png = encode_png(img);
        return {200, "image/png", std::string(png.begin(), png.end())};
    }
    if (p.size() == 4 && p[3] == "preassign" && method == "POST")
        return json_response(200, {{"frame_id", i}, {"boxes", boxes_json(s.preassign(i))}});
    if (p.size() == 5 && p[3] == "boxes") {
        int64_t id = 0;
        if (!parse_int(p[4], id)) throw SessionError(404, "box id '" + p[4] + "' is not an integer");
        if (method == "DELETE") {
            s.delete_box(i, id);
            return json_response(200, frame_json(s, i));
        }
        if (method == "PATCH") {
            const json j = parse_body(body);
            if (!j.is_object()) throw SessionError(400, "body must be an object with 'new_id'");
            s.set_box_id(i, id, int_field(j, "new_id", "body"));
            return json_response(200, frame_json(s, i));
        }
    }
    throw SessionError(404, "no such endpoint");
}

}  // namespace

ApiResponse handle_api_request(AnnotationSession& session, const std::string& method, const std::string& path,
                               const std::string& body) {
    const auto parts = split_path(path);
    try {
        if (parts.empty() || parts[0] != "api") throw SessionError(404, "no such endpoint");
        return route(session, method, parts, body);
    } catch (const SessionError& e) {
        return error_response(e.status(), e.what());
    } catch (const ValidationError& e) {
        return error_response(400, e.what());
    } catch (const std::exception& e) {
        return error_response(500, e.what());
    }
}

struct AnnotationServer::Impl {
    AnnotationSession& session;
    httplib::Server server;
    std::mutex mutex;
    std::string host;
    int port = 0;

    explicit Impl(AnnotationSession& s) : session(s) {}
};

AnnotationServer::AnnotationServer(AnnotationSession& session, std::filesystem::path static_dir)
    : impl_(std::make_unique<Impl>(session)) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        ApiResponse r;
        {
            std::lock_guard<std::mutex> lock(impl_->mutex);
            r = handle_api_request(impl_->session, req.method, req.path, req.body);
        }
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    const std::string pattern = R"(/api/.*)";
    impl_->server.Get(pattern, handler);
    impl_->server.Post(pattern, handler);
    impl_->server.Put(pattern, handler);
    impl_->server.Patch(pattern, handler);
    impl_->server.Delete(pattern, handler);
    if (!static_dir.empty() && !impl_->server.set_mount_point("/", static_dir.string()))
        throw ValidationError("static directory " + static_dir.string() + " does not exist");
}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::bind(const std::string& host, int port) {
    if (port == 0) {
        impl_->port = impl_->server.bind_to_any_port(host);
        if (impl_->port < 0) throw std::runtime_error("cannot bind to " + host);
    } else {
        if (!impl_->server.bind_to_port(host, port))
            throw std::runtime_error("cannot bind to " + host + ":" + std::to_string(port) + " (port busy?)");
        impl_->port = port;
    }
    return impl_->port;
}

void AnnotationServer::listen() { impl_->server.listen_after_bind(); }

void AnnotationServer::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace seatrack
