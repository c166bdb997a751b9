#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "seatrack/io.hpp"

namespace seatrack {

// Error carrying the HTTP status it maps to (400, 404, 409).
class SessionError : public std::runtime_error {
public:
    SessionError(int status, const std::string& msg) : std::runtime_error(msg), status_(status) {}
    int status() const { return status_; }

private:
    int status_;
};

class AnnotationSession {
public:
    // Loads `annotations_path` when it exists; candidate boxes for empty
    // frames come from the manifest's detections file when it has one.
    AnnotationSession(SequenceManifest manifest, std::filesystem::path annotations_path,
                      double preassign_gate = 50.0);

    const SequenceManifest& manifest() const { return manifest_; }
    const std::filesystem::path& annotations_path() const { return path_; }
    int64_t next_fresh_id() const { return next_fresh_id_; }
    bool dirty() const { return dirty_; }
    double preassign_gate() const { return gate_; }

    const std::vector<AnnotatedBox>& frame(int64_t i) const;
    std::vector<Detection> detections(int64_t i) const;

    // Proposed ids for frame i from frame i-1 by centroid distance. Does not
    // modify the session.
    std::vector<AnnotatedBox> preassign(int64_t i) const;

    void put_frame(int64_t i, std::vector<AnnotatedBox> boxes);
    void delete_box(int64_t i, int64_t id);
    void set_box_id(int64_t i, int64_t id, int64_t new_id);
    void save();

    AnnotationFile snapshot() const;

private:
    size_t index(int64_t i) const;
    void bump_fresh_id(const std::vector<AnnotatedBox>& boxes);

    SequenceManifest manifest_;
    std::filesystem::path path_;
    double gate_;
    std::vector<std::vector<AnnotatedBox>> frames_;
    std::vector<bool> present_;  // frame has an entry in the file
    std::vector<std::vector<Detection>> detections_;
    int64_t next_fresh_id_ = 1;
    bool dirty_ = false;
};

struct ApiResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

// Routes one API request against the session; no sockets involved.
ApiResponse handle_api_request(AnnotationSession& session, const std::string& method, const std::string& path,
                               const std::string& body);

class AnnotationServer {
public:
    // `static_dir` (optional) is served at "/" for the browser UI.
    explicit AnnotationServer(AnnotationSession& session, std::filesystem::path static_dir = {});
    ~AnnotationServer();

    // Binds to host:port (port 0 picks a free port); returns the bound port.
    int bind(const std::string& host, int port);
    // Blocks until stop() is called.
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace seatrack
