#pragma once

#include "litgrid/annotate.hpp"
#include "litgrid/engine.hpp"
#include "litgrid/model.hpp"
#include "litgrid/suggest.hpp"

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace litgrid {

struct HttpResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

/// One loaded document behind the HTTP API. Edit batches are serialized;
/// reads work on immutable snapshots.
class Session {
public:
    explicit Session(Document doc, std::optional<Library> library = std::nullopt);

    std::shared_ptr<const Document> snapshot() const;
    std::int64_t revision() const { return snapshot()->revision; }

    struct BatchOutcome {
        bool conflict = false;
        std::int64_t revision = 0;
    };

    /// All-or-nothing. Throws Error on the first failing edit, leaving the
    /// document untouched.
    BatchOutcome apply_edit_batch(std::int64_t base_revision, const std::vector<Edit>& edits);

    /// Values plus assertion diagnostics, cached per revision.
    std::shared_ptr<const EvalResult> values() const;
    std::shared_ptr<const EvalResult> values_for(const std::shared_ptr<const Document>& doc) const;

    /// Runs generate_stubs; when `apply` is set and stubs were found the new
    /// document becomes current.
    struct StubOutcome {
        std::vector<StubInfo> stubs;
        std::int64_t revision = 0;
    };
    StubOutcome stubs(bool apply);

    std::vector<Suggestion> suggest(std::string_view query, std::size_t k) const;

    /// Number of full evaluations so far; used to observe the cache.
    int evaluations() const { return evaluations_.load(); }

    HttpResponse handle(std::string_view method, std::string_view path,
                        const std::map<std::string, std::string>& query, std::string_view body);

private:
    std::shared_ptr<const Document> set_current(Document doc);

    mutable std::mutex mu_;       // guards current_ and cache_
    std::mutex write_mu_;         // one edit batch at a time
    std::shared_ptr<const Document> current_;
    mutable std::shared_ptr<const EvalResult> cache_;
    mutable std::int64_t cache_revision_ = -1;
    mutable std::atomic<int> evaluations_{0};
    std::optional<Library> library_;
};

/// Minimal page served at `/` that renders `/api/view`.
std::string_view index_page();

/// HTTP front end for a session. `bind` with port 0 picks a free port.
class HttpServer {
public:
    explicit HttpServer(Session& session);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Returns the bound port, or -1.
    int bind(const std::string& host, int port);
    /// Blocks until stop() is called.
    void run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Serves `session` until the process ends. Returns false when the port
/// cannot be bound.
bool serve_http(Session& session, const std::string& host, int port);

} // namespace litgrid
