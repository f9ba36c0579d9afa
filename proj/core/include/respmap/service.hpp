#pragma once

// HTTP backend for the questionnaire: file-backed sessions, block
// submission, analysis, what-if previews and export.
//
// No authentication. Run it on a facilitator's machine or a trusted intranet.

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "respmap/model.hpp"
#include "respmap/rules.hpp"

namespace respmap {

struct SessionInfo {
    std::string id;
    std::string created_at;  // RFC 3339, UTC
    std::string updated_at;

    friend bool operator==(const SessionInfo&, const SessionInfo&) = default;
};

struct SessionRecord {
    SessionInfo info;
    ResponsibilityMap map;

    friend bool operator==(const SessionRecord&, const SessionRecord&) = default;
};

/// One `<id>.json` file per session in a directory. Writes go to a temporary
/// file that is renamed over the old one, so a reader never sees a torn file.
class SessionStore {
public:
    /// Creates the directory if needed and loads existing sessions. Throws
    /// Error when the directory cannot be created or written.
    explicit SessionStore(std::filesystem::path dir);

    const std::filesystem::path& directory() const noexcept { return dir_; }
    /// Files that were present but could not be loaded.
    const std::vector<std::string>& load_warnings() const noexcept { return load_warnings_; }

    SessionRecord create(std::string map_name);
    std::optional<SessionRecord> get(const std::string& id) const;
    std::vector<SessionInfo> list() const;

    using Mutation = std::function<ResponsibilityMap(const ResponsibilityMap&)>;
    /// Runs `mutate` and persists its result while holding the session's
    /// lock; concurrent updates to one session are serialised. Returns
    /// nullopt for an unknown id. Exceptions from `mutate` leave the session
    /// untouched.
    std::optional<SessionRecord> update(const std::string& id, const Mutation& mutate);

    std::filesystem::path path_for(const std::string& id) const;

    /// Serialised session file contents.
    static std::string serialize(const SessionRecord& record);
    /// Throws Error on malformed content.
    static SessionRecord deserialize(std::string_view text);

private:
    struct Entry {
        mutable std::mutex mutex;
        SessionRecord record;
    };

    std::shared_ptr<Entry> find(const std::string& id) const;
    void persist(const SessionRecord& record) const;

    std::filesystem::path dir_;
    std::vector<std::string> load_warnings_;
    mutable std::shared_mutex index_mutex_;
    std::unordered_map<std::string, std::shared_ptr<Entry>> sessions_;
};

struct HttpResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

/// Request handlers, independent of the HTTP transport.
class Service {
public:
    Service(SessionStore& store, RuleConfig policy);

    HttpResponse health() const;
    /// Optional body {"name": "..."}.
    HttpResponse create_session(std::string_view body);
    HttpResponse list_sessions() const;
    HttpResponse get_session(const std::string& id) const;
    /// Block 1 {"actors": [...]}, 2 {"tasks": {...}}, 3 {"responsibilities":
    /// {...}}, 4 {"authorities": {...}}, 5 {"channels": [...]}. The block is
    /// replaced as a whole.
    HttpResponse submit_block(const std::string& id, std::string_view block, std::string_view body);
    HttpResponse analysis(const std::string& id, std::string_view locale) const;
    /// Overrides: "actors" and "channels" replace their block; "tasks",
    /// "responsibilities" and "authorities" override the listed slots only.
    /// Never modifies the session.
    HttpResponse whatif(const std::string& id, std::string_view body, std::string_view locale) const;
    HttpResponse export_session(const std::string& id, std::string_view format) const;
    HttpResponse questions(std::string_view locale) const;
    HttpResponse index_page() const;

    const RuleConfig& policy() const noexcept { return policy_; }

private:
    SessionStore& store_;
    RuleConfig policy_;
};

/// HTTP front end (cpp-httplib) for a Service.
class HttpServer {
public:
    explicit HttpServer(Service& service, std::optional<std::filesystem::path> static_dir = std::nullopt);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Returns false when the address cannot be bound. Port 0 picks a free port.
    bool bind(const std::string& host, int port);
    int port() const noexcept;
    /// Blocks until stop() is called.
    void run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace respmap
