#include "respmap/service.hpp"

#include <httplib.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include "interchange_detail.hpp"
#include "respmap/catalog.hpp"
#include "respmap/format.hpp"
#include "respmap/report.hpp"

namespace respmap {

namespace fs = std::filesystem;
using detail::json;
using detail::ordered_json;

namespace {

constexpr std::size_t kIdLength = 32;

std::string random_hex(std::size_t nibbles) {
    static std::mutex mutex;
    static std::random_device device;
    std::lock_guard lock(mutex);
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(nibbles);
    while (out.size() < nibbles) {
        auto word = device();
        for (int i = 0; i < 8 && out.size() < nibbles; ++i, word >>= 4) out += kDigits[word & 0xf];
    }
    return out;
}

bool is_session_id(std::string_view s) {
    if (s.size() != kIdLength) return false;
    for (char c : s) {
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    }
    return true;
}

std::string now_utc() {
    using namespace std::chrono;
    const auto now = system_clock::now();
    const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
    const std::time_t t = system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    char out[40];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
    return out;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomically(const fs::path& target, const std::string& content) {
    fs::path tmp = target;
    tmp += ".tmp-" + random_hex(8);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw Error("cannot write " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error("cannot replace " + target.string() + ": " + ec.message());
    }
}

// -- responses -----------------------------------------------------------------

ordered_json diag_to_json(const ParseDiagnostic& d) {
    ordered_json o;
    o["path"] = d.path;
    o["code"] = d.code;
    o["message"] = d.message;
    return o;
}

HttpResponse error_response(int status, std::string_view code, const std::string& message,
                            const std::vector<ParseDiagnostic>& details = {}) {
    ordered_json err;
    err["code"] = std::string(code);
    err["message"] = message;
    if (!details.empty()) {
        err["details"] = ordered_json::array();
        for (const auto& d : details) {
            if (d.is_error()) err["details"].push_back(diag_to_json(d));
        }
    }
    ordered_json doc;
    doc["error"] = std::move(err);
    return {status, "application/json", doc.dump(2) + "\n"};
}

HttpResponse json_response(int status, const ordered_json& doc) {
    return {status, "application/json", doc.dump(2) + "\n"};
}

HttpResponse not_found(const std::string& id) {
    return error_response(404, "unknown_session", "no session with id '" + id + "'");
}

HttpResponse bad_locale(std::string_view locale) {
    return error_response(400, "unknown_locale",
                          "unknown locale '" + std::string(locale) + "'; supported locales: " + supported_locales());
}

ordered_json session_to_json(const SessionRecord& r) {
    ordered_json o;
    o["id"] = r.info.id;
    o["created_at"] = r.info.created_at;
    o["updated_at"] = r.info.updated_at;
    o["map"] = detail::map_to_json(r.map);
    return o;
}

json as_json(const ordered_json& o) { return json::parse(o.dump()); }

ordered_json as_ordered(std::string_view text) { return ordered_json::parse(text.begin(), text.end()); }

std::optional<Locale> locale_or_default(std::string_view s) {
    if (s.empty()) return Locale::en;
    return parse_locale(s);
}

/// A block or override document was rejected by the interchange reader.
struct Rejected {
    std::vector<ParseDiagnostic> diagnostics;
};

bool path_within(const std::string& path, const std::string& key) {
    const std::string root = "$." + key;
    if (path.compare(0, root.size(), root) != 0) return false;
    return path.size() == root.size() || path[root.size()] == '.' || path[root.size()] == '[';
}

constexpr std::array<std::string_view, kBlockCount> kBlockKeys{"actors", "tasks", "responsibilities",
                                                               "authorities", "channels"};

}  // namespace

// -- SessionStore --------------------------------------------------------------

SessionStore::SessionStore(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) {
        throw Error("cannot create session directory " + dir_.string() + (ec ? ": " + ec.message() : ""));
    }
    const fs::path probe = dir_ / (".probe-" + random_hex(8));
    {
        std::ofstream out(probe, std::ios::binary);
        if (!out || !(out << "probe") || !out.flush()) {
            throw Error("session directory " + dir_.string() + " is not writable");
        }
    }
    fs::remove(probe, ec);

    for (const auto& entry : fs::directory_iterator(dir_)) {
        const fs::path& p = entry.path();
        if (!entry.is_regular_file() || p.extension() != ".json") continue;
        const std::string stem = p.stem().string();
        if (!is_session_id(stem)) continue;
        try {
            SessionRecord rec = deserialize(read_file(p));
            if (rec.info.id != stem) throw Error("id does not match file name");
            auto e = std::make_shared<Entry>();
            e->record = std::move(rec);
            sessions_.emplace(stem, std::move(e));
        } catch (const std::exception& ex) {
            load_warnings_.push_back(p.filename().string() + ": " + ex.what());
        }
    }
}

fs::path SessionStore::path_for(const std::string& id) const { return dir_ / (id + ".json"); }

std::string SessionStore::serialize(const SessionRecord& record) {
    ordered_json doc;
    ordered_json s;
    s["id"] = record.info.id;
    s["created_at"] = record.info.created_at;
    s["updated_at"] = record.info.updated_at;
    doc["session"] = std::move(s);
    doc["map"] = detail::map_to_json(record.map);
    return doc.dump(2) + "\n";
}

SessionRecord SessionStore::deserialize(std::string_view text) {
    std::vector<ParseDiagnostic> diags;
    auto doc = detail::parse_json(text, diags);
    if (!doc) throw Error(diags.front().message);
    if (!doc->is_object() || !doc->contains("session") || !doc->contains("map")) {
        throw Error("session file needs 'session' and 'map'");
    }
    const json& s = (*doc)["session"];
    SessionRecord rec;
    try {
        rec.info.id = s.at("id").get<std::string>();
        rec.info.created_at = s.at("created_at").get<std::string>();
        rec.info.updated_at = s.at("updated_at").get<std::string>();
    } catch (const json::exception& e) {
        throw Error(std::string("bad session metadata: ") + e.what());
    }
    ParseResult parsed = detail::map_from_json((*doc)["map"]);
    if (!parsed.ok()) {
        for (const auto& d : parsed.diagnostics) {
            if (d.is_error()) throw Error("bad map at " + d.path + ": " + d.message);
        }
    }
    rec.map = std::move(*parsed.map);
    return rec;
}

std::shared_ptr<SessionStore::Entry> SessionStore::find(const std::string& id) const {
    std::shared_lock lock(index_mutex_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

void SessionStore::persist(const SessionRecord& record) const {
    write_file_atomically(path_for(record.info.id), serialize(record));
}

SessionRecord SessionStore::create(std::string map_name) {
    auto entry = std::make_shared<Entry>();
    entry->record.map = new_map(std::move(map_name));
    entry->record.info.created_at = entry->record.info.updated_at = now_utc();

    std::unique_lock lock(index_mutex_);
    std::string id;
    do {
        id = random_hex(kIdLength);
    } while (sessions_.count(id) != 0);
    entry->record.info.id = id;
    persist(entry->record);
    sessions_.emplace(id, entry);
    return entry->record;
}

std::optional<SessionRecord> SessionStore::get(const std::string& id) const {
    auto e = find(id);
    if (!e) return std::nullopt;
    std::lock_guard lock(e->mutex);
    return e->record;
}

std::vector<SessionInfo> SessionStore::list() const {
    std::vector<std::shared_ptr<Entry>> entries;
    {
        std::shared_lock lock(index_mutex_);
        for (const auto& [_, e] : sessions_) entries.push_back(e);
    }
    std::vector<SessionInfo> out;
    for (const auto& e : entries) {
        std::lock_guard lock(e->mutex);
        out.push_back(e->record.info);
    }
    std::sort(out.begin(), out.end(), [](const SessionInfo& a, const SessionInfo& b) {
        return std::tie(a.created_at, a.id) < std::tie(b.created_at, b.id);
    });
    return out;
}

std::optional<SessionRecord> SessionStore::update(const std::string& id, const Mutation& mutate) {
    auto e = find(id);
    if (!e) return std::nullopt;
    std::lock_guard lock(e->mutex);
    SessionRecord next = e->record;
    next.map = mutate(e->record.map);
    require_valid(next.map);
    next.info.updated_at = now_utc();
    persist(next);
    e->record = next;
    return next;
}

// -- Service -------------------------------------------------------------------

Service::Service(SessionStore& store, RuleConfig policy) : store_(store), policy_(std::move(policy)) {
    validate_config(policy_);
}

HttpResponse Service::health() const { return {200, "text/plain; charset=utf-8", "ok"}; }

HttpResponse Service::create_session(std::string_view body) {
    std::string name = "Untitled map";
    if (body.find_first_not_of(" \t\r\n") != std::string_view::npos) {
        std::vector<ParseDiagnostic> diags;
        auto doc = detail::parse_json(body, diags);
        if (!doc) return error_response(400, "invalid_document", "request body is not valid JSON", diags);
        detail::JsonReader r(diags);
        if (r.expect_type(*doc, "$", json::value_t::object, "a JSON object")) {
            r.reject_unknown_keys(*doc, "$", {"name"});
            if (doc->contains("name") &&
                r.expect_type((*doc)["name"], "$.name", json::value_t::string, "string")) {
                name = (*doc)["name"].get<std::string>();
                if (name.empty()) r.error("$.name", "empty_name", "map name must not be empty");
            }
        }
        if (r.failed()) return error_response(400, "invalid_request", "invalid session request", diags);
    }
    SessionRecord rec;
    try {
        rec = store_.create(std::move(name));
    } catch (const ValidationError& e) {
        return error_response(400, "invalid_request", e.what());
    }
    ordered_json doc;
    doc["id"] = rec.info.id;
    return json_response(201, doc);
}

HttpResponse Service::list_sessions() const {
    ordered_json arr = ordered_json::array();
    for (const auto& info : store_.list()) {
        arr.push_back({{"id", info.id}, {"created_at", info.created_at}, {"updated_at", info.updated_at}});
    }
    ordered_json doc;
    doc["sessions"] = std::move(arr);
    return json_response(200, doc);
}

HttpResponse Service::get_session(const std::string& id) const {
    auto rec = store_.get(id);
    if (!rec) return not_found(id);
    return json_response(200, session_to_json(*rec));
}

HttpResponse Service::submit_block(const std::string& id, std::string_view block, std::string_view body) {
    if (block.size() != 1 || block[0] < '1' || block[0] > '5') {
        return error_response(400, "unknown_block", "block must be one of 1, 2, 3, 4, 5");
    }
    const std::string key(kBlockKeys[static_cast<std::size_t>(block[0] - '1')]);
    if (!store_.get(id)) return not_found(id);

    std::vector<ParseDiagnostic> diags;
    auto payload = detail::parse_json(body, diags);
    if (!payload) return error_response(400, "invalid_document", "request body is not valid JSON", diags);
    {
        detail::JsonReader r(diags);
        if (r.expect_type(*payload, "$", json::value_t::object, "a JSON object")) {
            r.reject_unknown_keys(*payload, "$", {key});
            if (!payload->contains(key)) r.error("$." + key, "missing_field", "missing required field '" + key + "'");
        }
        if (r.failed()) return error_response(400, "invalid_block", "block " + std::string(block) + " rejected", diags);
    }

    try {
        auto rec = store_.update(id, [&](const ResponsibilityMap& current) {
            json doc = as_json(detail::map_to_json(current));
            doc[key] = (*payload)[key];
            ParseResult parsed = detail::map_from_json(doc);
            if (!parsed.ok()) throw Rejected{parsed.diagnostics};
            return std::move(*parsed.map);
        });
        if (!rec) return not_found(id);
        return json_response(200, session_to_json(*rec));
    } catch (const InvalidMapError& e) {
        return error_response(400, "invalid_block", e.what());
    } catch (const Rejected& r) {
        bool in_payload = false;
        for (const auto& d : r.diagnostics) in_payload = in_payload || (d.is_error() && path_within(d.path, key));
        if (in_payload) {
            return error_response(400, "invalid_block", "block " + std::string(block) + " rejected", r.diagnostics);
        }
        return error_response(409, "referenced_actor",
                              "the block would leave references to undeclared actors elsewhere in the map",
                              r.diagnostics);
    }
}

HttpResponse Service::analysis(const std::string& id, std::string_view locale) const {
    auto l = locale_or_default(locale);
    if (!l) return bad_locale(locale);
    auto rec = store_.get(id);
    if (!rec) return not_found(id);
    return {200, "application/json", render_structured(analyze(rec->map, policy_), *l)};
}

HttpResponse Service::whatif(const std::string& id, std::string_view body, std::string_view locale) const {
    auto l = locale_or_default(locale);
    if (!l) return bad_locale(locale);
    auto rec = store_.get(id);
    if (!rec) return not_found(id);

    std::vector<ParseDiagnostic> diags;
    json overrides = json::object();
    if (body.find_first_not_of(" \t\r\n") != std::string_view::npos) {
        auto parsed = detail::parse_json(body, diags);
        if (!parsed) return error_response(400, "invalid_document", "request body is not valid JSON", diags);
        overrides = std::move(*parsed);
    }
    detail::JsonReader r(diags);
    if (r.expect_type(overrides, "$", json::value_t::object, "a JSON object")) {
        r.reject_unknown_keys(overrides, "$", {"actors", "tasks", "responsibilities", "authorities", "channels"});
        for (const char* family : {"tasks", "responsibilities", "authorities"}) {
            if (overrides.contains(family)) {
                r.expect_type(overrides[family], std::string("$.") + family, json::value_t::object, "object");
            }
        }
    }
    if (r.failed()) return error_response(400, "invalid_overrides", "what-if overrides rejected", diags);

    json doc = as_json(detail::map_to_json(rec->map));
    for (const char* block : {"actors", "channels"}) {
        if (overrides.contains(block)) doc[block] = overrides[block];
    }
    for (const char* family : {"tasks", "responsibilities", "authorities"}) {
        if (!overrides.contains(family)) continue;
        for (const auto& [slot, value] : overrides[family].items()) doc[family][slot] = value;
    }
    ParseResult overlay = detail::map_from_json(doc);
    if (!overlay.ok()) {
        return error_response(400, "invalid_overrides", "what-if overrides rejected", overlay.diagnostics);
    }

    const Report before = analyze(rec->map, policy_);
    const Report after = analyze(*overlay.map, policy_);
    ordered_json out;
    out["analysis"] = as_ordered(render_structured(after, *l));
    out["diff"] = as_ordered(render_diff_structured(diff(before, after)));
    return json_response(200, out);
}

HttpResponse Service::export_session(const std::string& id, std::string_view format) const {
    auto rec = store_.get(id);
    if (!rec) return not_found(id);
    if (format == "rmap") return {200, "text/plain; charset=utf-8", emit_rmap(rec->map)};
    if (format == "interchange") return {200, "application/json", emit_interchange(rec->map)};
    if (format == "graph") return {200, "text/vnd.graphviz; charset=utf-8", export_graph(rec->map)};
    return error_response(400, "unknown_format",
                          "unknown export format '" + std::string(format) + "'; expected one of: rmap, interchange, graph");
}

HttpResponse Service::questions(std::string_view locale) const {
    auto l = locale_or_default(locale);
    if (!l) return bad_locale(locale);
    const auto all = questionnaire(*l);
    ordered_json blocks = ordered_json::array();
    for (int b = 1; b <= kBlockCount; ++b) {
        ordered_json block;
        block["block"] = b;
        block["title"] = std::string(block_title(b, *l));
        block["prompt"] = std::string(block_prompt(b, *l));
        block["questions"] = ordered_json::array();
        for (const auto& q : all) {
            if (q.block != b) continue;
            ordered_json item = ordered_json::object();
            if (q.slot) item["slot"] = std::string(slot_name(*q.slot));
            item["text"] = q.text;
            block["questions"].push_back(std::move(item));
        }
        blocks.push_back(std::move(block));
    }
    ordered_json doc;
    doc["locale"] = std::string(to_string(*l));
    doc["blocks"] = std::move(blocks);
    return json_response(200, doc);
}

HttpResponse Service::index_page() const {
    static constexpr std::string_view kPage = R"(<!doctype html>
<html lang="en">
<head><meta charset="utf-8"><title>respmap</title></head>
<body>
<h1>respmap</h1>
<p>The questionnaire front end is not installed. Start the server with
<code>--static-dir</code> pointing at a built front end, or use the API directly:</p>
<ul>
<li><code>POST /api/sessions</code></li>
<li><code>GET /api/sessions/{id}</code></li>
<li><code>PUT /api/sessions/{id}/blocks/{1-5}</code></li>
<li><code>GET /api/sessions/{id}/analysis?locale=en|de</code></li>
<li><code>POST /api/sessions/{id}/whatif</code></li>
<li><code>GET /api/sessions/{id}/export?format=rmap|interchange|graph</code></li>
<li><code>GET /api/questions?locale=en|de</code></li>
</ul>
</body>
</html>
)";
    return {200, "text/html; charset=utf-8", std::string(kPage)};
}

// -- HttpServer ----------------------------------------------------------------

struct HttpServer::Impl {
    Service& service;
    httplib::Server server;
    int port = -1;

    explicit Impl(Service& s) : service(s) {}
};

namespace {

void send(httplib::Response& res, const HttpResponse& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
}

std::string param(const httplib::Request& req, const char* key) {
    return req.has_param(key) ? req.get_param_value(key) : std::string();
}

}  // namespace

HttpServer::HttpServer(Service& service, std::optional<fs::path> static_dir)
    : impl_(std::make_unique<Impl>(service)) {
    auto& svr = impl_->server;
    Service& s = impl_->service;

    svr.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
            if (ep) std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        send(res, error_response(500, "internal_error", what));
    });

    if (static_dir) {
        svr.set_mount_point("/", static_dir->string());
    } else {
        svr.Get("/", [&s](const httplib::Request&, httplib::Response& res) { send(res, s.index_page()); });
    }
    svr.Get("/health", [&s](const httplib::Request&, httplib::Response& res) { send(res, s.health()); });
    svr.Post("/api/sessions", [&s](const httplib::Request& req, httplib::Response& res) {
        send(res, s.create_session(req.body));
    });
    svr.Get("/api/sessions", [&s](const httplib::Request&, httplib::Response& res) { send(res, s.list_sessions()); });
    svr.Get("/api/sessions/:id", [&s](const httplib::Request& req, httplib::Response& res) {
        send(res, s.get_session(req.path_params.at("id")));
    });
    svr.Put("/api/sessions/:id/blocks/:n", [&s](const httplib::Request& req, httplib::Response& res) {
        send(res, s.submit_block(req.path_params.at("id"), req.path_params.at("n"), req.body));
    });
    svr.Get("/api/sessions/:id/analysis", [&s](const httplib::Request& req, httplib::Response& res) {
        send(res, s.analysis(req.path_params.at("id"), param(req, "locale")));
    });
    svr.Post("/api/sessions/:id/whatif", [&s](const httplib::Request& req, httplib::Response& res) {
        send(res, s.whatif(req.path_params.at("id"), req.body, param(req, "locale")));
    });
    svr.Get("/api/sessions/:id/export", [&s](const httplib::Request& req, httplib::Response& res) {
        send(res, s.export_session(req.path_params.at("id"), param(req, "format")));
    });
    svr.Get("/api/questions", [&s](const httplib::Request& req, httplib::Response& res) {
        send(res, s.questions(param(req, "locale")));
    });
}

HttpServer::~HttpServer() = default;

bool HttpServer::bind(const std::string& host, int port) {
    if (port == 0) {
        const int p = impl_->server.bind_to_any_port(host);
        if (p <= 0) return false;
        impl_->port = p;
        return true;
    }
    if (!impl_->server.bind_to_port(host, port)) return false;
    impl_->port = port;
    return true;
}

int HttpServer::port() const noexcept { return impl_->port; }

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace respmap
