#include <algorithm>
#include <unordered_set>

#include "interchange_detail.hpp"
#include "text.hpp"

namespace respmap {

namespace detail {

namespace {

std::string type_name(json::value_t t) {
    switch (t) {
        case json::value_t::object: return "object";
        case json::value_t::array: return "array";
        case json::value_t::string: return "string";
        case json::value_t::boolean: return "boolean";
        case json::value_t::null: return "null";
        default: return "number";
    }
}

template <typename Enum>
std::optional<Enum> parse_enum(std::string_view s);
template <>
std::optional<TaskArea> parse_enum<TaskArea>(std::string_view s) { return parse_task_area(s); }
template <>
std::optional<ResponsibilityIssue> parse_enum<ResponsibilityIssue>(std::string_view s) { return parse_issue(s); }
template <>
std::optional<AuthorityKind> parse_enum<AuthorityKind>(std::string_view s) { return parse_authority(s); }

template <typename Enum>
constexpr std::string_view family_noun() {
    if constexpr (std::is_same_v<Enum, TaskArea>) return "task area";
    else if constexpr (std::is_same_v<Enum, ResponsibilityIssue>) return "responsibility issue";
    else return "authority kind";
}

template <typename Enum>
constexpr auto& all_values() {
    if constexpr (std::is_same_v<Enum, TaskArea>) return kAllTaskAreas;
    else if constexpr (std::is_same_v<Enum, ResponsibilityIssue>) return kAllIssues;
    else return kAllAuthorities;
}

// Accept only exact canonical (lower-case) tokens in JSON documents.
template <typename Enum>
std::optional<Enum> parse_exact(std::string_view s) {
    auto v = parse_enum<Enum>(s);
    if (v && to_string(*v) != s) return std::nullopt;
    return v;
}

}  // namespace

void JsonReader::error(const std::string& path, std::string code, std::string message) {
    diags_.push_back({SourceSpan{}, std::move(code), std::move(message), Severity::error, path});
}

void JsonReader::warning(const std::string& path, std::string code, std::string message) {
    diags_.push_back({SourceSpan{}, std::move(code), std::move(message), Severity::warning, path});
}

bool JsonReader::failed() const {
    return std::any_of(diags_.begin(), diags_.end(), [](const auto& d) { return d.is_error(); });
}

void JsonReader::reject_unknown_keys(const json& obj, const std::string& path,
                                     std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            std::string legal;
            for (auto a : allowed) {
                if (!legal.empty()) legal += ", ";
                legal += a;
            }
            error(path + "." + key, "unknown_field",
                  "unknown field '" + key + "'; expected one of: " + legal);
        }
    }
}

bool JsonReader::expect_type(const json& v, const std::string& path, json::value_t type,
                             std::string_view what) {
    const bool ok = v.type() == type ||
                    (type == json::value_t::number_integer && v.is_number_integer());
    if (!ok) {
        error(path, "wrong_type",
              "expected " + std::string(what) + ", found " + type_name(v.type()));
    }
    return ok;
}

std::optional<std::vector<Actor>> JsonReader::read_actors(const json& v, const std::string& path) {
    if (!expect_type(v, path, json::value_t::array, "array of actors")) return std::nullopt;
    std::vector<Actor> out;
    std::unordered_set<std::string> seen;
    bool ok = true;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        const json& e = v[i];
        if (!expect_type(e, p, json::value_t::object, "actor object")) {
            ok = false;
            continue;
        }
        reject_unknown_keys(e, p, {"id", "display_name", "kind", "notes"});
        Actor a;
        bool actor_ok = true;
        for (std::string_view key : {"id", "display_name", "kind"}) {
            if (!e.contains(key)) {
                error(p + "." + std::string(key), "missing_field", "missing required field '" + std::string(key) + "'");
                actor_ok = false;
            } else if (!expect_type(e[std::string(key)], p + "." + std::string(key), json::value_t::string, "string")) {
                actor_ok = false;
            }
        }
        if (e.contains("notes") && !expect_type(e["notes"], p + ".notes", json::value_t::string, "string")) {
            actor_ok = false;
        }
        if (!actor_ok) {
            ok = false;
            continue;
        }
        a.id = e["id"].get<std::string>();
        a.display_name = e["display_name"].get<std::string>();
        if (e.contains("notes")) a.notes = e["notes"].get<std::string>();
        const auto kind_text = e["kind"].get<std::string>();
        auto kind = parse_actor_kind(kind_text);
        if (!kind || to_string(*kind) != kind_text) {
            error(p + ".kind", "unknown_actor_kind",
                  "unknown actor kind '" + kind_text + "'; expected one of: " + legal_values<ActorKind>());
            ok = false;
            continue;
        }
        a.kind = *kind;
        if (!is_valid_actor_id(a.id)) {
            error(p + ".id", "invalid_actor_id",
                  is_reserved_word(a.id) ? "'" + a.id + "' is reserved and cannot name an actor"
                                         : "invalid actor id '" + a.id + "'");
            ok = false;
        }
        if (a.display_name.empty()) {
            error(p + ".display_name", "empty_display_name", "display name must not be empty");
            ok = false;
        } else if (text::has_control(a.display_name)) {
            error(p + ".display_name", "control_character", "display name contains control characters");
            ok = false;
        }
        if (a.notes && text::has_control(*a.notes, true)) {
            error(p + ".notes", "control_character", "notes contain control characters");
            ok = false;
        }
        if (!seen.insert(a.id).second) {
            error(p + ".id", "duplicate_actor", "actor '" + a.id + "' is declared more than once");
            ok = false;
        }
        out.push_back(std::move(a));
    }
    if (!ok) return std::nullopt;
    return out;
}

std::optional<Assignment> JsonReader::read_assignment(const json& v, const std::string& path) {
    if (!expect_type(v, path, json::value_t::object, "object {state, actors}")) return std::nullopt;
    reject_unknown_keys(v, path, {"state", "actors"});
    if (!v.contains("state")) {
        error(path + ".state", "missing_field", "missing required field 'state'");
        return std::nullopt;
    }
    if (!expect_type(v["state"], path + ".state", json::value_t::string, "string")) return std::nullopt;
    const auto state = v["state"].get<std::string>();

    ActorSet actors;
    if (v.contains("actors")) {
        const json& list = v["actors"];
        if (!expect_type(list, path + ".actors", json::value_t::array, "array of actor ids")) {
            return std::nullopt;
        }
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string p = path + ".actors[" + std::to_string(i) + "]";
            if (!expect_type(list[i], p, json::value_t::string, "actor id string")) return std::nullopt;
            auto id = list[i].get<std::string>();
            if (!actors.insert(id).second) {
                warning(p, "duplicate_list_entry", "actor '" + id + "' listed twice");
            }
        }
    }

    if (state == "unanswered" || state == "nobody") {
        if (!actors.empty()) {
            error(path + ".actors", "invalid_state", "state '" + state + "' must not list actors");
            return std::nullopt;
        }
        return state == "nobody" ? Assignment::nobody() : Assignment::unanswered();
    }
    if (state == "assigned") {
        if (actors.empty()) {
            error(path + ".actors", "invalid_state", "state 'assigned' needs at least one actor");
            return std::nullopt;
        }
        return Assignment::assigned(std::move(actors));
    }
    error(path + ".state", "invalid_state",
          "unknown state '" + state + "'; expected one of: unanswered, nobody, assigned");
    return std::nullopt;
}

template <typename Enum>
void JsonReader::read_slot_block(const json& v, const std::string& path, ResponsibilityMap& out,
                                 std::vector<Slot>* touched) {
    if (!expect_type(v, path, json::value_t::object, "object keyed by " + std::string(family_noun<Enum>()))) {
        return;
    }
    for (const auto& [key, value] : v.items()) {
        const std::string p = path + "." + key;
        auto slot = parse_exact<Enum>(key);
        if (!slot) {
            error(p, "unknown_" + std::string(std::is_same_v<Enum, TaskArea>              ? "task_area"
                                              : std::is_same_v<Enum, ResponsibilityIssue> ? "issue"
                                                                                          : "authority"),
                  "unknown " + std::string(family_noun<Enum>()) + " '" + key +
                      "'; expected one of: " + legal_values<Enum>());
            continue;
        }
        if (auto a = read_assignment(value, p)) {
            out.at(*slot) = std::move(*a);
            if (touched) touched->push_back(*slot);
        }
    }
}

template void JsonReader::read_slot_block<TaskArea>(const json&, const std::string&, ResponsibilityMap&, std::vector<Slot>*);
template void JsonReader::read_slot_block<ResponsibilityIssue>(const json&, const std::string&, ResponsibilityMap&, std::vector<Slot>*);
template void JsonReader::read_slot_block<AuthorityKind>(const json&, const std::string&, ResponsibilityMap&, std::vector<Slot>*);

std::optional<std::vector<std::pair<Channel, std::string>>> JsonReader::read_channels(
    const json& v, const std::string& path) {
    if (!expect_type(v, path, json::value_t::array, "array of channels")) return std::nullopt;
    std::vector<std::pair<Channel, std::string>> out;
    bool ok = true;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        const json& e = v[i];
        if (!expect_type(e, p, json::value_t::object, "channel object")) {
            ok = false;
            continue;
        }
        reject_unknown_keys(e, p, {"a", "b", "kind"});
        bool fields_ok = true;
        for (std::string_view key : {"a", "b", "kind"}) {
            if (!e.contains(key)) {
                error(p + "." + std::string(key), "missing_field", "missing required field '" + std::string(key) + "'");
                fields_ok = false;
            } else if (!expect_type(e[std::string(key)], p + "." + std::string(key), json::value_t::string, "string")) {
                fields_ok = false;
            }
        }
        if (!fields_ok) {
            ok = false;
            continue;
        }
        const auto kind_text = e["kind"].get<std::string>();
        auto kind = parse_channel_kind(kind_text);
        if (!kind || to_string(*kind) != kind_text) {
            error(p + ".kind", "unknown_channel_kind",
                  "unknown channel kind '" + kind_text + "'; expected one of: " + legal_values<ChannelKind>());
            ok = false;
            continue;
        }
        auto endpoint = [&](const std::string& key) -> std::optional<ChannelEndpoint> {
            const auto tok = e[key].get<std::string>();
            if (tok == kAffectedPersons) return ChannelEndpoint::affected_persons();
            if (!is_valid_actor_id(tok)) {
                error(p + "." + key, "invalid_actor_id", "invalid channel endpoint '" + tok + "'");
                return std::nullopt;
            }
            return ChannelEndpoint::actor(tok);
        };
        auto a = endpoint("a");
        auto b = endpoint("b");
        if (!a || !b) {
            ok = false;
            continue;
        }
        if (*a == *b) {
            error(p, "self_channel", "channel connects '" + a->token() + "' with itself");
            ok = false;
            continue;
        }
        out.emplace_back(Channel(std::move(*a), std::move(*b), *kind), p);
    }
    if (!ok) return std::nullopt;
    return out;
}

std::string slot_family_key(const Slot& slot) {
    switch (slot.index()) {
        case 0: return "tasks";
        case 1: return "responsibilities";
        default: return "authorities";
    }
}

ordered_json actors_to_json(const ResponsibilityMap& map) {
    ordered_json arr = ordered_json::array();
    for (const auto& a : map.actors) {
        ordered_json o;
        o["id"] = a.id;
        o["display_name"] = a.display_name;
        o["kind"] = std::string(to_string(a.kind));
        if (a.notes) o["notes"] = *a.notes;
        arr.push_back(std::move(o));
    }
    return arr;
}

template <typename Enum>
ordered_json slot_block_to_json(const ResponsibilityMap& map) {
    ordered_json obj = ordered_json::object();
    for (auto value : all_values<Enum>()) {
        const Assignment& asg = map.at(value);
        if (asg.is_unanswered()) continue;
        ordered_json o;
        o["state"] = std::string(to_string(asg.state()));
        o["actors"] = ordered_json::array();
        for (const auto& id : asg.actors()) o["actors"].push_back(id);
        obj[std::string(to_string(value))] = std::move(o);
    }
    return obj;
}

template ordered_json slot_block_to_json<TaskArea>(const ResponsibilityMap&);
template ordered_json slot_block_to_json<ResponsibilityIssue>(const ResponsibilityMap&);
template ordered_json slot_block_to_json<AuthorityKind>(const ResponsibilityMap&);

ordered_json channels_to_json(const ResponsibilityMap& map) {
    ordered_json arr = ordered_json::array();
    for (const auto& ch : map.channels) {
        ordered_json o;
        o["a"] = ch.a().token();
        o["b"] = ch.b().token();
        o["kind"] = std::string(to_string(ch.kind()));
        arr.push_back(std::move(o));
    }
    return arr;
}

ordered_json map_to_json(const ResponsibilityMap& map) {
    ordered_json doc;
    doc["format_version"] = std::string(kInterchangeFormatVersion);
    doc["name"] = map.name;
    doc["actors"] = actors_to_json(map);
    doc["tasks"] = slot_block_to_json<TaskArea>(map);
    doc["responsibilities"] = slot_block_to_json<ResponsibilityIssue>(map);
    doc["authorities"] = slot_block_to_json<AuthorityKind>(map);
    doc["channels"] = channels_to_json(map);
    return doc;
}

std::optional<json> parse_json(std::string_view text, std::vector<ParseDiagnostic>& diags) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // e.byte is 1-based and points just past the offending character.
        const std::size_t byte = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
        const std::string_view before = text.substr(0, byte);
        const std::size_t line = 1 + static_cast<std::size_t>(std::count(before.begin(), before.end(), '\n'));
        const auto nl = before.rfind('\n');
        const std::string_view line_prefix = nl == std::string_view::npos ? before : before.substr(nl + 1);
        const std::size_t col = 1 + text::codepoint_count(line_prefix);
        std::string msg = e.what();
        if (auto pos = msg.find("parse error"); pos != std::string::npos) msg = msg.substr(pos);
        diags.push_back({SourceSpan{line, col, 1}, "invalid_document", msg, Severity::error, "$"});
        return std::nullopt;
    }
}

ParseResult map_from_json(const json& doc) {
    ParseResult result;
    JsonReader r(result.diagnostics);
    ResponsibilityMap map;

    if (!r.expect_type(doc, "$", json::value_t::object, "a JSON object")) return result;
    r.reject_unknown_keys(doc, "$",
                          {"format_version", "name", "actors", "tasks", "responsibilities",
                           "authorities", "channels"});

    if (!doc.contains("format_version")) {
        r.error("$.format_version", "missing_field", "missing required field 'format_version'");
    } else if (r.expect_type(doc["format_version"], "$.format_version", json::value_t::string, "string") &&
               doc["format_version"].get<std::string>() != kInterchangeFormatVersion) {
        r.error("$.format_version", "unsupported_version",
                "unsupported format_version '" + doc["format_version"].get<std::string>() +
                    "'; expected \"" + std::string(kInterchangeFormatVersion) + "\"");
    }

    if (!doc.contains("name")) {
        r.error("$.name", "missing_field", "missing required field 'name'");
    } else if (r.expect_type(doc["name"], "$.name", json::value_t::string, "string")) {
        map.name = doc["name"].get<std::string>();
        if (map.name.empty()) r.error("$.name", "empty_name", "map name must not be empty");
        else if (text::has_control(map.name)) {
            r.error("$.name", "control_character", "map name contains control characters");
        }
    }

    if (doc.contains("actors")) {
        if (auto actors = r.read_actors(doc["actors"], "$.actors")) map.actors = std::move(*actors);
    }
    if (doc.contains("tasks")) r.read_slot_block<TaskArea>(doc["tasks"], "$.tasks", map);
    if (doc.contains("responsibilities")) {
        r.read_slot_block<ResponsibilityIssue>(doc["responsibilities"], "$.responsibilities", map);
    }
    if (doc.contains("authorities")) {
        r.read_slot_block<AuthorityKind>(doc["authorities"], "$.authorities", map);
    }
    if (doc.contains("channels")) {
        if (auto channels = r.read_channels(doc["channels"], "$.channels")) {
            for (auto& [ch, path] : *channels) {
                for (const auto* ep : {&ch.a(), &ch.b()}) {
                    if (ep->is_actor() && !map.has_actor(ep->token())) {
                        r.error(path, "undeclared_actor",
                                "undeclared channel endpoint '" + ep->token() + "'");
                    }
                }
                if (!map.channels.insert(ch).second) {
                    r.warning(path, "duplicate_channel",
                              "channel " + ch.a().token() + " <-> " + ch.b().token() +
                                  " kind=" + std::string(to_string(ch.kind())) + " is declared more than once");
                }
            }
        }
    }

    // Slot references; channel endpoints were checked above with element paths.
    for (std::size_t i = 0; i < kSlotCount; ++i) {
        const Slot slot = slot_at(i);
        for (const auto& id : map.at(slot).actors()) {
            if (!map.has_actor(id)) {
                r.error("$." + slot_family_key(slot) + "." + std::string(slot_name(slot)) + ".actors",
                        "undeclared_actor", "undeclared actor '" + id + "'");
            }
        }
    }

    if (!r.failed()) result.map = std::move(map);
    return result;
}

}  // namespace detail

ParseResult parse_interchange(std::string_view document) {
    std::vector<ParseDiagnostic> diags;
    auto doc = detail::parse_json(document, diags);
    if (!doc) {
        ParseResult r;
        r.diagnostics = std::move(diags);
        return r;
    }
    return detail::map_from_json(*doc);
}

std::string emit_interchange(const ResponsibilityMap& map) {
    return detail::map_to_json(map).dump(2) + "\n";
}

}  // namespace respmap
