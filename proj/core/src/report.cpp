#include "respmap/report.hpp"

#include <json.hpp>

#include <map>
#include <sstream>

namespace respmap {

namespace {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

constexpr std::string_view kStructuredFormat = "respmap-report/1";

Finding localized(const Finding& f, const ActorNames& names, Locale locale) {
    if (locale == Locale::en && !f.message.empty()) return f;
    Finding out = f;
    out.message = finding_message(f, names, locale);
    return out;
}

// -- text ------------------------------------------------------------------------

void write_finding(std::ostream& os, const Finding& f, const ActorNames& names, Locale locale) {
    os << "  - [" << to_string(f.severity) << "] " << to_string(f.code) << ": "
       << localized(f, names, locale).message << '\n';
}

// -- structured --------------------------------------------------------------------

ordered_json subject_to_json(const Subject& s) {
    ordered_json out = ordered_json::object();
    if (s.slot) out["slot"] = std::string(slot_name(*s.slot));
    out["actors"] = s.actors;
    return out;
}

ordered_json finding_to_json(const Finding& f) {
    ordered_json out;
    out["code"] = std::string(to_string(f.code));
    if (f.section) out["section"] = *f.section;
    else out["section"] = nullptr;
    out["severity"] = std::string(to_string(f.severity));
    out["subjects"] = ordered_json::array();
    for (const auto& s : f.subjects) out["subjects"].push_back(subject_to_json(s));
    out["message"] = f.message;
    return out;
}

const json& field(const json& obj, const char* key, json::value_t type, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) throw Error("structured report: missing " + path + "." + key);
    const json& v = obj.at(key);
    if (v.type() != type && !(type == json::value_t::number_integer && v.is_number_integer())) {
        throw Error("structured report: wrong type at " + path + "." + key);
    }
    return v;
}

Finding finding_from_json(const json& j, const std::string& path) {
    Finding f;
    auto code = parse_finding_code(field(j, "code", json::value_t::string, path).get<std::string>());
    if (!code) throw Error("structured report: unknown code at " + path);
    f.code = *code;
    const json& section = j.contains("section") ? j.at("section") : json();
    if (section.is_number_integer()) {
        const int n = section.get<int>();
        if (n < 1 || n > kSectionCount) throw Error("structured report: section out of range at " + path);
        f.section = n;
    } else if (!section.is_null()) {
        throw Error("structured report: wrong type at " + path + ".section");
    }
    if (f.section != section_of(f.code)) throw Error("structured report: section does not match code at " + path);
    auto sev = parse_finding_severity(field(j, "severity", json::value_t::string, path).get<std::string>());
    if (!sev) throw Error("structured report: unknown severity at " + path);
    f.severity = *sev;
    const json& subjects = field(j, "subjects", json::value_t::array, path);
    for (std::size_t i = 0; i < subjects.size(); ++i) {
        const std::string sp = path + ".subjects[" + std::to_string(i) + "]";
        const json& s = subjects[i];
        Subject subject;
        if (s.is_object() && s.contains("slot")) {
            auto slot = parse_slot(field(s, "slot", json::value_t::string, sp).get<std::string>());
            if (!slot) throw Error("structured report: unknown slot at " + sp);
            subject.slot = *slot;
        }
        for (const auto& a : field(s, "actors", json::value_t::array, sp)) {
            if (!a.is_string()) throw Error("structured report: wrong type at " + sp + ".actors");
            subject.actors.push_back(a.get<std::string>());
        }
        f.subjects.push_back(std::move(subject));
    }
    f.message = field(j, "message", json::value_t::string, path).get<std::string>();
    return f;
}

// -- graph -------------------------------------------------------------------------

std::string dot_quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': break;
            case '\t': out += ' '; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

std::string_view slot_family(const Slot& s) {
    if (std::holds_alternative<TaskArea>(s)) return "task";
    if (std::holds_alternative<ResponsibilityIssue>(s)) return "responsible";
    return "authority";
}

std::string slot_node(const Slot& s) { return std::string(slot_family(s)) + ":" + std::string(slot_name(s)); }

std::string endpoint_node(const ChannelEndpoint& e) {
    return e.is_affected_persons() ? std::string(kAffectedPersons) : "actor:" + e.token();
}

std::string_view edge_label(const Slot& s) {
    if (std::holds_alternative<TaskArea>(s)) return "tasked";
    if (std::holds_alternative<ResponsibilityIssue>(s)) return "responsible";
    return "authorized";
}

// -- diff --------------------------------------------------------------------------

using IdentityCount = std::map<FindingIdentity, std::size_t>;

IdentityCount count_identities(const std::vector<Finding>& findings) {
    IdentityCount counts;
    for (const auto& f : findings) ++counts[identity_of(f)];
    return counts;
}

// Findings of `from` whose identity occurs more often in `from` than in
// `other`; the surplus occurrences are taken from the end.
std::vector<Finding> surplus(const std::vector<Finding>& from, const IdentityCount& other) {
    IdentityCount remaining = other;
    std::vector<Finding> out;
    for (const auto& f : from) {
        auto it = remaining.find(identity_of(f));
        if (it != remaining.end() && it->second > 0) {
            --it->second;
            continue;
        }
        out.push_back(f);
    }
    return out;
}

}  // namespace

std::string render_text(const Report& report, Locale locale) {
    const ActorNames& names = report.actor_names;
    std::ostringstream os;
    os << report_heading(locale) << ": " << report.map_name << "\n\n";
    os << disclaimer(locale) << '\n';
    for (int n = 1; n <= kSectionCount; ++n) {
        os << '\n' << section_label(locale) << ' ' << n << ": " << section_title(n, locale) << '\n';
        const auto& findings = report.section(n);
        if (findings.empty()) {
            os << "  " << no_findings_sentence(locale) << '\n';
            continue;
        }
        for (const auto& f : findings) write_finding(os, f, names, locale);
    }
    if (!report.notes.empty()) {
        os << '\n' << notes_heading(locale) << '\n';
        for (const auto& f : report.notes) write_finding(os, f, names, locale);
    }
    return os.str();
}

std::string render_text(const Report& report, std::string_view locale) {
    auto l = parse_locale(locale);
    if (!l) {
        throw ValidationError("unknown locale '" + std::string(locale) + "'; supported locales: " +
                              supported_locales());
    }
    return render_text(report, *l);
}

std::string render_structured(const Report& report, Locale locale) {
    ordered_json doc;
    doc["format"] = std::string(kStructuredFormat);
    doc["map_name"] = report.map_name;
    doc["config_fingerprint"] = report.config_fingerprint;
    doc["locale"] = std::string(to_string(locale));
    doc["actors"] = ordered_json::array();
    for (const auto& [id, name] : report.actor_names) doc["actors"].push_back({{"id", id}, {"name", name}});
    doc["findings"] = ordered_json::array();
    for (const auto& f : report.findings()) {
        doc["findings"].push_back(finding_to_json(localized(f, report.actor_names, locale)));
    }
    doc["notes"] = ordered_json::array();
    for (const auto& f : report.notes) {
        doc["notes"].push_back(finding_to_json(localized(f, report.actor_names, locale)));
    }
    return doc.dump(2) + "\n";
}

Report parse_structured_report(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        throw Error(std::string("structured report: ") + e.what());
    }
    if (!doc.is_object()) throw Error("structured report: top level must be an object");
    if (field(doc, "format", json::value_t::string, "$").get<std::string>() != kStructuredFormat) {
        throw Error("structured report: unsupported format");
    }
    Report report;
    report.map_name = field(doc, "map_name", json::value_t::string, "$").get<std::string>();
    report.config_fingerprint = field(doc, "config_fingerprint", json::value_t::string, "$").get<std::string>();
    const json& actors = field(doc, "actors", json::value_t::array, "$");
    for (std::size_t i = 0; i < actors.size(); ++i) {
        const std::string p = "$.actors[" + std::to_string(i) + "]";
        report.actor_names.emplace_back(field(actors[i], "id", json::value_t::string, p).get<std::string>(),
                                        field(actors[i], "name", json::value_t::string, p).get<std::string>());
    }
    const json& findings = field(doc, "findings", json::value_t::array, "$");
    for (std::size_t i = 0; i < findings.size(); ++i) {
        Finding f = finding_from_json(findings[i], "$.findings[" + std::to_string(i) + "]");
        if (!f.section) throw Error("structured report: note in findings array");
        report.sections[static_cast<std::size_t>(*f.section - 1)].push_back(std::move(f));
    }
    const json& notes = field(doc, "notes", json::value_t::array, "$");
    for (std::size_t i = 0; i < notes.size(); ++i) {
        Finding f = finding_from_json(notes[i], "$.notes[" + std::to_string(i) + "]");
        if (f.section) throw Error("structured report: section finding in notes array");
        report.notes.push_back(std::move(f));
    }
    return report;
}

std::string export_graph(const ResponsibilityMap& map) {
    std::ostringstream os;
    os << "digraph respmap {\n";
    os << "  graph [label=" << dot_quote(map.name) << ", rankdir=LR];\n";
    os << "  node [fontname=\"Helvetica\"];\n";
    for (const auto& a : map.actors) {
        os << "  " << dot_quote("actor:" + a.id) << " [label=" << dot_quote(a.display_name)
           << ", shape=box, kind=" << dot_quote(to_string(a.kind)) << "];\n";
    }
    bool affected = false;
    for (const auto& c : map.channels) affected = affected || c.a().is_affected_persons() || c.b().is_affected_persons();
    if (affected) {
        os << "  " << dot_quote(kAffectedPersons) << " [label=\"affected persons\", shape=box, style=dashed];\n";
    }
    for (std::size_t i = 0; i < kSlotCount; ++i) {
        const Slot s = slot_at(i);
        os << "  " << dot_quote(slot_node(s)) << " [label=" << dot_quote(slot_name(s)) << ", shape=ellipse";
        const Assignment& as = map.at(s);
        if (as.is_nobody()) os << ", style=filled, fillcolor=\"#f4cccc\"";
        else if (as.is_unanswered()) os << ", style=dotted";
        os << "];\n";
    }
    for (std::size_t i = 0; i < kSlotCount; ++i) {
        const Slot s = slot_at(i);
        for (const auto& id : map.at(s).actors()) {
            os << "  " << dot_quote("actor:" + id) << " -> " << dot_quote(slot_node(s))
               << " [label=" << dot_quote(edge_label(s)) << "];\n";
        }
    }
    for (const auto& c : map.channels) {
        os << "  " << dot_quote(endpoint_node(c.a())) << " -> " << dot_quote(endpoint_node(c.b()))
           << " [label=" << dot_quote(to_string(c.kind())) << ", dir=none, style=dashed];\n";
    }
    os << "}\n";
    return os.str();
}

DiffReport diff(const Report& before, const Report& after) {
    if (before.config_fingerprint != after.config_fingerprint) {
        throw ConflictError("reports were produced with different rule configurations (" +
                            before.config_fingerprint + " vs " + after.config_fingerprint + ")");
    }
    const auto b = before.findings();
    const auto a = after.findings();
    DiffReport d;
    d.resolved = surplus(b, count_identities(a));
    d.introduced = surplus(a, count_identities(b));
    d.unchanged_count = b.size() - d.resolved.size();
    return d;
}

std::string render_diff_text(const DiffReport& d) {
    std::ostringstream os;
    os << "resolved: " << d.resolved.size() << ", introduced: " << d.introduced.size()
       << ", unchanged: " << d.unchanged_count << '\n';
    for (const auto& f : d.resolved) {
        os << "  - resolved " << describe_identity(identity_of(f)) << ": " << f.message << '\n';
    }
    for (const auto& f : d.introduced) {
        os << "  + introduced " << describe_identity(identity_of(f)) << ": " << f.message << '\n';
    }
    return os.str();
}

std::string render_diff_structured(const DiffReport& d) {
    ordered_json doc;
    doc["resolved"] = ordered_json::array();
    for (const auto& f : d.resolved) doc["resolved"].push_back(finding_to_json(f));
    doc["introduced"] = ordered_json::array();
    for (const auto& f : d.introduced) doc["introduced"].push_back(finding_to_json(f));
    doc["unchanged_count"] = d.unchanged_count;
    return doc.dump(2) + "\n";
}

}  // namespace respmap
