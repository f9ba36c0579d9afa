#include "respmap/rules.hpp"

#include <algorithm>
#include <iterator>
#include <map>

#include "respmap/catalog.hpp"

namespace respmap {

namespace {

constexpr std::array<std::string_view, 8> kCodeNames{
    "V1_TASK_GAP",
    "V2_EVAL_NOT_INDEPENDENT",
    "V3_RESPONSIBLE_NOT_TASKED",
    "V4_RESPONSIBILITY_GAP",
    "V4_RESPONSIBILITY_OVERLAP",
    "V5_RESPONSIBLE_NO_AUTHORITY",
    "V6_MISSING_CHANNEL",
    "INPUT_INCOMPLETE",
};

std::vector<ActorId> sorted(const ActorSet& s) { return {s.begin(), s.end()}; }

ActorSet intersect(const ActorSet& a, const ActorSet& b) {
    ActorSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

Finding make(FindingCode code, FindingSeverity severity, std::vector<Subject> subjects) {
    Finding f;
    f.code = code;
    f.section = section_of(code);
    f.severity = severity;
    f.subjects = std::move(subjects);
    return f;
}

Finding incomplete(const Slot& slot) {
    return make(FindingCode::INPUT_INCOMPLETE, FindingSeverity::info, {Subject{slot, {}}});
}

/// Collects INPUT_INCOMPLETE notes without repeating a slot.
class NoteSink {
public:
    explicit NoteSink(std::vector<Finding>& out) : out_(out) {}
    void add(const Slot& slot) {
        if (seen_.insert(slot_index(slot)).second) out_.push_back(incomplete(slot));
    }

private:
    std::vector<Finding>& out_;
    std::set<std::size_t> seen_;
};

/// Two actor groups can talk if they share a member or a direct channel of
/// any kind joins a member of each.
bool connected(const ResponsibilityMap& map, const ActorSet& x, const ActorSet& y) {
    if (!intersect(x, y).empty()) return true;
    return std::any_of(map.channels.begin(), map.channels.end(), [&](const Channel& ch) {
        const auto& p = ch.a().token();
        const auto& q = ch.b().token();
        return (x.count(p) && y.count(q)) || (x.count(q) && y.count(p));
    });
}

void fill_messages(std::vector<Finding>& findings, const ActorNames& names) {
    for (auto& f : findings) f.message = finding_message(f, names, Locale::en);
}

}  // namespace

std::string_view to_string(FindingCode c) { return kCodeNames[static_cast<std::size_t>(c)]; }

std::optional<FindingCode> parse_finding_code(std::string_view s) {
    for (std::size_t i = 0; i < kCodeNames.size(); ++i) {
        if (kCodeNames[i] == s) return static_cast<FindingCode>(i);
    }
    return std::nullopt;
}

std::optional<int> section_of(FindingCode c) {
    switch (c) {
        case FindingCode::V1_TASK_GAP: return 1;
        case FindingCode::V2_EVAL_NOT_INDEPENDENT: return 2;
        case FindingCode::V3_RESPONSIBLE_NOT_TASKED: return 3;
        case FindingCode::V4_RESPONSIBILITY_GAP:
        case FindingCode::V4_RESPONSIBILITY_OVERLAP: return 4;
        case FindingCode::V5_RESPONSIBLE_NO_AUTHORITY: return 5;
        case FindingCode::V6_MISSING_CHANNEL: return 6;
        case FindingCode::INPUT_INCOMPLETE: return std::nullopt;
    }
    return std::nullopt;
}

std::string_view to_string(FindingSeverity s) {
    switch (s) {
        case FindingSeverity::info: return "info";
        case FindingSeverity::warning: return "warning";
        case FindingSeverity::error: return "error";
    }
    return "info";
}

std::optional<FindingSeverity> parse_finding_severity(std::string_view s) {
    if (s == "info") return FindingSeverity::info;
    if (s == "warning") return FindingSeverity::warning;
    if (s == "error") return FindingSeverity::error;
    return std::nullopt;
}

FindingIdentity identity_of(const Finding& f) {
    FindingIdentity id{f.code, {}};
    for (const auto& s : f.subjects) {
        id.subjects.emplace_back(s.slot ? static_cast<int>(slot_index(*s.slot)) : -1, s.actors);
    }
    return id;
}

std::string describe_identity(const FindingIdentity& id) {
    std::string out(to_string(id.code));
    out += '(';
    bool first = true;
    for (const auto& [slot, actors] : id.subjects) {
        if (!first) out += "; ";
        first = false;
        out += slot < 0 ? "-" : std::string(slot_name(slot_at(static_cast<std::size_t>(slot))));
        if (!actors.empty()) {
            out += " {";
            for (std::size_t i = 0; i < actors.size(); ++i) {
                if (i) out += ',';
                out += actors[i];
            }
            out += '}';
        }
    }
    out += ')';
    return out;
}

RuleConfig RuleConfig::defaults() {
    using I = ResponsibilityIssue;
    using A = TaskArea;
    using K = AuthorityKind;
    RuleConfig c;
    auto idx = [](I i) { return static_cast<std::size_t>(i); };
    c.issue_area_map[idx(I::targets_not_met)] = {A::fundamental_decision, A::evaluation};
    c.issue_area_map[idx(I::improper_integration)] = {A::implementation};
    c.issue_area_map[idx(I::data_protection_complaints)] = {A::data_management};
    c.issue_area_map[idx(I::security_breach)] = {A::system_security};
    c.issue_area_map[idx(I::incorrect_use)] = {A::practical_use};

    c.issue_authority_map[idx(I::targets_not_met)] = {K::halt_system, K::change_implementation_use};
    c.issue_authority_map[idx(I::improper_integration)] = {K::change_implementation_use};
    c.issue_authority_map[idx(I::data_protection_complaints)] = {K::correct_database_entries};
    c.issue_authority_map[idx(I::security_breach)] = {K::institute_security_measures};
    c.issue_authority_map[idx(I::incorrect_use)] = {K::change_implementation_use};
    return c;
}

void validate_config(const RuleConfig& config) {
    for (auto issue : kAllIssues) {
        if (config.areas_for(issue).empty()) {
            throw ValidationError("issue_area_map[" + std::string(to_string(issue)) + "] is empty");
        }
        if (config.authorities_for(issue).empty()) {
            throw ValidationError("issue_authority_map[" + std::string(to_string(issue)) + "] is empty");
        }
    }
}

// -- section 1 ---------------------------------------------------------------

static std::vector<Finding> raw_task_gaps(const ResponsibilityMap& map) {
    std::vector<Finding> out;
    for (auto area : kAllTaskAreas) {
        const auto& asg = map.at(area);
        if (asg.is_nobody()) {
            out.push_back(make(FindingCode::V1_TASK_GAP, FindingSeverity::error, {Subject{area, {}}}));
        } else if (asg.is_unanswered()) {
            out.push_back(incomplete(area));
        }
    }
    return out;
}

// -- section 2 ---------------------------------------------------------------

static std::vector<Finding> raw_evaluation_independence(const ResponsibilityMap& map) {
    std::vector<Finding> out;
    const auto& eval = map.at(TaskArea::evaluation);
    if (eval.is_unanswered()) {
        out.push_back(incomplete(TaskArea::evaluation));
        return out;
    }
    if (!eval.is_assigned()) return out;
    for (auto area : kAllTaskAreas) {
        if (area == TaskArea::evaluation) continue;
        const auto& asg = map.at(area);
        if (!asg.is_assigned()) continue;
        const auto shared = intersect(eval.actors(), asg.actors());
        if (shared.empty()) continue;
        out.push_back(make(FindingCode::V2_EVAL_NOT_INDEPENDENT, FindingSeverity::warning,
                           {Subject{area, sorted(shared)}, Subject{TaskArea::evaluation, sorted(shared)}}));
    }
    return out;
}

// -- section 3 ---------------------------------------------------------------

static std::vector<Finding> raw_responsible_not_tasked(const ResponsibilityMap& map, const RuleConfig& config) {
    std::vector<Finding> out;
    NoteSink notes(out);
    for (auto issue : kAllIssues) {
        const auto& responsible = map.at(issue);
        if (!responsible.is_assigned()) continue;
        const auto& areas = config.areas_for(issue);

        ActorSet tasked;
        std::vector<TaskArea> unanswered;
        for (auto area : areas) {
            const auto& asg = map.at(area);
            if (asg.is_unanswered()) unanswered.push_back(area);
            tasked.insert(asg.actors().begin(), asg.actors().end());
        }
        for (const auto& actor : responsible.actors()) {
            if (tasked.count(actor)) continue;
            if (!unanswered.empty()) {
                for (auto area : unanswered) notes.add(area);
                continue;
            }
            std::vector<Subject> subjects{Subject{issue, {actor}}};
            for (auto area : areas) subjects.push_back(Subject{area, {}});
            out.push_back(make(FindingCode::V3_RESPONSIBLE_NOT_TASKED, FindingSeverity::warning,
                               std::move(subjects)));
        }
    }
    return out;
}

// -- section 4 ---------------------------------------------------------------

static std::vector<Finding> raw_responsibility_gaps_overlaps(const ResponsibilityMap& map, const RuleConfig& config) {
    std::vector<Finding> gaps;
    std::vector<Finding> overlaps;
    std::vector<Finding> notes;
    for (auto issue : kAllIssues) {
        const auto& asg = map.at(issue);
        if (asg.is_nobody()) {
            gaps.push_back(make(FindingCode::V4_RESPONSIBILITY_GAP, FindingSeverity::error, {Subject{issue, {}}}));
        } else if (asg.is_unanswered()) {
            notes.push_back(incomplete(issue));
        } else if (asg.actors().size() >= 2) {
            overlaps.push_back(make(FindingCode::V4_RESPONSIBILITY_OVERLAP,
                                    config.overlap_is_warning ? FindingSeverity::warning : FindingSeverity::error,
                                    {Subject{issue, sorted(asg.actors())}}));
        }
    }
    gaps.insert(gaps.end(), overlaps.begin(), overlaps.end());
    gaps.insert(gaps.end(), notes.begin(), notes.end());
    return gaps;
}

// -- section 5 ---------------------------------------------------------------

static std::vector<Finding> raw_authority_mismatch(const ResponsibilityMap& map, const RuleConfig& config) {
    std::vector<Finding> out;
    NoteSink notes(out);
    for (auto issue : kAllIssues) {
        const auto& responsible = map.at(issue);
        if (!responsible.is_assigned()) continue;
        const auto& options = config.authorities_for(issue);

        ActorSet authorised;
        std::vector<AuthorityKind> unanswered;
        for (auto kind : options) {
            const auto& asg = map.at(kind);
            if (asg.is_unanswered()) unanswered.push_back(kind);
            authorised.insert(asg.actors().begin(), asg.actors().end());
        }
        for (const auto& actor : responsible.actors()) {
            if (authorised.count(actor)) continue;
            if (!unanswered.empty()) {
                for (auto kind : unanswered) notes.add(kind);
                continue;
            }
            std::vector<Subject> subjects{Subject{issue, {actor}}};
            for (auto kind : options) subjects.push_back(Subject{kind, {}});
            out.push_back(make(FindingCode::V5_RESPONSIBLE_NO_AUTHORITY, FindingSeverity::error,
                               std::move(subjects)));
        }
    }
    return out;
}

// -- section 6 ---------------------------------------------------------------

static std::vector<Finding> raw_channels(const ResponsibilityMap& map, const RuleConfig& config) {
    std::vector<Finding> out;
    std::vector<Finding> note_list;
    NoteSink notes(note_list);
    const auto& policy = config.required_channels;

    auto area_pair_rule = [&](TaskArea x, TaskArea y) {
        const auto& ax = map.at(x);
        const auto& ay = map.at(y);
        if (ax.is_unanswered() || ay.is_unanswered()) {
            if (ax.is_unanswered()) notes.add(x);
            if (ay.is_unanswered()) notes.add(y);
            return;
        }
        if (!ax.is_assigned() || !ay.is_assigned()) return;  // explicit nobody: reported in section 1
        if (connected(map, ax.actors(), ay.actors())) return;
        out.push_back(make(FindingCode::V6_MISSING_CHANNEL, FindingSeverity::warning,
                           {Subject{x, sorted(ax.actors())}, Subject{y, sorted(ay.actors())}}));
    };

    if (policy.practical_use_development) area_pair_rule(TaskArea::practical_use, TaskArea::development);
    if (policy.practical_use_implementation) area_pair_rule(TaskArea::practical_use, TaskArea::implementation);
    if (policy.evaluation_fundamental_decision) {
        area_pair_rule(TaskArea::evaluation, TaskArea::fundamental_decision);
    }

    if (policy.responsible_tasked) {
        for (auto issue : kAllIssues) {
            const auto& responsible = map.at(issue);
            if (!responsible.is_assigned()) continue;
            const auto& areas = config.areas_for(issue);
            bool any_unanswered = false;
            for (auto area : areas) {
                if (map.at(area).is_unanswered()) {
                    notes.add(area);
                    any_unanswered = true;
                }
            }
            if (any_unanswered) continue;
            ActorSet tasked;
            std::vector<Subject> subjects{Subject{issue, sorted(responsible.actors())}};
            for (auto area : areas) {
                const auto& asg = map.at(area);
                if (!asg.is_assigned()) continue;
                tasked.insert(asg.actors().begin(), asg.actors().end());
                subjects.push_back(Subject{area, sorted(asg.actors())});
            }
            if (tasked.empty()) continue;
            if (connected(map, responsible.actors(), tasked)) continue;
            out.push_back(make(FindingCode::V6_MISSING_CHANNEL, FindingSeverity::warning, std::move(subjects)));
        }
    }

    if (policy.affected_persons_complaint && !map.actors.empty()) {
        const bool has_complaint_channel =
            std::any_of(map.channels.begin(), map.channels.end(), [](const Channel& ch) {
                return ch.kind() == ChannelKind::complaint &&
                       (ch.a().is_affected_persons() || ch.b().is_affected_persons());
            });
        if (!has_complaint_channel) {
            out.push_back(make(FindingCode::V6_MISSING_CHANNEL, FindingSeverity::warning, {}));
        }
    }

    out.insert(out.end(), note_list.begin(), note_list.end());
    return out;
}

static std::vector<Finding> with_messages(std::vector<Finding> findings, const ResponsibilityMap& map) {
    fill_messages(findings, actor_names_of(map));
    return findings;
}

std::vector<Finding> check_task_gaps(const ResponsibilityMap& map) {
    return with_messages(raw_task_gaps(map), map);
}
std::vector<Finding> check_evaluation_independence(const ResponsibilityMap& map) {
    return with_messages(raw_evaluation_independence(map), map);
}
std::vector<Finding> check_responsible_not_tasked(const ResponsibilityMap& map, const RuleConfig& config) {
    return with_messages(raw_responsible_not_tasked(map, config), map);
}
std::vector<Finding> check_responsibility_gaps_overlaps(const ResponsibilityMap& map, const RuleConfig& config) {
    return with_messages(raw_responsibility_gaps_overlaps(map, config), map);
}
std::vector<Finding> check_authority_mismatch(const ResponsibilityMap& map, const RuleConfig& config) {
    return with_messages(raw_authority_mismatch(map, config), map);
}
std::vector<Finding> check_channels(const ResponsibilityMap& map, const RuleConfig& config) {
    return with_messages(raw_channels(map, config), map);
}

// -- analysis ------------------------------------------------------------------

std::size_t Report::finding_count() const {
    std::size_t n = 0;
    for (const auto& s : sections) n += s.size();
    return n;
}

std::vector<Finding> Report::findings() const {
    std::vector<Finding> all;
    for (const auto& s : sections) all.insert(all.end(), s.begin(), s.end());
    return all;
}

Report analyze(const ResponsibilityMap& map, const RuleConfig& config) {
    require_valid(map);
    validate_config(config);

    Report report;
    report.map_name = map.name;
    report.config_fingerprint = config_fingerprint(config);
    report.actor_names = actor_names_of(map);

    std::map<std::size_t, Finding> notes;
    auto route = [&](std::vector<Finding> findings) {
        for (auto& f : findings) {
            if (f.code == FindingCode::INPUT_INCOMPLETE) {
                notes.emplace(slot_index(*f.subjects.front().slot), std::move(f));
            } else {
                report.sections[static_cast<std::size_t>(*f.section - 1)].push_back(std::move(f));
            }
        }
    };
    route(raw_task_gaps(map));
    route(raw_evaluation_independence(map));
    route(raw_responsible_not_tasked(map, config));
    route(raw_responsibility_gaps_overlaps(map, config));
    route(raw_authority_mismatch(map, config));
    route(raw_channels(map, config));

    for (std::size_t i = 0; i < kSlotCount; ++i) {
        const Slot slot = slot_at(i);
        if (map.at(slot).is_unanswered()) notes.emplace(i, incomplete(slot));
    }
    for (auto& [_, f] : notes) report.notes.push_back(std::move(f));

    for (auto& section : report.sections) fill_messages(section, report.actor_names);
    fill_messages(report.notes, report.actor_names);
    return report;
}

}  // namespace respmap
