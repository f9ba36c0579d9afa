#include "respmap/model.hpp"

#include "text.hpp"

#include <algorithm>
#include <cctype>
#include <tuple>
#include <unordered_set>

namespace respmap {

namespace {

constexpr std::array<std::string_view, 4> kActorKindNames{"individual", "group", "internal_unit",
                                                          "external_org"};
constexpr std::array<std::string_view, kTaskAreaCount> kTaskAreaNames{
    "fundamental_decision", "implementation",  "development", "practical_use",
    "system_security",      "data_management", "evaluation"};
constexpr std::array<std::string_view, kIssueCount> kIssueNames{
    "targets_not_met", "improper_integration", "data_protection_complaints", "security_breach",
    "incorrect_use"};
constexpr std::array<std::string_view, kAuthorityCount> kAuthorityNames{
    "halt_system", "change_implementation_use", "correct_database_entries",
    "institute_security_measures"};
constexpr std::array<std::string_view, 3> kChannelKindNames{"feedback", "complaint", "escalation"};

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
    for (std::size_t i = 0; i < N; ++i) {
        if (iequals(names[i], s)) return static_cast<Enum>(i);
    }
    return std::nullopt;
}

template <std::size_t N>
std::string join_names(const std::array<std::string_view, N>& names) {
    std::string out;
    for (std::size_t i = 0; i < N; ++i) {
        if (i) out += ", ";
        out += names[i];
    }
    return out;
}

void check_assignment_refs(const ResponsibilityMap& map, const Assignment& a) {
    for (const auto& id : a.actors()) {
        if (!map.has_actor(id)) {
            throw ReferenceError(id, "undeclared actor '" + id + "'");
        }
    }
}

}  // namespace

std::string_view to_string(ActorKind k) { return kActorKindNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(TaskArea a) { return kTaskAreaNames[static_cast<std::size_t>(a)]; }
std::string_view to_string(ResponsibilityIssue i) { return kIssueNames[static_cast<std::size_t>(i)]; }
std::string_view to_string(AuthorityKind k) { return kAuthorityNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(ChannelKind k) { return kChannelKindNames[static_cast<std::size_t>(k)]; }

std::string_view to_string(AssignmentState s) {
    switch (s) {
        case AssignmentState::unanswered: return "unanswered";
        case AssignmentState::nobody: return "nobody";
        case AssignmentState::assigned: return "assigned";
    }
    return "unanswered";
}

std::optional<ActorKind> parse_actor_kind(std::string_view s) {
    return lookup<ActorKind>(kActorKindNames, s);
}
std::optional<TaskArea> parse_task_area(std::string_view s) {
    return lookup<TaskArea>(kTaskAreaNames, s);
}
std::optional<ResponsibilityIssue> parse_issue(std::string_view s) {
    return lookup<ResponsibilityIssue>(kIssueNames, s);
}
std::optional<AuthorityKind> parse_authority(std::string_view s) {
    return lookup<AuthorityKind>(kAuthorityNames, s);
}
std::optional<ChannelKind> parse_channel_kind(std::string_view s) {
    return lookup<ChannelKind>(kChannelKindNames, s);
}

template <>
std::string legal_values<ActorKind>() { return join_names(kActorKindNames); }
template <>
std::string legal_values<TaskArea>() { return join_names(kTaskAreaNames); }
template <>
std::string legal_values<ResponsibilityIssue>() { return join_names(kIssueNames); }
template <>
std::string legal_values<AuthorityKind>() { return join_names(kAuthorityNames); }
template <>
std::string legal_values<ChannelKind>() { return join_names(kChannelKindNames); }

std::size_t slot_index(const Slot& s) {
    return std::visit(
        [](auto v) -> std::size_t {
            using T = decltype(v);
            const auto i = static_cast<std::size_t>(v);
            if constexpr (std::is_same_v<T, TaskArea>) return i;
            else if constexpr (std::is_same_v<T, ResponsibilityIssue>) return kTaskAreaCount + i;
            else return kTaskAreaCount + kIssueCount + i;
        },
        s);
}

Slot slot_at(std::size_t index) {
    if (index < kTaskAreaCount) return static_cast<TaskArea>(index);
    index -= kTaskAreaCount;
    if (index < kIssueCount) return static_cast<ResponsibilityIssue>(index);
    index -= kIssueCount;
    if (index < kAuthorityCount) return static_cast<AuthorityKind>(index);
    throw std::out_of_range("slot index out of range");
}

std::string_view slot_name(const Slot& s) {
    return std::visit([](auto v) { return to_string(v); }, s);
}

std::optional<Slot> parse_slot(std::string_view s) {
    if (auto a = parse_task_area(s)) return Slot{*a};
    if (auto i = parse_issue(s)) return Slot{*i};
    if (auto k = parse_authority(s)) return Slot{*k};
    return std::nullopt;
}

Assignment Assignment::nobody() {
    Assignment a;
    a.state_ = AssignmentState::nobody;
    return a;
}

Assignment Assignment::assigned(ActorSet actors) {
    if (actors.empty()) throw ValidationError("an assigned slot needs at least one actor");
    Assignment a;
    a.state_ = AssignmentState::assigned;
    a.actors_ = std::move(actors);
    return a;
}

ChannelEndpoint ChannelEndpoint::actor(ActorId id) {
    if (is_reserved_word(id)) throw ValidationError("'" + id + "' is reserved and cannot name an actor");
    return ChannelEndpoint(std::move(id), false);
}

ChannelEndpoint ChannelEndpoint::affected_persons() {
    return ChannelEndpoint(std::string(kAffectedPersons), true);
}

Channel::Channel(ChannelEndpoint a, ChannelEndpoint b, ChannelKind kind)
    : a_(std::move(a)), b_(std::move(b)), kind_(kind) {
    if (a_ == b_) throw ValidationError("channel endpoints must differ ('" + a_.token() + "')");
    if (b_ < a_) std::swap(a_, b_);
}

const Assignment& ResponsibilityMap::at(const Slot& s) const {
    return std::visit([this](auto v) -> const Assignment& { return at(v); }, s);
}

Assignment& ResponsibilityMap::at(const Slot& s) {
    return std::visit([this](auto v) -> Assignment& { return at(v); }, s);
}

const Actor* ResponsibilityMap::find_actor(std::string_view id) const {
    auto it = std::find_if(actors.begin(), actors.end(), [&](const Actor& a) { return a.id == id; });
    return it == actors.end() ? nullptr : &*it;
}

bool is_reserved_word(std::string_view id) {
    return iequals(id, kNobody) || iequals(id, kAffectedPersons);
}

bool is_valid_actor_id(std::string_view id) {
    if (id.empty()) return false;
    const auto first = static_cast<unsigned char>(id.front());
    if (!(std::isalpha(first) || first == '_')) return false;
    for (char c : id) {
        const auto u = static_cast<unsigned char>(c);
        if (!(std::isalnum(u) || u == '_' || u == '.' || u == '-')) return false;
    }
    return !is_reserved_word(id);
}

ResponsibilityMap new_map(std::string name) {
    if (name.empty()) throw ValidationError("map name must not be empty");
    if (text::has_control(name)) throw ValidationError("map name contains control characters");
    ResponsibilityMap m;
    m.name = std::move(name);
    return m;
}

ResponsibilityMap add_actor(const ResponsibilityMap& map, Actor actor) {
    if (!is_valid_actor_id(actor.id)) {
        throw ValidationError("invalid actor id '" + actor.id + "'");
    }
    if (actor.display_name.empty()) {
        throw ValidationError("actor '" + actor.id + "' needs a display name");
    }
    if (text::has_control(actor.display_name)) {
        throw ValidationError("display name of actor '" + actor.id + "' contains control characters");
    }
    if (actor.notes && text::has_control(*actor.notes, true)) {
        throw ValidationError("notes of actor '" + actor.id + "' contain control characters");
    }
    if (map.has_actor(actor.id)) {
        throw ConflictError("actor '" + actor.id + "' is already declared");
    }
    ResponsibilityMap out = map;
    out.actors.push_back(std::move(actor));
    return out;
}

ResponsibilityMap assign(const ResponsibilityMap& map, const Slot& slot, Assignment assignment) {
    check_assignment_refs(map, assignment);
    ResponsibilityMap out = map;
    out.at(slot) = std::move(assignment);
    return out;
}

ResponsibilityMap add_channel(const ResponsibilityMap& map, const Channel& channel) {
    for (const auto* ep : {&channel.a(), &channel.b()}) {
        if (ep->is_actor() && !map.has_actor(ep->token())) {
            throw ReferenceError(ep->token(), "undeclared channel endpoint '" + ep->token() + "'");
        }
    }
    ResponsibilityMap out = map;
    out.channels.insert(channel);
    return out;
}

std::vector<StructuralDiagnostic> validate(const ResponsibilityMap& map) {
    std::vector<StructuralDiagnostic> out;
    auto error = [&](std::string code, std::string msg, std::optional<Slot> slot = std::nullopt,
                     std::optional<ActorId> actor = std::nullopt) {
        out.push_back({DiagnosticLevel::error, std::move(code), std::move(msg), slot, std::move(actor)});
    };

    if (map.name.empty()) error("empty_name", "map name must not be empty");
    if (text::has_control(map.name)) error("control_character", "map name contains control characters");

    std::unordered_set<std::string> seen;
    for (const auto& a : map.actors) {
        if (!is_valid_actor_id(a.id)) {
            error("invalid_actor_id", "invalid actor id '" + a.id + "'", std::nullopt, a.id);
        }
        if (a.display_name.empty()) {
            error("empty_display_name", "actor '" + a.id + "' has an empty display name",
                  std::nullopt, a.id);
        }
        if (text::has_control(a.display_name) || (a.notes && text::has_control(*a.notes, true))) {
            error("control_character", "actor '" + a.id + "' contains control characters",
                  std::nullopt, a.id);
        }
        if (!seen.insert(a.id).second) {
            error("duplicate_actor", "actor '" + a.id + "' is declared more than once", std::nullopt,
                  a.id);
        }
    }

    for (std::size_t i = 0; i < kSlotCount; ++i) {
        const Slot slot = slot_at(i);
        const Assignment& asg = map.at(slot);
        const bool has_actors = !asg.actors().empty();
        if (asg.is_assigned() != has_actors) {
            error("assignment_state",
                  "slot '" + std::string(slot_name(slot)) + "' is " +
                      std::string(to_string(asg.state())) +
                      (has_actors ? " but lists actors" : " but lists no actors"),
                  slot);
        }
        for (const auto& id : asg.actors()) {
            if (!seen.count(id)) {
                error("undeclared_actor",
                      "slot '" + std::string(slot_name(slot)) + "' references undeclared actor '" +
                          id + "'",
                      slot, id);
            }
        }
    }

    std::set<std::tuple<std::string, std::string, ChannelKind>> channel_keys;
    for (const auto& ch : map.channels) {
        if (ch.a() == ch.b()) {
            error("self_channel", "channel connects '" + ch.a().token() + "' with itself");
        }
        for (const auto* ep : {&ch.a(), &ch.b()}) {
            if (ep->is_actor() && !seen.count(ep->token())) {
                error("undeclared_actor",
                      "channel references undeclared actor '" + ep->token() + "'", std::nullopt,
                      ep->token());
            }
        }
        auto lo = std::min(ch.a().token(), ch.b().token());
        auto hi = std::max(ch.a().token(), ch.b().token());
        if (!channel_keys.emplace(lo, hi, ch.kind()).second) {
            error("duplicate_channel", "channel " + lo + " <-> " + hi + " appears twice");
        }
    }

    for (std::size_t i = 0; i < kSlotCount; ++i) {
        const Slot slot = slot_at(i);
        if (map.at(slot).is_unanswered()) {
            out.push_back({DiagnosticLevel::note, "unanswered_slot",
                           "no answer yet for '" + std::string(slot_name(slot)) + "'", slot,
                           std::nullopt});
        }
    }
    return out;
}

std::size_t count_errors(const std::vector<StructuralDiagnostic>& diags) {
    return static_cast<std::size_t>(
        std::count_if(diags.begin(), diags.end(), [](const auto& d) { return d.is_error(); }));
}

namespace {
std::string summarize(const std::vector<StructuralDiagnostic>& diags) {
    std::string msg = "map is structurally invalid";
    for (const auto& d : diags) {
        if (d.is_error()) {
            msg += "; " + d.message;
        }
    }
    return msg;
}
}  // namespace

InvalidMapError::InvalidMapError(std::vector<StructuralDiagnostic> diags)
    : Error(summarize(diags)), diags_(std::move(diags)) {}

void require_valid(const ResponsibilityMap& map) {
    auto diags = validate(map);
    if (count_errors(diags) > 0) throw InvalidMapError(std::move(diags));
}

}  // namespace respmap
