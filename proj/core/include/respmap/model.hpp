#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace respmap {

// ---------------------------------------------------------------------------
// Errors raised by the model operations. Parsers report problems as
// diagnostics instead; these are for programmatic construction.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed value (empty name, self channel, bad id token, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Declaring something that already exists.
class ConflictError : public Error {
public:
    using Error::Error;
};

/// Reference to an actor id that is not declared in the map.
class ReferenceError : public Error {
public:
    ReferenceError(std::string id, const std::string& what)
        : Error(what), id_(std::move(id)) {}
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

// ---------------------------------------------------------------------------
// Closed enumerations
// ---------------------------------------------------------------------------

enum class ActorKind { individual, group, internal_unit, external_org };

enum class TaskArea {
    fundamental_decision,
    implementation,
    development,
    practical_use,
    system_security,
    data_management,
    evaluation,
};

enum class ResponsibilityIssue {
    targets_not_met,
    improper_integration,
    data_protection_complaints,
    security_breach,
    incorrect_use,
};

enum class AuthorityKind {
    halt_system,
    change_implementation_use,
    correct_database_entries,
    institute_security_measures,
};

enum class ChannelKind { feedback, complaint, escalation };

inline constexpr std::size_t kTaskAreaCount = 7;
inline constexpr std::size_t kIssueCount = 5;
inline constexpr std::size_t kAuthorityCount = 4;
inline constexpr std::size_t kSlotCount = kTaskAreaCount + kIssueCount + kAuthorityCount;

inline constexpr std::array<TaskArea, kTaskAreaCount> kAllTaskAreas{
    TaskArea::fundamental_decision, TaskArea::implementation, TaskArea::development,
    TaskArea::practical_use,        TaskArea::system_security, TaskArea::data_management,
    TaskArea::evaluation,
};

inline constexpr std::array<ResponsibilityIssue, kIssueCount> kAllIssues{
    ResponsibilityIssue::targets_not_met,       ResponsibilityIssue::improper_integration,
    ResponsibilityIssue::data_protection_complaints, ResponsibilityIssue::security_breach,
    ResponsibilityIssue::incorrect_use,
};

inline constexpr std::array<AuthorityKind, kAuthorityCount> kAllAuthorities{
    AuthorityKind::halt_system,
    AuthorityKind::change_implementation_use,
    AuthorityKind::correct_database_entries,
    AuthorityKind::institute_security_measures,
};

inline constexpr std::array<ActorKind, 4> kAllActorKinds{
    ActorKind::individual, ActorKind::group, ActorKind::internal_unit, ActorKind::external_org};

inline constexpr std::array<ChannelKind, 3> kAllChannelKinds{
    ChannelKind::feedback, ChannelKind::complaint, ChannelKind::escalation};

std::string_view to_string(ActorKind k);
std::string_view to_string(TaskArea a);
std::string_view to_string(ResponsibilityIssue i);
std::string_view to_string(AuthorityKind k);
std::string_view to_string(ChannelKind k);

// Case-insensitive lookups by canonical token.
std::optional<ActorKind> parse_actor_kind(std::string_view s);
std::optional<TaskArea> parse_task_area(std::string_view s);
std::optional<ResponsibilityIssue> parse_issue(std::string_view s);
std::optional<AuthorityKind> parse_authority(std::string_view s);
std::optional<ChannelKind> parse_channel_kind(std::string_view s);

/// Comma-separated list of the legal tokens of an enumeration, in enum order.
template <typename Enum>
std::string legal_values();
template <> std::string legal_values<ActorKind>();
template <> std::string legal_values<TaskArea>();
template <> std::string legal_values<ResponsibilityIssue>();
template <> std::string legal_values<AuthorityKind>();
template <> std::string legal_values<ChannelKind>();

// ---------------------------------------------------------------------------
// Slots: one of the 16 questions an assignment answers.
// ---------------------------------------------------------------------------

using Slot = std::variant<TaskArea, ResponsibilityIssue, AuthorityKind>;

/// Position of the slot in the global order: task areas, then issues, then
/// authorities, each in enum order. Range [0, kSlotCount).
std::size_t slot_index(const Slot& s);
Slot slot_at(std::size_t index);
std::string_view slot_name(const Slot& s);
/// Slot names are unique across all three enumerations.
std::optional<Slot> parse_slot(std::string_view s);

inline bool slot_less(const Slot& a, const Slot& b) { return slot_index(a) < slot_index(b); }

// ---------------------------------------------------------------------------
// Value types
// ---------------------------------------------------------------------------

using ActorId = std::string;
using ActorSet = std::set<ActorId>;

struct Actor {
    ActorId id;
    std::string display_name;
    ActorKind kind = ActorKind::individual;
    std::optional<std::string> notes;

    friend bool operator==(const Actor&, const Actor&) = default;
};

enum class AssignmentState { unanswered, nobody, assigned };

std::string_view to_string(AssignmentState s);

/// Tri-state answer to a slot. The actor set is non-empty exactly when the
/// state is `assigned`.
class Assignment {
public:
    Assignment() = default;

    static Assignment unanswered() { return {}; }
    static Assignment nobody();
    /// Throws ValidationError when `actors` is empty.
    static Assignment assigned(ActorSet actors);

    AssignmentState state() const noexcept { return state_; }
    const ActorSet& actors() const noexcept { return actors_; }

    bool is_unanswered() const noexcept { return state_ == AssignmentState::unanswered; }
    bool is_nobody() const noexcept { return state_ == AssignmentState::nobody; }
    bool is_assigned() const noexcept { return state_ == AssignmentState::assigned; }
    bool contains(const ActorId& id) const { return actors_.count(id) != 0; }

    friend bool operator==(const Assignment&, const Assignment&) = default;

private:
    AssignmentState state_ = AssignmentState::unanswered;
    ActorSet actors_;
};

/// Reserved endpoint standing for the people affected by the system's decisions.
inline constexpr std::string_view kAffectedPersons = "affected_persons";
/// Keyword used for an explicit "nobody" answer.
inline constexpr std::string_view kNobody = "nobody";

class ChannelEndpoint {
public:
    static ChannelEndpoint actor(ActorId id);
    static ChannelEndpoint affected_persons();

    bool is_affected_persons() const noexcept { return affected_; }
    bool is_actor() const noexcept { return !affected_; }
    /// Actor id, or "affected_persons" for the external endpoint.
    const std::string& token() const noexcept { return token_; }

    friend bool operator==(const ChannelEndpoint&, const ChannelEndpoint&) = default;
    friend auto operator<=>(const ChannelEndpoint& a, const ChannelEndpoint& b) {
        return a.token_ <=> b.token_;
    }

private:
    ChannelEndpoint(std::string token, bool affected) : token_(std::move(token)), affected_(affected) {}
    std::string token_;
    bool affected_ = false;
};

/// Undirected channel. The constructor normalises the endpoint order so that
/// `a() <= b()`, which makes (x, y) and (y, x) compare equal.
class Channel {
public:
    /// Throws ValidationError when both endpoints are the same.
    Channel(ChannelEndpoint a, ChannelEndpoint b, ChannelKind kind);

    const ChannelEndpoint& a() const noexcept { return a_; }
    const ChannelEndpoint& b() const noexcept { return b_; }
    ChannelKind kind() const noexcept { return kind_; }

    bool connects(const std::string& x, const std::string& y) const {
        return (a_.token() == x && b_.token() == y) || (a_.token() == y && b_.token() == x);
    }

    friend bool operator==(const Channel&, const Channel&) = default;
    friend auto operator<=>(const Channel& l, const Channel& r) {
        if (auto c = l.a_ <=> r.a_; c != 0) return c;
        if (auto c = l.b_ <=> r.b_; c != 0) return c;
        return l.kind_ <=> r.kind_;
    }

private:
    ChannelEndpoint a_;
    ChannelEndpoint b_;
    ChannelKind kind_;
};

/// The aggregate answer set of a questionnaire. A plain value: operations
/// below never mutate their argument and return a fresh map.
struct ResponsibilityMap {
    std::string name;
    std::vector<Actor> actors;  // declaration order
    std::array<Assignment, kTaskAreaCount> tasks{};
    std::array<Assignment, kIssueCount> responsibilities{};
    std::array<Assignment, kAuthorityCount> authorities{};
    std::set<Channel> channels;

    const Assignment& at(TaskArea a) const { return tasks[static_cast<std::size_t>(a)]; }
    const Assignment& at(ResponsibilityIssue i) const {
        return responsibilities[static_cast<std::size_t>(i)];
    }
    const Assignment& at(AuthorityKind k) const { return authorities[static_cast<std::size_t>(k)]; }
    const Assignment& at(const Slot& s) const;

    Assignment& at(TaskArea a) { return tasks[static_cast<std::size_t>(a)]; }
    Assignment& at(ResponsibilityIssue i) { return responsibilities[static_cast<std::size_t>(i)]; }
    Assignment& at(AuthorityKind k) { return authorities[static_cast<std::size_t>(k)]; }
    Assignment& at(const Slot& s);

    const Actor* find_actor(std::string_view id) const;
    bool has_actor(std::string_view id) const { return find_actor(id) != nullptr; }

    friend bool operator==(const ResponsibilityMap&, const ResponsibilityMap&) = default;
};

/// Actor ids are tokens `[A-Za-z_][A-Za-z0-9_.-]*` and may not collide
/// (case-insensitively) with the reserved words `nobody` and `affected_persons`.
bool is_valid_actor_id(std::string_view id);
bool is_reserved_word(std::string_view id);

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

ResponsibilityMap new_map(std::string name);
ResponsibilityMap add_actor(const ResponsibilityMap& map, Actor actor);
ResponsibilityMap assign(const ResponsibilityMap& map, const Slot& slot, Assignment assignment);
ResponsibilityMap add_channel(const ResponsibilityMap& map, const Channel& channel);

enum class DiagnosticLevel { error, note };

struct StructuralDiagnostic {
    DiagnosticLevel level = DiagnosticLevel::error;
    std::string code;
    std::string message;
    std::optional<Slot> slot;     // set for slot-related diagnostics
    std::optional<ActorId> actor; // set for actor-related diagnostics

    bool is_error() const noexcept { return level == DiagnosticLevel::error; }
};

/// Structural errors first (in discovery order), then one `unanswered_slot`
/// note per unanswered slot in slot order.
std::vector<StructuralDiagnostic> validate(const ResponsibilityMap& map);

std::size_t count_errors(const std::vector<StructuralDiagnostic>& diags);

/// Thrown by operations that require a structurally valid map.
class InvalidMapError : public Error {
public:
    explicit InvalidMapError(std::vector<StructuralDiagnostic> diags);
    const std::vector<StructuralDiagnostic>& diagnostics() const noexcept { return diags_; }

private:
    std::vector<StructuralDiagnostic> diags_;
};

/// Throws InvalidMapError when validate() reports any structural error.
void require_valid(const ResponsibilityMap& map);

}  // namespace respmap
