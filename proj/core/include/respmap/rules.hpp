#pragma once

#include <array>
#include <compare>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "respmap/format.hpp"
#include "respmap/model.hpp"

namespace respmap {

enum class FindingCode {
    V1_TASK_GAP,
    V2_EVAL_NOT_INDEPENDENT,
    V3_RESPONSIBLE_NOT_TASKED,
    V4_RESPONSIBILITY_GAP,
    V4_RESPONSIBILITY_OVERLAP,
    V5_RESPONSIBLE_NO_AUTHORITY,
    V6_MISSING_CHANNEL,
    INPUT_INCOMPLETE,
};

inline constexpr std::array<FindingCode, 8> kAllFindingCodes{
    FindingCode::V1_TASK_GAP,
    FindingCode::V2_EVAL_NOT_INDEPENDENT,
    FindingCode::V3_RESPONSIBLE_NOT_TASKED,
    FindingCode::V4_RESPONSIBILITY_GAP,
    FindingCode::V4_RESPONSIBILITY_OVERLAP,
    FindingCode::V5_RESPONSIBLE_NO_AUTHORITY,
    FindingCode::V6_MISSING_CHANNEL,
    FindingCode::INPUT_INCOMPLETE,
};

inline constexpr int kSectionCount = 6;

std::string_view to_string(FindingCode c);
std::optional<FindingCode> parse_finding_code(std::string_view s);
/// Output section 1..6, or nullopt for INPUT_INCOMPLETE.
std::optional<int> section_of(FindingCode c);

enum class FindingSeverity { info, warning, error };  // ascending

std::string_view to_string(FindingSeverity s);
std::optional<FindingSeverity> parse_finding_severity(std::string_view s);

/// A slot (or none) together with the actors the finding names for it.
struct Subject {
    std::optional<Slot> slot;
    std::vector<ActorId> actors;  // sorted, unique

    friend bool operator==(const Subject&, const Subject&) = default;
};

// Subject conventions per code (the first subject is the primary one):
//   V1_TASK_GAP                  [area]
//   V2_EVAL_NOT_INDEPENDENT      [area {shared}, evaluation {shared}]
//   V3_RESPONSIBLE_NOT_TASKED    [issue {actor}, mapped areas...]
//   V4_RESPONSIBILITY_GAP        [issue]
//   V4_RESPONSIBILITY_OVERLAP    [issue {all responsible}]
//   V5_RESPONSIBLE_NO_AUTHORITY  [issue {actor}, acceptable authorities...]
//   V6_MISSING_CHANNEL           rules a-c: [area {members}, area {members}]
//                                rule d:    [issue {responsible}, area {members}...]
//                                rule e:    []
//   INPUT_INCOMPLETE             [unanswered slot]
struct Finding {
    FindingCode code = FindingCode::INPUT_INCOMPLETE;
    std::optional<int> section;
    FindingSeverity severity = FindingSeverity::info;
    std::vector<Subject> subjects;
    std::string message;

    friend bool operator==(const Finding&, const Finding&) = default;
};

/// Identity of a finding for diffs and oracle comparison: code plus subjects,
/// message text excluded.
struct FindingIdentity {
    FindingCode code;
    std::vector<std::pair<int, std::vector<ActorId>>> subjects;  // slot index or -1

    friend auto operator<=>(const FindingIdentity&, const FindingIdentity&) = default;
    friend bool operator==(const FindingIdentity&, const FindingIdentity&) = default;
};

FindingIdentity identity_of(const Finding& f);
std::string describe_identity(const FindingIdentity& id);

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Toggles for the default required-channel rules.
struct ChannelPolicy {
    bool practical_use_development = true;        // (a)
    bool practical_use_implementation = true;     // (b)
    bool evaluation_fundamental_decision = true;  // (c)
    bool responsible_tasked = true;               // (d)
    bool affected_persons_complaint = true;       // (e)

    friend bool operator==(const ChannelPolicy&, const ChannelPolicy&) = default;
};

struct RuleConfig {
    std::array<std::set<TaskArea>, kIssueCount> issue_area_map;
    /// Holding any one of the listed authorities suffices.
    std::array<std::set<AuthorityKind>, kIssueCount> issue_authority_map;
    ChannelPolicy required_channels;
    bool overlap_is_warning = true;

    const std::set<TaskArea>& areas_for(ResponsibilityIssue i) const {
        return issue_area_map[static_cast<std::size_t>(i)];
    }
    const std::set<AuthorityKind>& authorities_for(ResponsibilityIssue i) const {
        return issue_authority_map[static_cast<std::size_t>(i)];
    }

    static RuleConfig defaults();

    friend bool operator==(const RuleConfig&, const RuleConfig&) = default;
};

/// Throws ValidationError if any target set is empty.
void validate_config(const RuleConfig& config);

struct PolicyResult {
    std::optional<RuleConfig> config;
    std::vector<ParseDiagnostic> diagnostics;
    bool ok() const noexcept { return config.has_value(); }
};

/// JSON policy file. Absent keys keep their default values; unknown keys are
/// rejected.
PolicyResult parse_policy(std::string_view document);
/// Canonical JSON rendering of a full config.
std::string emit_policy(const RuleConfig& config);
/// "sha256:<hex>" over the canonical rendering.
std::string config_fingerprint(const RuleConfig& config);

// ---------------------------------------------------------------------------
// Checks. Each expects a structurally valid map. INPUT_INCOMPLETE findings
// they return name a single unanswered slot each.
// ---------------------------------------------------------------------------

std::vector<Finding> check_task_gaps(const ResponsibilityMap& map);
std::vector<Finding> check_evaluation_independence(const ResponsibilityMap& map);
std::vector<Finding> check_responsible_not_tasked(const ResponsibilityMap& map, const RuleConfig& config);
std::vector<Finding> check_responsibility_gaps_overlaps(const ResponsibilityMap& map,
                                                        const RuleConfig& config = RuleConfig::defaults());
std::vector<Finding> check_authority_mismatch(const ResponsibilityMap& map, const RuleConfig& config);
std::vector<Finding> check_channels(const ResponsibilityMap& map, const RuleConfig& config);

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

struct Report {
    std::string map_name;
    std::array<std::vector<Finding>, kSectionCount> sections;
    std::vector<Finding> notes;  // INPUT_INCOMPLETE, one per unanswered slot, slot order
    std::string config_fingerprint;
    /// Display names of the map's actors, for rendering messages.
    std::vector<std::pair<ActorId, std::string>> actor_names;

    const std::vector<Finding>& section(int n) const { return sections.at(static_cast<std::size_t>(n - 1)); }
    std::size_t finding_count() const;
    /// All section findings in section order.
    std::vector<Finding> findings() const;

    friend bool operator==(const Report&, const Report&) = default;
};

/// Runs the six checks in section order. Throws InvalidMapError for a
/// structurally invalid map and ValidationError for an incomplete config.
Report analyze(const ResponsibilityMap& map, const RuleConfig& config = RuleConfig::defaults());

}  // namespace respmap
