#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "respmap/catalog.hpp"
#include "respmap/model.hpp"
#include "respmap/rules.hpp"

namespace respmap {

/// Human-readable report: heading, disclaimer, six sections (empty ones get
/// the no-findings sentence), then incomplete-input notes. Messages are
/// rendered in `locale`.
std::string render_text(const Report& report, Locale locale);
/// Same, with the locale given as a tag. Throws ValidationError naming the
/// supported locales for an unknown tag.
std::string render_text(const Report& report, std::string_view locale);

/// JSON document:
///   {format, map_name, config_fingerprint, locale, actors, findings, notes}
/// Findings carry {code, section, severity, subjects, message}.
std::string render_structured(const Report& report, Locale locale = Locale::en);

/// Inverse of render_structured. Throws Error on malformed input.
Report parse_structured_report(std::string_view document);

/// Graphviz DOT digraph: one node per actor, one per slot (all 16), an
/// `affected_persons` node when a channel uses it; actor->slot edges labelled
/// tasked/responsible/authorized and undirected dashed edges for channels.
std::string export_graph(const ResponsibilityMap& map);

// Diff -----------------------------------------------------------------------

struct DiffReport {
    std::vector<Finding> resolved;    // in `before` only, before's order
    std::vector<Finding> introduced;  // in `after` only, after's order
    std::size_t unchanged_count = 0;

    bool empty() const noexcept { return resolved.empty() && introduced.empty(); }
    friend bool operator==(const DiffReport&, const DiffReport&) = default;
};

/// Multiset difference of section findings under finding identity. Notes do
/// not take part. Throws ConflictError when the config fingerprints differ.
DiffReport diff(const Report& before, const Report& after);

/// First line: "resolved: N, introduced: M, unchanged: K".
std::string render_diff_text(const DiffReport& d);
std::string render_diff_structured(const DiffReport& d);

}  // namespace respmap
