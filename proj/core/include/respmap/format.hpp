#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "respmap/model.hpp"

namespace respmap {

/// 1-based position of a diagnostic. Columns and lengths count Unicode code
/// points, not bytes.
struct SourceSpan {
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t length = 1;

    friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

enum class Severity { error, warning };

std::string_view to_string(Severity s);

struct ParseDiagnostic {
    SourceSpan span;
    std::string code;  // one of diagnostic_catalog()
    std::string message;
    Severity severity = Severity::error;
    /// Field path (`$.actors[1].kind`) for interchange documents; empty for RMAP.
    std::string path;

    bool is_error() const noexcept { return severity == Severity::error; }
};

struct DiagnosticCodeInfo {
    std::string_view code;
    Severity severity;
    std::string_view summary;
};

/// Closed catalog of every code the parsers can produce.
const std::vector<DiagnosticCodeInfo>& diagnostic_catalog();
bool is_known_diagnostic_code(std::string_view code);

struct ParseResult {
    std::optional<ResponsibilityMap> map;  // present iff there are no errors
    std::vector<ParseDiagnostic> diagnostics;

    bool ok() const noexcept { return map.has_value(); }
    std::size_t error_count() const;
};

/// `file:line:col: severity: message [code]`
std::string format_diagnostic(const ParseDiagnostic& d, std::string_view source_name);

// RMAP text format ----------------------------------------------------------

ParseResult parse_rmap(std::string_view source);

/// Canonical text: actors in declaration order, slots in enum order,
/// unanswered slots omitted, channels sorted by normalised endpoint pair.
/// Lines end with LF.
std::string emit_rmap(const ResponsibilityMap& map);

// Structured interchange (JSON) ---------------------------------------------

inline constexpr std::string_view kInterchangeFormatVersion = "1";

ParseResult parse_interchange(std::string_view document);

/// Deterministic key order, two-space indentation, trailing newline.
std::string emit_interchange(const ResponsibilityMap& map);

}  // namespace respmap
