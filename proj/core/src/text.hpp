#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace respmap::text {

/// Byte offset of the first invalid UTF-8 sequence, if any.
std::optional<std::size_t> find_invalid_utf8(std::string_view s);

/// Number of code points in a valid UTF-8 string.
std::size_t codepoint_count(std::string_view s);

/// True if `s` contains a C0 control character or DEL. With
/// `allow_layout`, tab, line feed and carriage return are accepted.
bool has_control(std::string_view s, bool allow_layout = false);

std::string to_lower_ascii(std::string_view s);
bool iequals(std::string_view a, std::string_view b);

}  // namespace respmap::text
