#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "respmap/catalog.hpp"

namespace respmap::cli {

enum ExitStatus : int {
    kOk = 0,
    kFindings = 1,
    kInvalidInput = 2,
    kUsage = 3,
};

/// Runs one command line. Reports go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Commented RMAP skeleton: every slot as a commented statement under its
/// guiding question, plus one commented example per required channel rule.
/// Parses as a map with every slot unanswered. Throws ValidationError for an
/// unusable name.
std::string init_template(std::string_view name, Locale locale);

}  // namespace respmap::cli
