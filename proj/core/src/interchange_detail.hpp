#pragma once

// JSON building blocks shared by the interchange format, the HTTP service
// block payloads and the policy loader.

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "respmap/format.hpp"
#include "respmap/model.hpp"

namespace respmap::detail {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

class JsonReader {
public:
    explicit JsonReader(std::vector<ParseDiagnostic>& sink) : diags_(sink) {}

    void error(const std::string& path, std::string code, std::string message);
    void warning(const std::string& path, std::string code, std::string message);
    bool failed() const;

    /// Reports keys of `obj` not in `allowed`.
    void reject_unknown_keys(const json& obj, const std::string& path,
                             std::initializer_list<std::string_view> allowed);
    bool expect_type(const json& v, const std::string& path, json::value_t type, std::string_view what);

    std::optional<std::vector<Actor>> read_actors(const json& v, const std::string& path);
    std::optional<Assignment> read_assignment(const json& v, const std::string& path);

    /// Reads an object keyed by slot names of one family into `out`. Only the
    /// listed keys are touched, so the same routine serves full blocks and
    /// what-if overrides.
    template <typename Enum>
    void read_slot_block(const json& v, const std::string& path, ResponsibilityMap& out,
                         std::vector<Slot>* touched = nullptr);

    /// Channels with the element path of each, for later reference checks.
    std::optional<std::vector<std::pair<Channel, std::string>>> read_channels(const json& v,
                                                                              const std::string& path);

private:
    std::vector<ParseDiagnostic>& diags_;
};

ordered_json actors_to_json(const ResponsibilityMap& map);
template <typename Enum>
ordered_json slot_block_to_json(const ResponsibilityMap& map);
ordered_json channels_to_json(const ResponsibilityMap& map);
ordered_json map_to_json(const ResponsibilityMap& map);

/// Parses text as JSON, reporting a located `invalid_document` diagnostic on failure.
std::optional<json> parse_json(std::string_view text, std::vector<ParseDiagnostic>& diags);

/// Builds a map from an already-parsed interchange document.
ParseResult map_from_json(const json& doc);

std::string slot_family_key(const Slot& slot);

}  // namespace respmap::detail
