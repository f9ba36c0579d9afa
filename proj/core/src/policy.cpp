#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <memory>

#include "interchange_detail.hpp"
#include "respmap/rules.hpp"

namespace respmap {

namespace {

using detail::json;
using detail::ordered_json;

struct ChannelToggle {
    std::string_view key;
    bool ChannelPolicy::*field;
};

constexpr std::array<ChannelToggle, 5> kChannelToggles{{
    {"practical_use_development", &ChannelPolicy::practical_use_development},
    {"practical_use_implementation", &ChannelPolicy::practical_use_implementation},
    {"evaluation_fundamental_decision", &ChannelPolicy::evaluation_fundamental_decision},
    {"responsible_tasked", &ChannelPolicy::responsible_tasked},
    {"affected_persons_complaint", &ChannelPolicy::affected_persons_complaint},
}};

template <typename Target, typename Parse>
void read_issue_table(detail::JsonReader& r, const json& v, const std::string& path,
                      std::array<std::set<Target>, kIssueCount>& table, Parse parse,
                      std::string_view noun, std::string legal) {
    if (!r.expect_type(v, path, json::value_t::object, "object keyed by responsibility issue")) return;
    for (const auto& [key, value] : v.items()) {
        const std::string p = path + "." + key;
        auto issue = parse_issue(key);
        if (!issue || to_string(*issue) != key) {
            r.error(p, "unknown_issue",
                    "unknown responsibility issue '" + key + "'; expected one of: " +
                        legal_values<ResponsibilityIssue>());
            continue;
        }
        if (!r.expect_type(value, p, json::value_t::array, "array")) continue;
        std::set<Target> targets;
        bool ok = true;
        for (std::size_t i = 0; i < value.size(); ++i) {
            const std::string ep = p + "[" + std::to_string(i) + "]";
            if (!r.expect_type(value[i], ep, json::value_t::string, "string")) {
                ok = false;
                continue;
            }
            const auto text = value[i].template get<std::string>();
            auto t = parse(text);
            if (!t || to_string(*t) != text) {
                r.error(ep, "unknown_value",
                        "unknown " + std::string(noun) + " '" + text + "'; expected one of: " + legal);
                ok = false;
                continue;
            }
            targets.insert(*t);
        }
        if (ok && targets.empty()) {
            r.error(p, "empty_target_set", "target set for '" + key + "' must not be empty");
            ok = false;
        }
        if (ok) table[static_cast<std::size_t>(*issue)] = std::move(targets);
    }
}

}  // namespace

PolicyResult parse_policy(std::string_view document) {
    PolicyResult result;
    auto doc = detail::parse_json(document, result.diagnostics);
    if (!doc) return result;

    detail::JsonReader r(result.diagnostics);
    RuleConfig config = RuleConfig::defaults();
    if (!r.expect_type(*doc, "$", json::value_t::object, "a JSON object")) return result;
    r.reject_unknown_keys(*doc, "$",
                          {"issue_area_map", "issue_authority_map", "required_channels", "overlap_is_warning"});

    if (doc->contains("issue_area_map")) {
        read_issue_table(r, (*doc)["issue_area_map"], "$.issue_area_map", config.issue_area_map,
                         parse_task_area, "task area", legal_values<TaskArea>());
    }
    if (doc->contains("issue_authority_map")) {
        read_issue_table(r, (*doc)["issue_authority_map"], "$.issue_authority_map",
                         config.issue_authority_map, parse_authority, "authority kind",
                         legal_values<AuthorityKind>());
    }
    if (doc->contains("required_channels")) {
        const json& rc = (*doc)["required_channels"];
        if (r.expect_type(rc, "$.required_channels", json::value_t::object, "object")) {
            for (const auto& [key, value] : rc.items()) {
                const std::string p = "$.required_channels." + key;
                auto it = std::find_if(kChannelToggles.begin(), kChannelToggles.end(),
                                       [&](const auto& t) { return t.key == key; });
                if (it == kChannelToggles.end()) {
                    std::string legal;
                    for (const auto& t : kChannelToggles) {
                        if (!legal.empty()) legal += ", ";
                        legal += t.key;
                    }
                    r.error(p, "unknown_field", "unknown channel rule '" + key + "'; expected one of: " + legal);
                    continue;
                }
                if (r.expect_type(value, p, json::value_t::boolean, "boolean")) {
                    config.required_channels.*(it->field) = value.get<bool>();
                }
            }
        }
    }
    if (doc->contains("overlap_is_warning")) {
        const json& v = (*doc)["overlap_is_warning"];
        if (r.expect_type(v, "$.overlap_is_warning", json::value_t::boolean, "boolean")) {
            config.overlap_is_warning = v.get<bool>();
        }
    }

    if (!r.failed()) result.config = std::move(config);
    return result;
}

std::string emit_policy(const RuleConfig& config) {
    ordered_json doc;
    ordered_json areas = ordered_json::object();
    ordered_json auths = ordered_json::object();
    for (auto issue : kAllIssues) {
        const std::string key(to_string(issue));
        areas[key] = ordered_json::array();
        for (auto a : config.areas_for(issue)) areas[key].push_back(std::string(to_string(a)));
        auths[key] = ordered_json::array();
        for (auto k : config.authorities_for(issue)) auths[key].push_back(std::string(to_string(k)));
    }
    doc["issue_area_map"] = std::move(areas);
    doc["issue_authority_map"] = std::move(auths);
    ordered_json rc = ordered_json::object();
    for (const auto& t : kChannelToggles) rc[std::string(t.key)] = config.required_channels.*(t.field);
    doc["required_channels"] = std::move(rc);
    doc["overlap_is_warning"] = config.overlap_is_warning;
    return doc.dump(2) + "\n";
}

std::string config_fingerprint(const RuleConfig& config) {
    const std::string canonical = emit_policy(config);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), canonical.data(), canonical.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
        throw Error("sha256 digest failed");
    }
    std::string out = "sha256:";
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        out += buf;
    }
    return out;
}

}  // namespace respmap
