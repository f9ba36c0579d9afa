#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "respmap/format.hpp"

using namespace respmap;

namespace {

const char* kActors = R"(map "t" {
  actor azra "Azra Jašarević" kind=individual
  actor techsolve "TechSolve GmbH" kind=external_org
)";

ParseResult parse_body(const std::string& body) { return parse_rmap(std::string(kActors) + body + "}\n"); }

const ParseDiagnostic& first_error(const ParseResult& r) {
    auto it = std::find_if(r.diagnostics.begin(), r.diagnostics.end(), [](const auto& d) { return d.is_error(); });
    REQUIRE(it != r.diagnostics.end());
    return *it;
}

bool has_code(const ParseResult& r, std::string_view code) {
    return std::any_of(r.diagnostics.begin(), r.diagnostics.end(), [&](const auto& d) { return d.code == code; });
}

}  // namespace

TEST_SUITE("rmap") {

TEST_CASE("slot statements") {
    auto r = parse_body("  task development -> techsolve\n  task implementation -> nobody\n"
                        "  responsible targets_not_met -> azra, techsolve\n");
    REQUIRE(r.ok());
    CHECK(r.diagnostics.empty());
    const auto& m = *r.map;
    CHECK(m.at(TaskArea::development).actors() == ActorSet{"techsolve"});
    CHECK(m.at(TaskArea::implementation).is_nobody());
    CHECK(m.at(ResponsibilityIssue::targets_not_met).actors() == ActorSet{"azra", "techsolve"});
    CHECK(m.at(TaskArea::evaluation).is_unanswered());
    CHECK(m.actors[0].display_name == "Azra Jašarević");
}

TEST_CASE("unknown task area is one spanned error at the token") {
    auto r = parse_body("  task developmnt -> azra\n");
    CHECK_FALSE(r.ok());
    CHECK(r.error_count() == 1);
    const auto& d = first_error(r);
    CHECK(d.code == "unknown_task_area");
    CHECK(d.span.line == 4);
    CHECK(d.span.column == 8);
    CHECK(d.span.length == 10);
    CHECK(d.message.find("unknown task area") != std::string::npos);
    CHECK(d.message.find("fundamental_decision") != std::string::npos);
}

TEST_CASE("columns count code points") {
    auto r = parse_rmap("map \"Jašarević\" {\n  actor ä \"x\" kind=individual\n}\n");
    CHECK_FALSE(r.ok());
    const auto& d = first_error(r);
    CHECK(d.span.line == 2);
    CHECK(d.span.column == 9);
}

TEST_CASE("keywords and enum tokens are case-insensitive, ids are not") {
    auto r = parse_rmap("MAP \"t\" {\n  Actor Azra \"A\" KIND=Individual\n  TASK Development -> Azra\n}\n");
    REQUIRE(r.ok());
    CHECK(r.map->at(TaskArea::development).actors() == ActorSet{"Azra"});
    auto bad = parse_rmap("map \"t\" {\n  actor Azra \"A\" kind=individual\n  task development -> azra\n}\n");
    CHECK_FALSE(bad.ok());
    CHECK(first_error(bad).code == "undeclared_actor");
}

TEST_CASE("forward references resolve at the end") {
    auto r = parse_rmap("map \"t\" {\n  task development -> later\n  actor later \"L\" kind=group\n}\n");
    CHECK(r.ok());
}

TEST_CASE("semantic errors") {
    SUBCASE("undeclared actor") {
        auto r = parse_body("  task evaluation -> ghost\n");
        CHECK(first_error(r).code == "undeclared_actor");
        CHECK(first_error(r).message.find("ghost") != std::string::npos);
    }
    SUBCASE("duplicate actor") {
        auto r = parse_body("  actor azra \"Again\" kind=group\n");
        CHECK(first_error(r).code == "duplicate_actor");
    }
    SUBCASE("duplicate slot is an error, not last-write-wins") {
        auto r = parse_body("  task development -> azra\n  task development -> techsolve\n");
        CHECK_FALSE(r.ok());
        CHECK(first_error(r).code == "duplicate_slot");
        CHECK(first_error(r).span.line == 5);
    }
    SUBCASE("nobody mixed with actors") {
        CHECK(first_error(parse_body("  task development -> azra, nobody\n")).code == "nobody_mixed");
    }
    SUBCASE("self channel") {
        CHECK(first_error(parse_body("  channel azra <-> azra kind=feedback\n")).code == "self_channel");
    }
    SUBCASE("unknown keyword") {
        CHECK(first_error(parse_body("  owner development -> azra\n")).code == "unknown_keyword");
    }
    SUBCASE("unknown enum values") {
        CHECK(first_error(parse_body("  responsible gdpr -> azra\n")).code == "unknown_issue");
        CHECK(first_error(parse_body("  authority fire -> azra\n")).code == "unknown_authority");
        CHECK(first_error(parse_body("  channel azra <-> techsolve kind=email\n")).code == "unknown_channel_kind");
        CHECK(first_error(parse_body("  actor x \"X\" kind=robot\n")).code == "unknown_actor_kind");
    }
    SUBCASE("reserved words") {
        CHECK(first_error(parse_body("  actor nobody \"N\" kind=individual\n")).code == "invalid_actor_id");
        CHECK(first_error(parse_body("  actor affected_persons \"N\" kind=individual\n")).code == "invalid_actor_id");
    }
    SUBCASE("missing kind") {
        CHECK(first_error(parse_body("  actor x \"X\"\n")).code == "missing_attribute");
    }
}

TEST_CASE("warnings do not fail the parse") {
    auto r = parse_body("  task development -> azra, azra\n  channel azra <-> techsolve kind=feedback\n"
                        "  channel techsolve <-> azra kind=feedback\n");
    REQUIRE(r.ok());
    CHECK(r.error_count() == 0);
    CHECK(has_code(r, "duplicate_list_entry"));
    CHECK(has_code(r, "duplicate_channel"));
    CHECK(r.map->channels.size() == 1);
}

TEST_CASE("lexical and structural errors") {
    CHECK(first_error(parse_rmap("map \"t\" {\n  actor a \"open kind=individual\n}\n")).code == "unterminated_string");
    CHECK(first_error(parse_rmap("map \"t\" {\n  actor a \"bad \\q\" kind=individual\n}\n")).code == "invalid_escape");
    CHECK(first_error(parse_rmap("map \"t\" {\n  actor a \"x\" kind=individual\n")).code == "missing_close");
    CHECK(first_error(parse_rmap("actor a \"x\" kind=individual\n")).code == "missing_header");
    CHECK(first_error(parse_rmap("map \"t\" {\n}\nextra\n")).code == "trailing_content");
    CHECK(first_error(parse_rmap("map \"\" {\n}\n")).code == "empty_name");
    CHECK(first_error(parse_rmap("map \"t\" {\n  task development @ x\n}\n")).code == "unexpected_character");
    CHECK(first_error(parse_rmap("map \"t\xff\" {\n}\n")).code == "invalid_utf8");
}

TEST_CASE("parsing is total: every failure carries a valid span") {
    const std::vector<std::string> inputs{
        "", "{", "}", "map", "map \"x\"", "map x {", "\"", "map \"x\" {\n task\n}\n", "map \"x\" {\n task development\n}\n",
        "map \"x\" {\n task development ->\n}\n", "map \"x\" {\n channel a <->\n}\n", "map \"x\" {\n actor\n}\n",
        "map \"x\" {\n actor a\n}\n", "map \"x\" {\n actor a \"b\" kind\n}\n", "map \"x\" {\n actor a \"b\" kind=\n}\n",
        "\xef\xbb\xbfmap \"x\" {\n}\n extra", "map \"x\" {\n}\n}\n", "map \"x\" {\n map \"y\" {\n}\n}\n"};
    for (const auto& in : inputs) {
        CAPTURE(in);
        auto r = parse_rmap(in);
        if (r.ok()) continue;
        REQUIRE(r.error_count() >= 1);
        for (const auto& d : r.diagnostics) {
            CHECK(d.span.line >= 1);
            CHECK(d.span.column >= 1);
            CHECK(d.span.length >= 1);
            CHECK(is_known_diagnostic_code(d.code));
            CHECK_FALSE(d.message.empty());
        }
    }
}

TEST_CASE("CRLF, BOM, comments") {
    auto r = parse_rmap("\xef\xbb\xbf# leading comment\r\nmap \"t\" { # trailing\r\n  actor a \"A # not a comment\" kind=group\r\n}\r\n");
    REQUIRE(r.ok());
    CHECK(r.map->actors[0].display_name == "A # not a comment");
}

TEST_CASE("string escapes and notes") {
    auto r = parse_rmap("map \"q \\\"x\\\" \\\\ y\" {\n  actor a \"A\" kind=group notes=\"l1\\nl2\\tt\"\n}\n");
    REQUIRE(r.ok());
    CHECK(r.map->name == "q \"x\" \\ y");
    CHECK(r.map->actors[0].notes == std::string("l1\nl2\tt"));
}

TEST_CASE("emit_rmap is canonical") {
    SUBCASE("empty map") { CHECK(emit_rmap(new_map("x")) == "map \"x\" {\n}\n"); }
    SUBCASE("channels are normalised and sorted") {
        auto m = new_map("x");
        m = add_actor(m, Actor{"b", "B", ActorKind::group, {}});
        m = add_actor(m, Actor{"a", "A", ActorKind::group, {}});
        m = add_channel(m, Channel(ChannelEndpoint::actor("b"), ChannelEndpoint::actor("a"), ChannelKind::feedback));
        const auto text = emit_rmap(m);
        CHECK(text.find("  channel a <-> b kind=feedback\n") != std::string::npos);
        CHECK(text.find("actor b") < text.find("actor a"));  // declaration order kept
    }
    SUBCASE("fixture round-trip and idempotence") {
        const auto m = testing_support::load_fixture("figure2.rmap");
        const auto text = emit_rmap(m);
        auto again = parse_rmap(text);
        REQUIRE(again.ok());
        CHECK(*again.map == m);
        CHECK(emit_rmap(*again.map) == text);
    }
}

TEST_CASE("format_diagnostic") {
    auto r = parse_body("  task developmnt -> azra\n");
    const auto line = format_diagnostic(first_error(r), "f.rmap");
    CHECK(line.rfind("f.rmap:4:8: error: ", 0) == 0);
    CHECK(line.find("[unknown_task_area]") != std::string::npos);
}

TEST_CASE("diagnostic catalog is closed and documented") {
    std::set<std::string_view> codes;
    for (const auto& info : diagnostic_catalog()) {
        CHECK(codes.insert(info.code).second);
        CHECK_FALSE(info.summary.empty());
    }
    CHECK(is_known_diagnostic_code("syntax"));
    CHECK_FALSE(is_known_diagnostic_code("made_up"));
}

}  // TEST_SUITE
