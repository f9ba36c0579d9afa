#include <doctest.h>

#include <algorithm>
#include <chrono>

#include "helpers.hpp"
#include "oracle.hpp"
#include "respmap/format.hpp"
#include "respmap/rules.hpp"

using namespace respmap;

namespace {

ResponsibilityMap with_actors(std::initializer_list<const char*> ids) {
    auto m = new_map("t");
    for (const char* id : ids) m = add_actor(m, Actor{id, std::string("Name ") + id, ActorKind::individual, {}});
    return m;
}

ResponsibilityMap set(ResponsibilityMap m, const Slot& s, ActorSet actors) {
    return assign(m, s, actors.empty() ? Assignment::nobody() : Assignment::assigned(std::move(actors)));
}

ResponsibilityMap link(ResponsibilityMap m, const char* a, const char* b, ChannelKind k = ChannelKind::feedback) {
    auto ep = [](const char* x) {
        return std::string_view(x) == kAffectedPersons ? ChannelEndpoint::affected_persons() : ChannelEndpoint::actor(x);
    };
    return add_channel(m, Channel(ep(a), ep(b), k));
}

std::vector<FindingCode> codes(const std::vector<Finding>& fs, bool include_notes = false) {
    std::vector<FindingCode> out;
    for (const auto& f : fs) {
        if (include_notes || f.code != FindingCode::INPUT_INCOMPLETE) out.push_back(f.code);
    }
    return out;
}

std::vector<Finding> without_notes(std::vector<Finding> fs) {
    fs.erase(std::remove_if(fs.begin(), fs.end(), [](const Finding& f) { return f.code == FindingCode::INPUT_INCOMPLETE; }),
             fs.end());
    return fs;
}

const Slot& primary(const Finding& f) { return *f.subjects.at(0).slot; }

// Every slot answered so that each check is quiet unless a test disturbs it.
ResponsibilityMap congruent() { return testing_support::load_fixture("congruent.rmap"); }

}  // namespace

TEST_SUITE("rules") {

TEST_CASE("finding codes and sections") {
    CHECK(section_of(FindingCode::V1_TASK_GAP) == 1);
    CHECK(section_of(FindingCode::V2_EVAL_NOT_INDEPENDENT) == 2);
    CHECK(section_of(FindingCode::V3_RESPONSIBLE_NOT_TASKED) == 3);
    CHECK(section_of(FindingCode::V4_RESPONSIBILITY_GAP) == 4);
    CHECK(section_of(FindingCode::V4_RESPONSIBILITY_OVERLAP) == 4);
    CHECK(section_of(FindingCode::V5_RESPONSIBLE_NO_AUTHORITY) == 5);
    CHECK(section_of(FindingCode::V6_MISSING_CHANNEL) == 6);
    CHECK_FALSE(section_of(FindingCode::INPUT_INCOMPLETE));
    for (auto c : kAllFindingCodes) CHECK(parse_finding_code(to_string(c)) == c);
}

TEST_CASE("section 1: task gaps") {
    SUBCASE("fixture") {
        const auto fs = without_notes(check_task_gaps(testing_support::load_fixture("figure2.rmap")));
        REQUIRE(fs.size() == 1);
        CHECK(fs[0].code == FindingCode::V1_TASK_GAP);
        CHECK(primary(fs[0]) == Slot{TaskArea::implementation});
        CHECK(fs[0].severity == FindingSeverity::error);
        CHECK(fs[0].section == 1);
        CHECK_FALSE(fs[0].message.empty());
    }
    SUBCASE("all assigned") { CHECK(without_notes(check_task_gaps(congruent())).empty()); }
    SUBCASE("three nobody, four assigned: one finding per gap in enum order") {
        auto m = congruent();
        m = set(m, TaskArea::evaluation, {});
        m = set(m, TaskArea::development, {});
        m = set(m, TaskArea::fundamental_decision, {});
        const auto fs = check_task_gaps(m);
        REQUIRE(fs.size() == 3);
        CHECK(primary(fs[0]) == Slot{TaskArea::fundamental_decision});
        CHECK(primary(fs[1]) == Slot{TaskArea::development});
        CHECK(primary(fs[2]) == Slot{TaskArea::evaluation});
    }
    SUBCASE("unanswered yields a note, not a gap") {
        auto m = congruent();
        m.at(TaskArea::development) = Assignment::unanswered();
        const auto fs = check_task_gaps(m);
        REQUIRE(fs.size() == 1);
        CHECK(fs[0].code == FindingCode::INPUT_INCOMPLETE);
        CHECK(fs[0].severity == FindingSeverity::info);
        CHECK_FALSE(fs[0].section);
    }
}

TEST_CASE("section 2: evaluation independence") {
    auto m = with_actors({"p", "q", "r"});
    m = set(m, TaskArea::evaluation, {"p", "q"});
    SUBCASE("shared with system security") {
        m = set(m, TaskArea::system_security, {"q", "r"});
        const auto fs = without_notes(check_evaluation_independence(m));
        REQUIRE(fs.size() == 1);
        CHECK(primary(fs[0]) == Slot{TaskArea::system_security});
        CHECK(fs[0].subjects[0].actors == std::vector<ActorId>{"q"});
        CHECK(fs[0].severity == FindingSeverity::warning);
    }
    SUBCASE("shared with data management") {
        m = set(m, TaskArea::data_management, {"p"});
        const auto fs = without_notes(check_evaluation_independence(m));
        REQUIRE(fs.size() == 1);
        CHECK(primary(fs[0]) == Slot{TaskArea::data_management});
    }
    SUBCASE("disjoint") {
        for (auto a : kAllTaskAreas) {
            if (a != TaskArea::evaluation) m = set(m, a, {"r"});
        }
        CHECK(check_evaluation_independence(m).empty());
    }
    SUBCASE("evaluation nobody or unanswered") {
        m = set(m, TaskArea::system_security, {"p"});
        CHECK(without_notes(check_evaluation_independence(set(m, TaskArea::evaluation, {}))).empty());
        m.at(TaskArea::evaluation) = Assignment::unanswered();
        CHECK(codes(check_evaluation_independence(m)).empty());
    }
}

TEST_CASE("section 3: responsible but not tasked") {
    auto m = with_actors({"p", "q"});
    SUBCASE("default table: security breach vs system security") {
        m = set(m, ResponsibilityIssue::security_breach, {"p"});
        m = set(m, TaskArea::system_security, {"q"});
        const auto fs = check_responsible_not_tasked(m, RuleConfig::defaults());
        REQUIRE(fs.size() == 1);
        CHECK(fs[0].code == FindingCode::V3_RESPONSIBLE_NOT_TASKED);
        CHECK(fs[0].subjects[0].slot == Slot{ResponsibilityIssue::security_breach});
        CHECK(fs[0].subjects[0].actors == std::vector<ActorId>{"p"});
        CHECK(fs[0].severity == FindingSeverity::warning);
    }
    SUBCASE("congruent") {
        m = set(m, ResponsibilityIssue::incorrect_use, {"p"});
        m = set(m, TaskArea::practical_use, {"p"});
        CHECK(check_responsible_not_tasked(m, RuleConfig::defaults()).empty());
    }
    SUBCASE("any mapped area suffices") {
        m = set(m, ResponsibilityIssue::targets_not_met, {"p"});
        m = set(m, TaskArea::fundamental_decision, {"q"});
        m = set(m, TaskArea::evaluation, {"p"});
        CHECK(check_responsible_not_tasked(m, RuleConfig::defaults()).empty());
    }
    SUBCASE("unanswered mapped area suppresses the finding with one note") {
        m = set(m, ResponsibilityIssue::targets_not_met, {"p", "q"});
        m = set(m, TaskArea::evaluation, {});
        const auto fs = check_responsible_not_tasked(m, RuleConfig::defaults());
        REQUIRE(fs.size() == 1);
        CHECK(fs[0].code == FindingCode::INPUT_INCOMPLETE);
        CHECK(primary(fs[0]) == Slot{TaskArea::fundamental_decision});
    }
    SUBCASE("fixture") {
        CHECK(without_notes(check_responsible_not_tasked(testing_support::load_fixture("figure2.rmap"),
                                                         RuleConfig::defaults()))
                  .empty());
    }
}

TEST_CASE("section 4: responsibility gaps and overlaps") {
    const auto fixture = testing_support::load_fixture("figure2.rmap");
    const auto fs = without_notes(check_responsibility_gaps_overlaps(fixture));
    REQUIRE(fs.size() == 2);
    CHECK(fs[0].code == FindingCode::V4_RESPONSIBILITY_GAP);
    CHECK(primary(fs[0]) == Slot{ResponsibilityIssue::data_protection_complaints});
    CHECK(fs[0].severity == FindingSeverity::error);
    CHECK(fs[1].code == FindingCode::V4_RESPONSIBILITY_OVERLAP);
    CHECK(primary(fs[1]) == Slot{ResponsibilityIssue::targets_not_met});
    CHECK(fs[1].subjects[0].actors == std::vector<ActorId>{"azra", "deniz"});
    CHECK(fs[1].severity == FindingSeverity::warning);

    SUBCASE("overlap severity follows the config") {
        auto c = RuleConfig::defaults();
        c.overlap_is_warning = false;
        CHECK(without_notes(check_responsibility_gaps_overlaps(fixture, c))[1].severity == FindingSeverity::error);
    }
    SUBCASE("singletons everywhere") { CHECK(without_notes(check_responsibility_gaps_overlaps(congruent())).empty()); }
}

TEST_CASE("section 5: authority") {
    auto m = with_actors({"p", "q"});
    SUBCASE("missing the only acceptable authority") {
        m = set(m, ResponsibilityIssue::incorrect_use, {"p"});
        m = set(m, AuthorityKind::change_implementation_use, {"q"});
        const auto fs = check_authority_mismatch(m, RuleConfig::defaults());
        REQUIRE(fs.size() == 1);
        CHECK(fs[0].code == FindingCode::V5_RESPONSIBLE_NO_AUTHORITY);
        CHECK(fs[0].severity == FindingSeverity::error);
        CHECK(fs[0].subjects.size() == 2);
        CHECK(fs[0].subjects[1].slot == Slot{AuthorityKind::change_implementation_use});
    }
    SUBCASE("any one authority suffices") {
        m = set(m, ResponsibilityIssue::targets_not_met, {"p"});
        m = set(m, AuthorityKind::halt_system, {"p"});
        m = set(m, AuthorityKind::change_implementation_use, {});
        CHECK(check_authority_mismatch(m, RuleConfig::defaults()).empty());
    }
    SUBCASE("exact congruence") {
        m = set(m, ResponsibilityIssue::security_breach, {"p"});
        m = set(m, AuthorityKind::institute_security_measures, {"p"});
        CHECK(check_authority_mismatch(m, RuleConfig::defaults()).empty());
    }
    SUBCASE("unanswered authority suppresses with a note") {
        m = set(m, ResponsibilityIssue::targets_not_met, {"p"});
        m = set(m, AuthorityKind::halt_system, {"q"});
        const auto fs = check_authority_mismatch(m, RuleConfig::defaults());
        REQUIRE(fs.size() == 1);
        CHECK(fs[0].code == FindingCode::INPUT_INCOMPLETE);
        CHECK(primary(fs[0]) == Slot{AuthorityKind::change_implementation_use});
    }
}

TEST_CASE("section 6: channels") {
    auto m = congruent();
    const auto defaults = RuleConfig::defaults();
    CHECK(check_channels(m, defaults).empty());

    SUBCASE("rule a") {
        m.channels.erase(Channel(ChannelEndpoint::actor("clerks"), ChannelEndpoint::actor("vendor"), ChannelKind::feedback));
        const auto fs = check_channels(m, defaults);
        REQUIRE(fs.size() == 1);
        CHECK(fs[0].code == FindingCode::V6_MISSING_CHANNEL);
        CHECK(fs[0].subjects[0].slot == Slot{TaskArea::practical_use});
        CHECK(fs[0].subjects[1].slot == Slot{TaskArea::development});
        CHECK(fs[0].severity == FindingSeverity::warning);
        auto off = defaults;
        off.required_channels.practical_use_development = false;
        CHECK(check_channels(m, off).empty());
    }
    SUBCASE("any channel kind connects") {
        m.channels.erase(Channel(ChannelEndpoint::actor("clerks"), ChannelEndpoint::actor("vendor"), ChannelKind::feedback));
        m = link(m, "vendor", "clerks", ChannelKind::escalation);
        CHECK(check_channels(m, defaults).empty());
    }
    SUBCASE("no transitivity") {
        m.channels.erase(Channel(ChannelEndpoint::actor("clerks"), ChannelEndpoint::actor("vendor"), ChannelKind::feedback));
        m = link(m, "vendor", "it");  // vendor - it - clerks is not direct
        CHECK(check_channels(m, defaults).size() == 1);
    }
    SUBCASE("rule e") {
        m.channels.erase(Channel(ChannelEndpoint::affected_persons(), ChannelEndpoint::actor("clerks"), ChannelKind::complaint));
        auto fs = check_channels(m, defaults);
        REQUIRE(fs.size() == 1);
        CHECK(fs[0].subjects.empty());
        m = link(m, "affected_persons", "clerks", ChannelKind::feedback);  // wrong kind
        CHECK(check_channels(m, defaults).size() == 1);
    }
    SUBCASE("rule d") {
        m = set(m, ResponsibilityIssue::security_breach, {"audit"});
        auto fs = check_channels(m, defaults);
        REQUIRE(fs.size() == 1);
        CHECK(fs[0].subjects[0].slot == Slot{ResponsibilityIssue::security_breach});
        CHECK(fs[0].subjects[1].slot == Slot{TaskArea::system_security});
        m = link(m, "audit", "it", ChannelKind::escalation);
        CHECK(check_channels(m, defaults).empty());
    }
    SUBCASE("unanswered endpoint groups are skipped with notes") {
        m.at(TaskArea::development) = Assignment::unanswered();
        m.channels.clear();
        const auto all = codes(check_channels(m, defaults), true);
        CHECK(std::count(all.begin(), all.end(), FindingCode::INPUT_INCOMPLETE) == 1);
    }
}

TEST_CASE("analyze") {
    SUBCASE("worked-example fixture") {
        const auto start = std::chrono::steady_clock::now();
        const auto r = analyze(testing_support::load_fixture("figure2.rmap"));
        CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(1));
        CHECK(r.section(1).size() == 1);
        CHECK(r.section(2).size() == 2);
        CHECK(primary(r.section(2)[0]) == Slot{TaskArea::system_security});
        CHECK(primary(r.section(2)[1]) == Slot{TaskArea::data_management});
        CHECK(r.section(3).empty());
        CHECK(r.section(4).size() == 2);
        CHECK(r.section(5).empty());
        CHECK(r.section(6).empty());
        CHECK(r.finding_count() == 5);
        REQUIRE(r.notes.size() == 1);
        CHECK(primary(r.notes[0]) == Slot{ResponsibilityIssue::improper_integration});
        CHECK(r.config_fingerprint == config_fingerprint(RuleConfig::defaults()));
    }
    SUBCASE("empty map") {
        const auto r = analyze(new_map("x"));
        CHECK(r.finding_count() == 0);
        CHECK(r.notes.size() == 16);
    }
    SUBCASE("congruent map, confirmed by the oracle") {
        const auto m = congruent();
        const auto r = analyze(m);
        CHECK(r.finding_count() == 0);
        CHECK(r.notes.empty());
        const auto o = oracle::check(m, RuleConfig::defaults());
        CHECK(o.findings.empty());
        CHECK(o.notes.empty());
    }
    SUBCASE("deterministic") {
        const auto m = testing_support::load_fixture("figure2.rmap");
        CHECK(analyze(m) == analyze(m));
    }
    SUBCASE("invalid input") {
        auto m = new_map("x");
        m.tasks[0] = Assignment::assigned({"ghost"});
        CHECK_THROWS_AS(analyze(m), InvalidMapError);
        auto c = RuleConfig::defaults();
        c.issue_area_map[0].clear();
        CHECK_THROWS_AS(analyze(new_map("x"), c), ValidationError);
    }
    SUBCASE("all messages non-empty, subjects resolve") {
        const auto m = testing_support::load_fixture("figure2.rmap");
        const auto r = analyze(m);
        for (const auto& f : r.findings()) {
            CHECK_FALSE(f.message.empty());
            for (const auto& s : f.subjects) {
                for (const auto& id : s.actors) CHECK(m.has_actor(id));
            }
        }
    }
}

TEST_CASE("finding identity ignores messages") {
    Finding a{FindingCode::V1_TASK_GAP, 1, FindingSeverity::error, {Subject{TaskArea::implementation, {}}}, "one"};
    Finding b = a;
    b.message = "two";
    CHECK(identity_of(a) == identity_of(b));
    CHECK(describe_identity(identity_of(a)) == "V1_TASK_GAP(implementation)");
}

}  // TEST_SUITE
