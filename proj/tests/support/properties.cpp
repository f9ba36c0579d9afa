#include "properties.hpp"

#include <algorithm>
#include <sstream>

#include "generators.hpp"
#include "oracle.hpp"
#include "respmap/format.hpp"
#include "respmap/report.hpp"
#include "respmap/rules.hpp"

namespace properties {

using namespace respmap;

namespace {

void fail(Outcome& o, std::size_t index, const std::string& what) {
    if (o.failures++ == 0) o.first_failure = "case " + std::to_string(index) + ": " + what;
}

std::vector<std::pair<int, FindingIdentity>> engine_findings(const Report& r) {
    std::vector<std::pair<int, FindingIdentity>> out;
    for (const auto& f : r.findings()) out.emplace_back(*f.section, identity_of(f));
    std::sort(out.begin(), out.end());
    return out;
}

std::string describe(const std::vector<std::pair<int, FindingIdentity>>& fs) {
    std::ostringstream os;
    for (const auto& [s, id] : fs) os << ' ' << s << ':' << describe_identity(id);
    return os.str();
}

bool is_gap_in(const Finding& f, const Slot& slot) {
    return (f.code == FindingCode::V1_TASK_GAP || f.code == FindingCode::V4_RESPONSIBILITY_GAP) &&
           !f.subjects.empty() && f.subjects[0].slot == slot;
}

}  // namespace

Outcome oracle_equivalence(std::uint32_t seed, std::size_t maps, std::size_t config_every) {
    gen::Rng rng(seed);
    Outcome o;
    for (std::size_t i = 0; i < maps; ++i, ++o.cases) {
        const auto m = gen::random_map(rng);
        const auto config =
            config_every != 0 && i % config_every == 0 ? gen::random_config(rng) : RuleConfig::defaults();
        const auto report = analyze(m, config);
        const auto expected = oracle::check(m, config);
        const auto actual = engine_findings(report);
        if (actual != expected.findings) {
            fail(o, i, "engine" + describe(actual) + " / oracle" + describe(expected.findings));
            continue;
        }
        std::set<int> notes;
        for (const auto& n : report.notes) notes.insert(static_cast<int>(slot_index(*n.subjects.at(0).slot)));
        if (notes != expected.notes || notes.size() != report.notes.size()) fail(o, i, "notes differ");
    }
    return o;
}

Outcome section_laws(std::uint32_t seed, std::size_t maps) {
    gen::Rng rng(seed);
    Outcome o;
    for (std::size_t i = 0; i < maps; ++i, ++o.cases) {
        const auto m = gen::random_map(rng);
        const auto r = analyze(m);

        std::size_t nobody = 0;
        for (auto a : kAllTaskAreas) nobody += m.at(a).is_nobody() ? 1 : 0;
        if (r.section(1).size() != nobody) {
            fail(o, i, "section 1 has " + std::to_string(r.section(1).size()) + " findings for " +
                           std::to_string(nobody) + " unassigned areas");
            continue;
        }

        const auto& eval = m.at(TaskArea::evaluation).actors();
        for (auto a : kAllTaskAreas) {
            if (a == TaskArea::evaluation) continue;
            const auto& other = m.at(a).actors();
            const bool shared = std::any_of(other.begin(), other.end(), [&](const auto& x) { return eval.count(x); });
            const auto n = std::count_if(r.section(2).begin(), r.section(2).end(),
                                         [&](const Finding& f) { return f.subjects.at(0).slot == Slot{a}; });
            if (n != (shared ? 1 : 0)) {
                fail(o, i, "section 2 mismatch for " + std::string(to_string(a)));
                break;
            }
        }
    }
    return o;
}

Outcome gap_repair(std::uint32_t seed, std::size_t pairs) {
    gen::Rng rng(seed);
    Outcome o;
    for (std::size_t i = 0; i < pairs; ++i, ++o.cases) {
        auto m = gen::random_map(rng);
        if (m.actors.empty()) m = add_actor(m, Actor{"solo", "Solo", ActorKind::individual, {}});
        // Candidate gap slots are the task areas and issues; make sure one is nobody.
        std::vector<Slot> gaps;
        for (std::size_t s = 0; s < kTaskAreaCount + kIssueCount; ++s) {
            if (m.at(slot_at(s)).is_nobody()) gaps.push_back(slot_at(s));
        }
        if (gaps.empty()) {
            const Slot s = slot_at(gen::pick(rng, kTaskAreaCount + kIssueCount));
            m = assign(m, s, Assignment::nobody());
            gaps.push_back(s);
        }
        const Slot slot = gaps[gen::pick(rng, gaps.size())];
        const ActorId who = m.actors[gen::pick(rng, m.actors.size())].id;
        const auto repaired = assign(m, slot, Assignment::assigned({who}));

        const auto before = analyze(m);
        const auto after = analyze(repaired);
        const int section = std::holds_alternative<TaskArea>(slot) ? 1 : 4;
        const auto had = std::count_if(before.section(section).begin(), before.section(section).end(),
                                       [&](const Finding& f) { return is_gap_in(f, slot); });
        if (had != 1) {
            fail(o, i, "no gap finding for " + std::string(slot_name(slot)) + " before the repair");
            continue;
        }
        const auto d = diff(before, after);
        std::size_t resolved_gap = 0;
        std::size_t other = 0;
        for (const auto& f : d.resolved) {
            if (f.section == 1 || f.section == 4) (is_gap_in(f, slot) ? resolved_gap : other) += 1;
        }
        for (const auto& f : d.introduced) {
            if (f.section == 1 || f.section == 4) ++other;
        }
        if (resolved_gap != 1 || other != 0) {
            fail(o, i, "repairing " + std::string(slot_name(slot)) + " changed sections 1/4 unexpectedly");
        }
    }
    return o;
}

Outcome format_round_trips(std::uint32_t seed, std::size_t maps) {
    gen::Rng rng(seed);
    Outcome o;
    for (std::size_t i = 0; i < maps; ++i, ++o.cases) {
        const auto m = gen::random_map(rng);
        const auto rmap = emit_rmap(m);
        const auto a = parse_rmap(rmap);
        if (!a.ok() || *a.map != m) {
            fail(o, i, "rmap round trip failed:\n" + rmap);
            continue;
        }
        if (emit_rmap(*a.map) != rmap) fail(o, i, "rmap emit not idempotent");
        const auto doc = emit_interchange(m);
        const auto b = parse_interchange(doc);
        if (!b.ok() || *b.map != m) {
            fail(o, i, "interchange round trip failed:\n" + doc);
            continue;
        }
        if (emit_interchange(*b.map) != doc) fail(o, i, "interchange emit not idempotent");
    }
    return o;
}

Outcome config_totality(std::uint32_t seed, std::size_t maps) {
    gen::Rng rng(seed);
    Outcome o;
    for (std::size_t i = 0; i < maps; ++i, ++o.cases) {
        const auto m = gen::random_map(rng);
        const auto c = gen::random_config(rng);
        try {
            const auto r = analyze(m, c);
            for (const auto& f : r.findings()) {
                if (f.message.empty()) fail(o, i, "empty message");
            }
        } catch (const std::exception& e) {
            fail(o, i, e.what());
        }
    }
    return o;
}

}  // namespace properties
