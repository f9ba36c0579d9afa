#include "respmap/catalog.hpp"

#include <array>
#include <sstream>
#include <type_traits>
#include <variant>

namespace respmap {

namespace {

template <std::size_t N>
using Texts = std::array<std::string_view, N>;

struct LocalePair {
    std::string_view en;
    std::string_view de;
    std::string_view operator()(Locale l) const { return l == Locale::en ? en : de; }
};

// Task areas -----------------------------------------------------------------

constexpr std::array<LocalePair, kTaskAreaCount> kAreaLabel{{
    {"fundamental decision", "Grundsatzentscheidung"},
    {"implementation", "Implementierung"},
    {"development", "Entwicklung"},
    {"practical use", "Anwendung"},
    {"system security", "Systemsicherheit"},
    {"data management", "Datenverwaltung"},
    {"evaluation", "Evaluierung"},
}};

// "who <clause>" for section 1.
constexpr std::array<LocalePair, kTaskAreaCount> kAreaWhoClause{{
    {"decides whether the system is introduced or kept in operation",
     "über die Einführung oder den (Weiter-)Betrieb des Algorithmensystems entscheidet"},
    {"implements the system", "das Algorithmensystem implementiert"},
    {"develops the system", "das Algorithmensystem entwickelt"},
    {"uses the system in practice", "das Algorithmensystem anwendet"},
    {"is in charge of system security", "für die Sicherheit des Algorithmensystems zuständig ist"},
    {"manages the data", "für die Datenverwaltung zuständig ist"},
    {"evaluates the system", "das Algorithmensystem evaluiert"},
}};

// Object of "tasked with ..." / "zuständig für ...".
constexpr std::array<LocalePair, kTaskAreaCount> kAreaObject{{
    {"the fundamental decision on the system", "die Grundsatzentscheidung über das Algorithmensystem"},
    {"its implementation", "die Implementierung des Algorithmensystems"},
    {"its development", "die Entwicklung des Algorithmensystems"},
    {"its practical use", "die Anwendung des Algorithmensystems"},
    {"the security of the system", "die Sicherheit des Algorithmensystems"},
    {"data management", "die Datenverwaltung"},
    {"evaluation", "die Evaluierung"},
}};

// Dative form for "betraut mit ...".
constexpr std::array<std::string_view, kTaskAreaCount> kAreaDativeDe{
    "der Grundsatzentscheidung", "der Implementierung", "der Entwicklung", "der Anwendung",
    "der Systemsicherheit",      "der Datenverwaltung", "der Evaluierung",
};

// Issues -----------------------------------------------------------------------

constexpr std::array<LocalePair, kIssueCount> kIssueLabel{{
    {"targets not met", "Erfüllung der Zielvorgaben"},
    {"improper integration", "Einbindung in Prozesse und Strukturen"},
    {"data protection complaints", "datenschutzrechtliche Beschwerden"},
    {"security and integrity breaches", "Sicherheits- und Integritätsverletzungen"},
    {"incorrect use", "fehlerhafte Anwendung"},
}};

// Object of "responsible for ..." / "verantwortlich für ...".
constexpr std::array<LocalePair, kIssueCount> kIssueObject{{
    {"the system not meeting its targets", "die Erfüllung der Zielvorgaben"},
    {"improper integration into the organisation's processes and structure",
     "die Einbindung in die Prozesse und Strukturen der Organisation"},
    {"data protection complaints", "Probleme mit datenschutzrechtlichen Beschwerden"},
    {"security and integrity breaches", "Sicherheits- und Integritätsverletzungen"},
    {"incorrect use of the system", "die fehlerhafte Anwendung des Systems"},
}};

// Authorities ------------------------------------------------------------------

constexpr std::array<LocalePair, kAuthorityCount> kAuthorityLabel{{
    {"halting the system", "Stoppen des Systems"},
    {"changing implementation and use", "Änderung von Implementierung und Anwendung"},
    {"correcting database entries", "Korrektur von Datenbankeinträgen"},
    {"instituting security measures", "Veranlassen von Sicherheitsmaßnahmen"},
}};

// Sections -----------------------------------------------------------------------

constexpr std::array<LocalePair, kSectionCount> kSectionTitle{{
    {"Gaps in task allocation", "Lücken in der Aufgabenverteilung"},
    {"Lack of independent evaluation", "Fehlende Unabhängigkeit der Evaluierung"},
    {"Responsible for tasks not assigned to them",
     "Jemand ist für Aufgaben verantwortlich, die nicht ihr/ihm zugeteilt sind"},
    {"Gaps in responsibility", "Lücken in der Verantwortung"},
    {"Responsibility without matching authority", "Verantwortung ohne entsprechende Befugnisse"},
    {"Missing communication and complaint channels", "Fehlende Kommunikations- und Beschwerdekanäle"},
}};

// Questionnaire ------------------------------------------------------------------

constexpr std::array<LocalePair, kBlockCount> kBlockTitle{{
    {"Block 1: People and groups", "Block 1: Beteiligte Personen und Gruppen"},
    {"Block 2: Tasks", "Block 2: Aufgaben"},
    {"Block 3: Responsibilities", "Block 3: Verantwortung"},
    {"Block 4: Access and authority", "Block 4: Zugriff und Befugnisse"},
    {"Block 5: Communication channels", "Block 5: Kommunikationskanäle"},
}};

constexpr std::array<LocalePair, kBlockCount> kBlockPrompt{{
    {"Name every individual and group involved with the decision-support system. In the "
     "following blocks, \"nobody\" is always available as an answer.",
     "Nennen Sie alle Personen und Gruppen, die mit dem Algorithmensystem befasst sind. In den "
     "folgenden Blöcken steht zusätzlich immer die Antwort \"niemand\" zur Verfügung."},
    {"For each area, name the people or groups who hold the decision-making power.",
     "Geben Sie hier bitte jeweils die Personen oder Gruppen an, die für den jeweiligen Bereich "
     "die Entscheidungsbefugnis haben."},
    {"Name who has to solve the problem and bear the consequences in each case.",
     "Geben Sie an, wer im jeweiligen Fall Probleme lösen und die Konsequenzen tragen muss."},
    {"Name who holds which powers over the system.",
     "Geben Sie an, wer welche Befugnisse in Bezug auf das System hat."},
    {"Name the communication channels and complaint mechanisms between the people and groups "
     "involved.",
     "Geben Sie die Kommunikationskanäle und Beschwerdemechanismen zwischen den beteiligten "
     "Personen und Gruppen an."},
}};

constexpr LocalePair kActorsQuestion{
    "Which individuals and groups are involved with the system?",
    "Welche Personen und Gruppen sind mit dem System befasst?"};

constexpr std::array<LocalePair, kTaskAreaCount> kTaskQuestion{{
    {"Who decides whether the system is introduced or kept in operation?",
     "Wer entscheidet darüber, ob ein Algorithmensystem eingeführt oder (weiter-)betrieben wird?"},
    {"Who implements the system into the organisation's processes and structure?",
     "Wer implementiert das System?"},
    {"Who develops the system?", "Wer entwickelt das System?"},
    {"Who uses the system in practice?", "Wer wendet das System an?"},
    {"Who is in charge of system security?", "Wer ist für die Sicherheit des Systems zuständig?"},
    {"Who manages the data?", "Wer ist für die Datenverwaltung zuständig?"},
    {"Who evaluates the system?", "Wer evaluiert das System?"},
}};

constexpr std::array<LocalePair, kIssueCount> kIssueQuestion{{
    {"Who is responsible if the system does not meet its targets?",
     "Wer ist verantwortlich, wenn das System die Zielvorgaben nicht erfüllt?"},
    {"Who is responsible if the system is not properly integrated into the organisation's "
     "processes and structure?",
     "Wer ist verantwortlich, wenn das System nicht ordnungsgemäß in die Prozesse und Strukturen "
     "der Organisation eingebunden ist?"},
    {"Who is responsible for data protection complaints?",
     "Wer ist für datenschutzrechtliche Beschwerden verantwortlich?"},
    {"Who is responsible for breaches of system security and integrity?",
     "Wer ist für Verletzungen der Sicherheit und Integrität des Systems verantwortlich?"},
    {"Who is responsible if the system is used incorrectly?",
     "Wer ist verantwortlich, wenn das System fehlerhaft angewendet wird?"},
}};

constexpr std::array<LocalePair, kAuthorityCount> kAuthorityQuestion{{
    {"Who may stop the use of the system entirely?",
     "Wer ist befugt, den Einsatz des Systems vollständig zu stoppen?"},
    {"Who can change how the system is implemented and used?",
     "Wer kann Implementierung und Anwendung des Systems ändern?"},
    {"Who can correct and change entries in the database?",
     "Wer kann Einträge in der Datenbank korrigieren und ändern?"},
    {"Who can put security measures in place?", "Wer kann Sicherheitsmaßnahmen veranlassen?"},
}};

constexpr std::array<LocalePair, 2> kChannelQuestions{{
    {"Between which people or groups is there a direct feedback, complaint or escalation channel?",
     "Zwischen welchen Personen oder Gruppen gibt es einen direkten Feedback-, Beschwerde- oder "
     "Eskalationskanal?"},
    {"Through which channel can persons affected by the system's decisions complain, and to whom?",
     "Über welchen Kanal können von den Entscheidungen betroffene Personen sich beschweren, und bei "
     "wem?"},
}};

// Helpers -------------------------------------------------------------------------

std::string name_of(const ActorNames& names, const ActorId& id) {
    for (const auto& [aid, display] : names) {
        if (aid == id) return display;
    }
    return id;
}

std::string join(const std::vector<std::string>& items, std::string_view last_sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += (i + 1 == items.size()) ? std::string(" ") + std::string(last_sep) + " " : ", ";
        out += items[i];
    }
    return out;
}

std::string join_names(const ActorNames& names, const std::vector<ActorId>& ids, Locale l) {
    std::vector<std::string> display;
    for (const auto& id : ids) display.push_back(name_of(names, id));
    return join(display, l == Locale::en ? "and" : "und");
}

std::size_t idx(TaskArea a) { return static_cast<std::size_t>(a); }
std::size_t idx(ResponsibilityIssue i) { return static_cast<std::size_t>(i); }
std::size_t idx(AuthorityKind k) { return static_cast<std::size_t>(k); }

template <typename T>
const T* slot_as(const Subject& s) {
    return s.slot ? std::get_if<T>(&*s.slot) : nullptr;
}

std::string v6_message(const Finding& f, const ActorNames& names, Locale l) {
    if (f.subjects.empty()) {
        return std::string(l == Locale::en
                               ? "There is no complaint channel through which affected persons can reach "
                                 "the organisation."
                               : "Es gibt keinen Beschwerdekanal, über den betroffene Personen die "
                                 "Organisation erreichen können.");
    }
    const Subject& first = f.subjects.front();
    if (const auto* issue = slot_as<ResponsibilityIssue>(first)) {
        std::vector<std::string> groups;
        for (std::size_t i = 1; i < f.subjects.size(); ++i) {
            if (const auto* area = slot_as<TaskArea>(f.subjects[i])) {
                groups.push_back(std::string(kAreaLabel[idx(*area)](l)) + " (" +
                                 join_names(names, f.subjects[i].actors, l) + ")");
            }
        }
        if (l == Locale::en) {
            return "Those responsible for " + std::string(kIssueObject[idx(*issue)].en) + " (" +
                   join_names(names, first.actors, l) + ") have no direct channel to those tasked with " +
                   join(groups, "or") + ".";
        }
        return "Die für " + std::string(kIssueObject[idx(*issue)].de) + " Verantwortlichen (" +
               join_names(names, first.actors, l) +
               ") haben keinen direkten Kommunikationskanal zu den Zuständigen für " + join(groups, "oder") +
               ".";
    }
    const auto* x = slot_as<TaskArea>(first);
    const auto* y = f.subjects.size() > 1 ? slot_as<TaskArea>(f.subjects[1]) : nullptr;
    if (x && y) {
        const std::string xs = std::string(kAreaLabel[idx(*x)](l)) + " (" + join_names(names, first.actors, l) + ")";
        const std::string ys =
            std::string(kAreaLabel[idx(*y)](l)) + " (" + join_names(names, f.subjects[1].actors, l) + ")";
        if (l == Locale::en) return "There is no direct communication channel between " + xs + " and " + ys + ".";
        return "Es fehlt ein direkter Kommunikationskanal zwischen " + xs + " und " + ys + ".";
    }
    return std::string(l == Locale::en ? "A required communication channel is missing."
                                       : "Ein notwendiger Kommunikationskanal fehlt.");
}

}  // namespace

std::string_view to_string(Locale l) { return l == Locale::en ? "en" : "de"; }

std::optional<Locale> parse_locale(std::string_view s) {
    if (s == "en") return Locale::en;
    if (s == "de") return Locale::de;
    return std::nullopt;
}

std::string supported_locales() { return "en, de"; }

ActorNames actor_names_of(const ResponsibilityMap& map) {
    ActorNames out;
    out.reserve(map.actors.size());
    for (const auto& a : map.actors) out.emplace_back(a.id, a.display_name);
    return out;
}

std::string_view slot_label(const Slot& slot, Locale l) {
    return std::visit(
        [l](auto v) -> std::string_view {
            using T = decltype(v);
            if constexpr (std::is_same_v<T, TaskArea>) return kAreaLabel[idx(v)](l);
            else if constexpr (std::is_same_v<T, ResponsibilityIssue>) return kIssueLabel[idx(v)](l);
            else return kAuthorityLabel[idx(v)](l);
        },
        slot);
}

std::string finding_message(const Finding& f, const ActorNames& names, Locale l) {
    const bool en = l == Locale::en;
    const Subject empty;
    const Subject& first = f.subjects.empty() ? empty : f.subjects.front();
    switch (f.code) {
        case FindingCode::V1_TASK_GAP: {
            const auto* area = slot_as<TaskArea>(first);
            if (!area) break;
            return en ? "It should be clarified as soon as possible who " +
                            std::string(kAreaWhoClause[idx(*area)].en) + "."
                      : "Es ist möglichst bald zu klären, wer " + std::string(kAreaWhoClause[idx(*area)].de) + ".";
        }
        case FindingCode::V2_EVAL_NOT_INDEPENDENT: {
            const auto* area = slot_as<TaskArea>(first);
            if (!area) break;
            const std::string who = join_names(names, first.actors, l);
            return en ? "Since the same person or group (" + who + ") is in charge of evaluation and of " +
                            std::string(kAreaObject[idx(*area)].en) +
                            ", an independent evaluation cannot be guaranteed."
                      : "Da die gleiche Person oder Gruppe (" + who + ") für die Evaluierung wie für " +
                            std::string(kAreaObject[idx(*area)].de) +
                            " zuständig ist, kann eine unabhängige Evaluierung nicht gewährleistet werden.";
        }
        case FindingCode::V3_RESPONSIBLE_NOT_TASKED: {
            const auto* issue = slot_as<ResponsibilityIssue>(first);
            if (!issue) break;
            std::vector<std::string> areas;
            for (std::size_t i = 1; i < f.subjects.size(); ++i) {
                if (const auto* a = slot_as<TaskArea>(f.subjects[i])) {
                    areas.push_back(en ? std::string(kAreaLabel[idx(*a)].en) : std::string(kAreaDativeDe[idx(*a)]));
                }
            }
            const std::string who = join_names(names, first.actors, l);
            return en ? who + " is responsible for " + std::string(kIssueObject[idx(*issue)].en) +
                            " but is not tasked with " + join(areas, "or") + "."
                      : who + " ist für " + std::string(kIssueObject[idx(*issue)].de) +
                            " verantwortlich, ist aber nicht mit " + join(areas, "oder") + " betraut.";
        }
        case FindingCode::V4_RESPONSIBILITY_GAP: {
            const auto* issue = slot_as<ResponsibilityIssue>(first);
            if (!issue) break;
            return en ? "Since nobody is responsible for " + std::string(kIssueObject[idx(*issue)].en) +
                            ", there is potentially a responsibility gap here."
                      : "Da für " + std::string(kIssueObject[idx(*issue)].de) +
                            " niemand zuständig ist, besteht hier potenziell eine Verantwortungslücke.";
        }
        case FindingCode::V4_RESPONSIBILITY_OVERLAP: {
            const auto* issue = slot_as<ResponsibilityIssue>(first);
            if (!issue) break;
            const std::string who = join_names(names, first.actors, l);
            return en ? "Responsibility potentially overlaps, because several parties (" + who +
                            ") are responsible for " + std::string(kIssueObject[idx(*issue)].en) + "."
                      : "Potenziell kommt es zu einer Überschneidung von Verantwortung, weil für " +
                            std::string(kIssueObject[idx(*issue)].de) + " mit " + who +
                            " mehrere verantwortlich sind.";
        }
        case FindingCode::V5_RESPONSIBLE_NO_AUTHORITY: {
            const auto* issue = slot_as<ResponsibilityIssue>(first);
            if (!issue) break;
            std::vector<std::string> options;
            for (std::size_t i = 1; i < f.subjects.size(); ++i) {
                if (const auto* k = slot_as<AuthorityKind>(f.subjects[i])) {
                    options.push_back(std::string(kAuthorityLabel[idx(*k)](l)));
                }
            }
            const std::string who = join_names(names, first.actors, l);
            return en ? who + " is responsible for " + std::string(kIssueObject[idx(*issue)].en) +
                            " but holds none of the authorities needed to act on it (" + join(options, "or") +
                            ")."
                      : who + " ist für " + std::string(kIssueObject[idx(*issue)].de) +
                            " verantwortlich, hat aber keine der dafür nötigen Befugnisse (" +
                            join(options, "oder") + ").";
        }
        case FindingCode::V6_MISSING_CHANNEL: return v6_message(f, names, l);
        case FindingCode::INPUT_INCOMPLETE: {
            if (!first.slot) break;
            const std::string label(slot_label(*first.slot, l));
            const std::string token(slot_name(*first.slot));
            return en ? "The question on " + label + " (" + token + ") has not been answered yet."
                      : "Die Frage zu " + label + " (" + token + ") wurde noch nicht beantwortet.";
        }
    }
    return std::string(to_string(f.code));
}

std::string_view section_label(Locale l) { return l == Locale::en ? "Section" : "Problemkreis"; }

std::string_view section_title(int section, Locale l) {
    return kSectionTitle.at(static_cast<std::size_t>(section - 1))(l);
}

std::string_view no_findings_sentence(Locale l) {
    return l == Locale::en ? "We could not identify any obvious problems of this kind."
                           : "Wir konnten keine offensichtlichen Probleme dieser Art identifizieren.";
}

std::string_view disclaimer(Locale l) {
    return l == Locale::en
               ? "Based on your answers, the following potential problems were identified. The list is a "
                 "prompt to reflect on whether these problems really exist in the concrete case and what "
                 "effects they may have; it makes no claim to completeness."
               : "Auf Basis Ihrer Antworten wurden folgende potenzielle Probleme identifiziert. Diese "
                 "Problemliste ist als Anregung zu verstehen, genauer darüber nachzudenken, ob diese "
                 "Probleme im konkreten Fall wirklich bestehen und welche Auswirkungen sie haben können, "
                 "und erhebt insbesondere keinen Anspruch auf Vollständigkeit.";
}

std::string_view notes_heading(Locale l) {
    return l == Locale::en ? "Incomplete input" : "Unvollständige Angaben";
}

std::string_view report_heading(Locale l) {
    return l == Locale::en ? "Identified problems" : "Auflösung – identifizierte Probleme";
}

std::string_view block_title(int block, Locale l) {
    return kBlockTitle.at(static_cast<std::size_t>(block - 1))(l);
}

std::string_view block_prompt(int block, Locale l) {
    return kBlockPrompt.at(static_cast<std::size_t>(block - 1))(l);
}

std::string_view question_for(const Slot& slot, Locale l) {
    return std::visit(
        [l](auto v) -> std::string_view {
            using T = decltype(v);
            if constexpr (std::is_same_v<T, TaskArea>) return kTaskQuestion[idx(v)](l);
            else if constexpr (std::is_same_v<T, ResponsibilityIssue>) return kIssueQuestion[idx(v)](l);
            else return kAuthorityQuestion[idx(v)](l);
        },
        slot);
}

std::vector<Question> questionnaire(Locale l) {
    std::vector<Question> out;
    out.push_back({1, std::nullopt, std::string(kActorsQuestion(l))});
    for (auto a : kAllTaskAreas) out.push_back({2, Slot{a}, std::string(question_for(a, l))});
    for (auto i : kAllIssues) out.push_back({3, Slot{i}, std::string(question_for(i, l))});
    for (auto k : kAllAuthorities) out.push_back({4, Slot{k}, std::string(question_for(k, l))});
    for (const auto& q : kChannelQuestions) out.push_back({5, std::nullopt, std::string(q(l))});
    return out;
}

std::string render_questions(Locale l) {
    std::ostringstream os;
    const auto questions = questionnaire(l);
    for (int block = 1; block <= kBlockCount; ++block) {
        if (block > 1) os << '\n';
        os << block_title(block, l) << '\n';
        os << "  " << block_prompt(block, l) << '\n';
        for (const auto& q : questions) {
            if (q.block != block) continue;
            os << "  - ";
            if (q.slot) os << '[' << slot_name(*q.slot) << "] ";
            os << q.text << '\n';
        }
    }
    return os.str();
}

}  // namespace respmap
