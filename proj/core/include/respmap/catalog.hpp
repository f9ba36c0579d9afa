#pragma once

// Localised text: finding messages, section headings, and the questionnaire.
// Every FindingCode has an entry in every locale.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "respmap/model.hpp"
#include "respmap/rules.hpp"

namespace respmap {

enum class Locale { en, de };

inline constexpr std::array<Locale, 2> kAllLocales{Locale::en, Locale::de};

std::string_view to_string(Locale l);
std::optional<Locale> parse_locale(std::string_view s);
/// "en, de"
std::string supported_locales();

using ActorNames = std::vector<std::pair<ActorId, std::string>>;

ActorNames actor_names_of(const ResponsibilityMap& map);

std::string finding_message(const Finding& f, const ActorNames& names, Locale locale);

std::string_view section_label(Locale locale);  // "Section" / "Problemkreis"
std::string_view section_title(int section, Locale locale);
std::string_view no_findings_sentence(Locale locale);
std::string_view disclaimer(Locale locale);
std::string_view notes_heading(Locale locale);
std::string_view report_heading(Locale locale);
std::string_view slot_label(const Slot& slot, Locale locale);

// Questionnaire --------------------------------------------------------------

inline constexpr int kBlockCount = 5;

struct Question {
    int block = 1;                // 1..5
    std::optional<Slot> slot;     // blocks 2-4 ask one question per slot
    std::string text;
};

std::string_view block_title(int block, Locale locale);
/// Introductory sentence for a block.
std::string_view block_prompt(int block, Locale locale);
std::vector<Question> questionnaire(Locale locale);
std::string_view question_for(const Slot& slot, Locale locale);

/// Plain-text questionnaire, blocks in order.
std::string render_questions(Locale locale);

}  // namespace respmap
