// RMAP: the line-oriented text format for responsibility maps.
//
//   map "<name>" {
//     actor <id> "<display name>" kind=<kind> [notes="<text>"]
//     task <area> -> <id>[, <id>...] | nobody
//     responsible <issue> -> <id>[, <id>...] | nobody
//     authority <kind> -> <id>[, <id>...] | nobody
//     channel <endpoint> <-> <endpoint> kind=<feedback|complaint|escalation>
//   }
//
// '#' starts a comment. Keywords and enum tokens are case-insensitive, actor
// ids are case-sensitive. One statement per line.

#include <algorithm>
#include <array>
#include <map>
#include <sstream>

#include "respmap/format.hpp"
#include "text.hpp"

namespace respmap {

namespace {

enum class Tok { word, string, arrow, biarrow, comma, equals, lbrace, rbrace, error };

struct Token {
    Tok kind = Tok::error;
    std::string text;  // word text, or decoded string contents
    SourceSpan span;
};

struct LineLexResult {
    std::vector<Token> tokens;
    std::optional<ParseDiagnostic> error;
};

bool is_word_start(unsigned char c) { return std::isalpha(c) || c == '_'; }
bool is_word_char(unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '.' || c == '-';
}

ParseDiagnostic make_diag(SourceSpan span, std::string code, std::string message,
                          Severity sev = Severity::error) {
    return ParseDiagnostic{span, std::move(code), std::move(message), sev, {}};
}

class LineLexer {
public:
    LineLexer(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

    LineLexResult run() {
        LineLexResult out;
        while (pos_ < line_.size()) {
            const auto c = static_cast<unsigned char>(line_[pos_]);
            if (c == ' ' || c == '\t') {
                ++pos_;
                continue;
            }
            if (c == '#') break;
            const std::size_t start = pos_;
            if (is_word_start(c)) {
                while (pos_ < line_.size() && is_word_char(static_cast<unsigned char>(line_[pos_]))) {
                    if (line_[pos_] == '-' && pos_ + 1 < line_.size() && line_[pos_ + 1] == '>') break;
                    ++pos_;
                }
                out.tokens.push_back({Tok::word, std::string(line_.substr(start, pos_ - start)),
                                      span(start, pos_)});
            } else if (c == '"') {
                auto tok = lex_string();
                if (!tok) {
                    out.error = error_;
                    return out;
                }
                out.tokens.push_back(std::move(*tok));
            } else if (line_.substr(pos_, 3) == "<->") {
                pos_ += 3;
                out.tokens.push_back({Tok::biarrow, "<->", span(start, pos_)});
            } else if (line_.substr(pos_, 2) == "->") {
                pos_ += 2;
                out.tokens.push_back({Tok::arrow, "->", span(start, pos_)});
            } else if (c == ',' || c == '=' || c == '{' || c == '}') {
                ++pos_;
                const Tok k = c == ',' ? Tok::comma : c == '=' ? Tok::equals : c == '{' ? Tok::lbrace : Tok::rbrace;
                out.tokens.push_back({k, std::string(1, static_cast<char>(c)), span(start, pos_)});
            } else {
                std::size_t end = pos_ + 1;
                while (end < line_.size() && (static_cast<unsigned char>(line_[end]) & 0xC0) == 0x80) ++end;
                out.error = make_diag(span(start, end), "unexpected_character",
                                      "unexpected character '" +
                                          std::string(line_.substr(start, end - start)) + "'");
                return out;
            }
        }
        return out;
    }

private:
    SourceSpan span(std::size_t begin, std::size_t end) const {
        const std::size_t col = text::codepoint_count(line_.substr(0, begin)) + 1;
        const std::size_t len = std::max<std::size_t>(1, text::codepoint_count(line_.substr(begin, end - begin)));
        return {line_no_, col, len};
    }

    std::optional<Token> lex_string() {
        const std::size_t start = pos_;
        ++pos_;  // opening quote
        std::string value;
        while (pos_ < line_.size()) {
            const char ch = line_[pos_];
            if (ch == '"') {
                ++pos_;
                return Token{Tok::string, std::move(value), span(start, pos_)};
            }
            if (ch == '\\') {
                if (pos_ + 1 >= line_.size()) break;
                const char esc = line_[pos_ + 1];
                switch (esc) {
                    case '"': value += '"'; break;
                    case '\\': value += '\\'; break;
                    case 'n': value += '\n'; break;
                    case 't': value += '\t'; break;
                    case 'r': value += '\r'; break;
                    default:
                        error_ = make_diag(span(pos_, pos_ + 2), "invalid_escape",
                                           std::string("unknown escape sequence '\\") + esc + "'");
                        return std::nullopt;
                }
                pos_ += 2;
                continue;
            }
            if (text::has_control(std::string_view(&line_[pos_], 1))) {
                error_ = make_diag(span(pos_, pos_ + 1), "control_character",
                                   "control character inside string literal");
                return std::nullopt;
            }
            value += ch;
            ++pos_;
        }
        error_ = make_diag(span(start, line_.size()), "unterminated_string",
                           "string literal is not terminated on this line");
        return std::nullopt;
    }

    std::string_view line_;
    std::size_t line_no_;
    std::size_t pos_ = 0;
    ParseDiagnostic error_;
};

struct PendingRef {
    std::string id;
    SourceSpan span;
};

/// Thrown to abandon the current line after a diagnostic has been recorded.
struct LineAbort {};

class RmapParser {
public:
    explicit RmapParser(std::string_view source) : source_(source) {}

    ParseResult run() {
        if (source_.substr(0, 3) == "\xEF\xBB\xBF") source_.remove_prefix(3);

        if (auto bad = text::find_invalid_utf8(source_)) {
            std::size_t line = 1 + static_cast<std::size_t>(std::count(source_.begin(), source_.begin() + static_cast<std::ptrdiff_t>(*bad), '\n'));
            const auto line_start = source_.rfind('\n', *bad == 0 ? 0 : *bad - 1);
            const std::size_t from = (line_start == std::string_view::npos || *bad == 0) ? 0 : line_start + 1;
            const std::size_t col = 1 + text::codepoint_count(source_.substr(from, *bad - from));
            diags_.push_back(make_diag({line, col, 1}, "invalid_utf8", "input is not valid UTF-8"));
            return finish();
        }

        std::size_t line_no = 0;
        std::size_t begin = 0;
        while (begin <= source_.size()) {
            auto nl = source_.find('\n', begin);
            std::string_view line = source_.substr(begin, nl == std::string_view::npos ? std::string_view::npos : nl - begin);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            ++line_no;
            last_line_ = line_no;
            last_line_len_ = text::codepoint_count(line);
            process_line(line, line_no);
            if (nl == std::string_view::npos) break;
            begin = nl + 1;
        }

        if (!seen_header_) {
            diags_.push_back(make_diag({1, 1, 1}, "missing_header",
                                       "expected 'map \"<name>\" {' before any statement"));
        } else if (!closed_ && !header_broken_) {
            diags_.push_back(make_diag({last_line_, last_line_len_ + 1, 1}, "missing_close",
                                       "missing closing '}' for map block"));
        }
        resolve_references();
        return finish();
    }

private:
    void process_line(std::string_view line, std::size_t line_no) {
        LineLexer lexer(line, line_no);
        auto lexed = lexer.run();
        if (lexed.error) {
            diags_.push_back(*lexed.error);
            return;
        }
        if (lexed.tokens.empty()) return;
        toks_ = std::move(lexed.tokens);
        idx_ = 0;
        line_no_ = line_no;
        line_len_ = text::codepoint_count(line);
        try {
            statement();
        } catch (const LineAbort&) {
        }
    }

    // -- token helpers -----------------------------------------------------

    bool at_end() const { return idx_ >= toks_.size(); }
    const Token& peek() const { return toks_[idx_]; }

    SourceSpan eol_span() const { return {line_no_, line_len_ + 1, 1}; }

    [[noreturn]] void fail(SourceSpan span, std::string code, std::string message) {
        diags_.push_back(make_diag(span, std::move(code), std::move(message)));
        throw LineAbort{};
    }

    const Token& expect(Tok kind, std::string_view what) {
        if (at_end()) fail(eol_span(), "syntax", "expected " + std::string(what) + " at end of line");
        const Token& t = toks_[idx_];
        if (t.kind != kind) {
            fail(t.span, "syntax", "expected " + std::string(what) + ", found '" + t.text + "'");
        }
        ++idx_;
        return t;
    }

    const Token& expect_word(std::string_view what) { return expect(Tok::word, what); }

    void expect_end() {
        if (!at_end()) {
            const Token& t = peek();
            fail(t.span, "syntax", "unexpected '" + t.text + "' at end of statement");
        }
    }

    bool is_keyword(const Token& t, std::string_view kw) const {
        return t.kind == Tok::word && text::iequals(t.text, kw);
    }

    // -- statements --------------------------------------------------------

    void statement() {
        const Token& first = peek();
        if (closed_) {
            fail(first.span, "trailing_content", "content after the closing '}' of the map block");
        }
        if (!seen_header_) {
            header();
            return;
        }
        if (first.kind == Tok::rbrace) {
            ++idx_;
            expect_end();
            closed_ = true;
            return;
        }
        if (first.kind != Tok::word) {
            fail(first.span, "syntax", "expected a statement keyword, found '" + first.text + "'");
        }
        const std::string kw = text::to_lower_ascii(first.text);
        ++idx_;
        if (kw == "actor") actor_stmt();
        else if (kw == "task") slot_stmt(first, SlotFamily::task);
        else if (kw == "responsible") slot_stmt(first, SlotFamily::issue);
        else if (kw == "authority") slot_stmt(first, SlotFamily::authority);
        else if (kw == "channel") channel_stmt();
        else if (kw == "map") fail(first.span, "syntax", "nested 'map' block is not allowed");
        else {
            fail(first.span, "unknown_keyword",
                 "unknown keyword '" + first.text +
                     "'; expected one of: actor, task, responsible, authority, channel");
        }
    }

    void header() {
        const Token& first = peek();
        if (!is_keyword(first, "map")) {
            // Record once, then keep parsing the remaining lines as statements.
            seen_header_ = true;
            header_broken_ = true;
            diags_.push_back(make_diag(first.span, "missing_header",
                                       "expected 'map \"<name>\" {' before any statement"));
            statement();
            return;
        }
        seen_header_ = true;
        header_broken_ = true;
        ++idx_;
        const Token& name = expect(Tok::string, "quoted map name");
        if (name.text.empty()) fail(name.span, "empty_name", "map name must not be empty");
        if (text::has_control(name.text)) {
            fail(name.span, "control_character", "map name contains control characters");
        }
        expect(Tok::lbrace, "'{'");
        expect_end();
        map_.name = name.text;
        header_broken_ = false;
    }

    // actor <id> "<display>" kind=<kind> [notes="..."]
    void actor_stmt() {
        const Token& id = expect_word("actor id");
        if (!is_valid_actor_id(id.text)) {
            fail(id.span, "invalid_actor_id",
                 is_reserved_word(id.text) ? "'" + id.text + "' is reserved and cannot name an actor"
                                           : "invalid actor id '" + id.text + "'");
        }
        const Token& display = expect(Tok::string, "quoted display name");
        if (display.text.empty()) {
            fail(display.span, "empty_display_name", "display name must not be empty");
        }
        if (text::has_control(display.text)) {
            fail(display.span, "control_character", "display name contains control characters");
        }
        Actor actor{id.text, display.text, ActorKind::individual, std::nullopt};
        bool have_kind = false;
        while (!at_end()) {
            const Token& key = expect_word("attribute");
            const std::string k = text::to_lower_ascii(key.text);
            expect(Tok::equals, "'='");
            if (k == "kind") {
                if (have_kind) fail(key.span, "duplicate_attribute", "attribute 'kind' given twice");
                const Token& v = expect_word("actor kind");
                auto parsed = parse_actor_kind(v.text);
                if (!parsed) {
                    fail(v.span, "unknown_actor_kind",
                         "unknown actor kind '" + v.text + "'; expected one of: " + legal_values<ActorKind>());
                }
                actor.kind = *parsed;
                have_kind = true;
            } else if (k == "notes") {
                if (actor.notes) fail(key.span, "duplicate_attribute", "attribute 'notes' given twice");
                const Token& v = expect(Tok::string, "quoted notes");
                actor.notes = v.text;
            } else {
                fail(key.span, "unknown_attribute",
                     "unknown actor attribute '" + key.text + "'; expected kind or notes");
            }
        }
        if (!have_kind) fail(eol_span(), "missing_attribute", "actor declaration needs kind=<kind>");

        if (auto it = actor_lines_.find(actor.id); it != actor_lines_.end()) {
            fail(id.span, "duplicate_actor",
                 "actor '" + actor.id + "' already declared on line " + std::to_string(it->second));
        }
        actor_lines_.emplace(actor.id, line_no_);
        map_.actors.push_back(std::move(actor));
    }

    enum class SlotFamily { task, issue, authority };

    void slot_stmt(const Token& keyword, SlotFamily family) {
        const Token& name = expect_word(family == SlotFamily::task    ? "task area"
                                        : family == SlotFamily::issue ? "responsibility issue"
                                                                      : "authority kind");
        std::optional<Slot> slot;
        switch (family) {
            case SlotFamily::task:
                if (auto a = parse_task_area(name.text)) slot = *a;
                else fail(name.span, "unknown_task_area",
                          "unknown task area '" + name.text + "'; expected one of: " + legal_values<TaskArea>());
                break;
            case SlotFamily::issue:
                if (auto i = parse_issue(name.text)) slot = *i;
                else fail(name.span, "unknown_issue",
                          "unknown responsibility issue '" + name.text +
                              "'; expected one of: " + legal_values<ResponsibilityIssue>());
                break;
            case SlotFamily::authority:
                if (auto k = parse_authority(name.text)) slot = *k;
                else fail(name.span, "unknown_authority",
                          "unknown authority kind '" + name.text +
                              "'; expected one of: " + legal_values<AuthorityKind>());
                break;
        }
        expect(Tok::arrow, "'->'");

        std::vector<const Token*> entries;
        entries.push_back(&expect_word("actor id or 'nobody'"));
        while (!at_end()) {
            expect(Tok::comma, "','");
            entries.push_back(&expect_word("actor id"));
        }

        Assignment assignment;
        const bool any_nobody = std::any_of(entries.begin(), entries.end(),
                                            [&](const Token* t) { return is_keyword(*t, kNobody); });
        if (any_nobody) {
            if (entries.size() != 1) {
                auto it = std::find_if(entries.begin(), entries.end(),
                                       [&](const Token* t) { return is_keyword(*t, kNobody); });
                fail((*it)->span, "nobody_mixed", "'nobody' cannot be combined with actor ids");
            }
            assignment = Assignment::nobody();
        } else {
            ActorSet ids;
            std::vector<PendingRef> refs;
            for (const Token* t : entries) {
                if (is_keyword(*t, kAffectedPersons)) {
                    fail(t->span, "invalid_actor_id", "'affected_persons' is only valid as a channel endpoint");
                }
                if (!ids.insert(t->text).second) {
                    diags_.push_back(make_diag(t->span, "duplicate_list_entry",
                                               "actor '" + t->text + "' listed twice", Severity::warning));
                    continue;
                }
                refs.push_back({t->text, t->span});
            }
            assignment = Assignment::assigned(std::move(ids));
            for (auto& r : refs) pending_.push_back(std::move(r));
        }

        const std::size_t index = slot_index(*slot);
        if (slot_lines_[index] != 0) {
            fail(name.span, "duplicate_slot",
                 "'" + std::string(keyword.text) + " " + std::string(slot_name(*slot)) +
                     "' already answered on line " + std::to_string(slot_lines_[index]));
        }
        slot_lines_[index] = line_no_;
        map_.at(*slot) = std::move(assignment);
    }

    ChannelEndpoint endpoint(const Token& t) {
        if (is_keyword(t, kAffectedPersons)) return ChannelEndpoint::affected_persons();
        if (!is_valid_actor_id(t.text)) {
            fail(t.span, "invalid_actor_id", "invalid channel endpoint '" + t.text + "'");
        }
        pending_.push_back({t.text, t.span});
        return ChannelEndpoint::actor(t.text);
    }

    // channel <endpoint> <-> <endpoint> kind=<kind>
    void channel_stmt() {
        const Token& lhs = expect_word("channel endpoint");
        expect(Tok::biarrow, "'<->'");
        const Token& rhs = expect_word("channel endpoint");
        const Token& key = expect_word("kind=<channel kind>");
        if (!text::iequals(key.text, "kind")) {
            fail(key.span, "unknown_attribute", "unknown channel attribute '" + key.text + "'; expected kind");
        }
        expect(Tok::equals, "'='");
        const Token& v = expect_word("channel kind");
        auto kind = parse_channel_kind(v.text);
        if (!kind) {
            fail(v.span, "unknown_channel_kind",
                 "unknown channel kind '" + v.text + "'; expected one of: " + legal_values<ChannelKind>());
        }
        expect_end();

        const std::size_t mark = pending_.size();
        auto a = endpoint(lhs);
        auto b = endpoint(rhs);
        if (a == b) {
            pending_.resize(mark);
            fail(rhs.span, "self_channel", "channel connects '" + a.token() + "' with itself");
        }
        Channel ch(std::move(a), std::move(b), *kind);
        if (!map_.channels.insert(ch).second) {
            diags_.push_back(make_diag(lhs.span, "duplicate_channel",
                                       "channel " + ch.a().token() + " <-> " + ch.b().token() +
                                           " kind=" + std::string(to_string(ch.kind())) +
                                           " is declared more than once",
                                       Severity::warning));
        }
    }

    void resolve_references() {
        for (const auto& ref : pending_) {
            if (!actor_lines_.count(ref.id)) {
                diags_.push_back(make_diag(ref.span, "undeclared_actor",
                                           "undeclared actor '" + ref.id + "'"));
            }
        }
    }

    ParseResult finish() {
        std::stable_sort(diags_.begin(), diags_.end(), [](const auto& l, const auto& r) {
            return std::tie(l.span.line, l.span.column) < std::tie(r.span.line, r.span.column);
        });
        ParseResult out;
        out.diagnostics = std::move(diags_);
        const bool has_error = std::any_of(out.diagnostics.begin(), out.diagnostics.end(),
                                           [](const auto& d) { return d.is_error(); });
        if (!has_error) out.map = std::move(map_);
        return out;
    }

    std::string_view source_;
    std::vector<ParseDiagnostic> diags_;
    ResponsibilityMap map_;
    std::vector<Token> toks_;
    std::size_t idx_ = 0;
    std::size_t line_no_ = 0;
    std::size_t line_len_ = 0;
    std::size_t last_line_ = 1;
    std::size_t last_line_len_ = 0;
    bool seen_header_ = false;
    bool header_broken_ = false;
    bool closed_ = false;
    std::map<std::string, std::size_t> actor_lines_;
    std::array<std::size_t, kSlotCount> slot_lines_{};
    std::vector<PendingRef> pending_;
};

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

}  // namespace

std::string_view to_string(Severity s) { return s == Severity::error ? "error" : "warning"; }

const std::vector<DiagnosticCodeInfo>& diagnostic_catalog() {
    static const std::vector<DiagnosticCodeInfo> catalog{
        {"syntax", Severity::error, "statement does not match the grammar"},
        {"unexpected_character", Severity::error, "character outside the token alphabet"},
        {"unterminated_string", Severity::error, "string literal not closed on its line"},
        {"invalid_escape", Severity::error, "unknown backslash escape in a string"},
        {"control_character", Severity::error, "control character in a name or string"},
        {"invalid_utf8", Severity::error, "input is not valid UTF-8"},
        {"missing_header", Severity::error, "no map header before the first statement"},
        {"missing_close", Severity::error, "map block not closed"},
        {"trailing_content", Severity::error, "statements after the closing brace"},
        {"empty_name", Severity::error, "empty map name"},
        {"unknown_keyword", Severity::error, "statement keyword not recognised"},
        {"unknown_attribute", Severity::error, "attribute not recognised"},
        {"duplicate_attribute", Severity::error, "attribute given twice"},
        {"missing_attribute", Severity::error, "required attribute absent"},
        {"unknown_actor_kind", Severity::error, "actor kind not in the closed set"},
        {"unknown_task_area", Severity::error, "task area not in the closed set"},
        {"unknown_issue", Severity::error, "responsibility issue not in the closed set"},
        {"unknown_authority", Severity::error, "authority kind not in the closed set"},
        {"unknown_channel_kind", Severity::error, "channel kind not in the closed set"},
        {"invalid_actor_id", Severity::error, "actor id is not a valid token or is reserved"},
        {"empty_display_name", Severity::error, "actor display name is empty"},
        {"duplicate_actor", Severity::error, "actor id declared twice"},
        {"undeclared_actor", Severity::error, "reference to an actor that is not declared"},
        {"duplicate_slot", Severity::error, "slot answered more than once"},
        {"nobody_mixed", Severity::error, "'nobody' combined with actor ids"},
        {"self_channel", Severity::error, "channel endpoints are identical"},
        {"duplicate_list_entry", Severity::warning, "actor listed twice in one answer"},
        {"duplicate_channel", Severity::warning, "channel declared more than once"},
        {"invalid_document", Severity::error, "interchange document is not well-formed JSON"},
        {"unknown_field", Severity::error, "key not part of the interchange schema"},
        {"missing_field", Severity::error, "required key absent"},
        {"wrong_type", Severity::error, "value has the wrong JSON type"},
        {"unsupported_version", Severity::error, "format_version is not supported"},
        {"invalid_state", Severity::error, "slot state inconsistent with its actor list"},
        {"unknown_value", Severity::error, "policy value not in its closed set"},
        {"empty_target_set", Severity::error, "policy correspondence target set is empty"},
    };
    return catalog;
}

bool is_known_diagnostic_code(std::string_view code) {
    const auto& c = diagnostic_catalog();
    return std::any_of(c.begin(), c.end(), [&](const auto& e) { return e.code == code; });
}

std::size_t ParseResult::error_count() const {
    return static_cast<std::size_t>(std::count_if(diagnostics.begin(), diagnostics.end(),
                                                  [](const auto& d) { return d.is_error(); }));
}

std::string format_diagnostic(const ParseDiagnostic& d, std::string_view source_name) {
    std::ostringstream os;
    os << source_name << ':' << d.span.line << ':' << d.span.column << ": " << to_string(d.severity)
       << ": ";
    if (!d.path.empty()) os << d.path << ": ";
    os << d.message << " [" << d.code << ']';
    return os.str();
}

ParseResult parse_rmap(std::string_view source) { return RmapParser(source).run(); }

std::string emit_rmap(const ResponsibilityMap& map) {
    std::ostringstream os;
    os << "map " << quote(map.name) << " {\n";
    bool any = false;
    auto group_break = [&](bool& first_in_group) {
        if (first_in_group && any) os << '\n';
        first_in_group = false;
        any = true;
    };

    bool first = true;
    for (const auto& a : map.actors) {
        group_break(first);
        os << "  actor " << a.id << ' ' << quote(a.display_name) << " kind=" << to_string(a.kind);
        if (a.notes) os << " notes=" << quote(*a.notes);
        os << '\n';
    }

    auto emit_slots = [&](std::string_view keyword, auto const& all) {
        bool first_slot = true;
        for (auto value : all) {
            const Assignment& asg = map.at(value);
            if (asg.is_unanswered()) continue;
            group_break(first_slot);
            os << "  " << keyword << ' ' << to_string(value) << " -> ";
            if (asg.is_nobody()) {
                os << kNobody;
            } else {
                bool sep = false;
                for (const auto& id : asg.actors()) {
                    if (sep) os << ", ";
                    os << id;
                    sep = true;
                }
            }
            os << '\n';
        }
    };
    emit_slots("task", kAllTaskAreas);
    emit_slots("responsible", kAllIssues);
    emit_slots("authority", kAllAuthorities);

    first = true;
    for (const auto& ch : map.channels) {  // std::set order is the canonical order
        group_break(first);
        os << "  channel " << ch.a().token() << " <-> " << ch.b().token()
           << " kind=" << to_string(ch.kind()) << '\n';
    }
    os << "}\n";
    return os.str();
}

}  // namespace respmap
