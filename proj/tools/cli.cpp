#include "cli.hpp"

#include <CLI11.hpp>
#include <pthread.h>
#include <signal.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "respmap/catalog.hpp"
#include "respmap/format.hpp"
#include "respmap/report.hpp"
#include "respmap/rules.hpp"
#include "respmap/service.hpp"

namespace respmap::cli {

namespace fs = std::filesystem;

namespace {

// Something went wrong that has already been reported; carries the status.
struct Exit {
    int status;
};

std::string read_text(const std::string& path, std::ostream& err) {
    std::error_code ec;
    if (fs::is_directory(path, ec)) {
        err << "respmap: cannot read " << path << ": is a directory\n";
        throw Exit{kUsage};
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        err << "respmap: cannot read " << path << "\n";
        throw Exit{kUsage};
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        err << "respmap: error while reading " << path << "\n";
        throw Exit{kUsage};
    }
    return ss.str();
}

void print_diagnostics(const std::vector<ParseDiagnostic>& diags, const std::string& source, std::ostream& err) {
    for (const auto& d : diags) err << format_diagnostic(d, source) << '\n';
}

bool is_interchange_path(const std::string& path) { return fs::path(path).extension() == ".json"; }

/// Reads and parses a map file; `.json` files are interchange documents,
/// everything else is RMAP.
ResponsibilityMap load_map(const std::string& path, std::ostream& err) {
    const std::string text = read_text(path, err);
    ParseResult r = is_interchange_path(path) ? parse_interchange(text) : parse_rmap(text);
    print_diagnostics(r.diagnostics, path, err);
    if (!r.ok()) throw Exit{kInvalidInput};
    return std::move(*r.map);
}

RuleConfig load_policy(const std::string& path, std::ostream& err) {
    if (path.empty()) return RuleConfig::defaults();
    PolicyResult r = parse_policy(read_text(path, err));
    print_diagnostics(r.diagnostics, path, err);
    if (!r.ok()) throw Exit{kInvalidInput};
    return std::move(*r.config);
}

Report analyze_or_exit(const ResponsibilityMap& map, const RuleConfig& config, const std::string& path,
                       std::ostream& err) {
    try {
        return analyze(map, config);
    } catch (const InvalidMapError& e) {
        for (const auto& d : e.diagnostics()) {
            if (d.is_error()) err << path << ": error: " << d.message << " [" << d.code << "]\n";
        }
        throw Exit{kInvalidInput};
    } catch (const ValidationError& e) {
        err << "respmap: " << e.what() << '\n';
        throw Exit{kInvalidInput};
    }
}

Locale to_locale(const std::string& s) { return *parse_locale(s); }

FindingSeverity to_severity(const std::string& s) { return *parse_finding_severity(s); }

std::size_t count_at_or_above(const Report& report, FindingSeverity threshold) {
    std::size_t n = 0;
    for (const auto& f : report.findings()) n += f.severity >= threshold ? 1 : 0;
    if (threshold == FindingSeverity::info) n += report.notes.size();
    return n;
}

void write_output(const std::string& path, const std::string& content, std::ostream& out, std::ostream& err) {
    if (path == "-") {
        out << content;
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file || !(file << content) || !file.flush()) {
        err << "respmap: cannot write " << path << "\n";
        throw Exit{kUsage};
    }
}

// -- init template ---------------------------------------------------------------

struct ChannelExample {
    std::string_view caption_en;
    std::string_view caption_de;
    std::string_view line;
};

constexpr std::array<ChannelExample, 5> kChannelExamples{{
    {"Practical use <-> development:", "Anwendung <-> Entwicklung:",
     "channel user_id <-> developer_id kind=feedback"},
    {"Practical use <-> implementation:", "Anwendung <-> Implementierung:",
     "channel user_id <-> implementer_id kind=feedback"},
    {"Evaluation <-> fundamental decision:", "Evaluierung <-> Grundsatzentscheidung:",
     "channel evaluator_id <-> decision_maker_id kind=escalation"},
    {"Those responsible <-> those tasked with the mapped areas:",
     "Verantwortliche <-> Zuständige der zugehörigen Bereiche:",
     "channel responsible_id <-> tasked_id kind=escalation"},
    {"Complaints from affected persons:", "Beschwerden betroffener Personen:",
     "channel affected_persons <-> contact_id kind=complaint"},
}};

std::string_view slot_keyword(const Slot& s) {
    if (std::holds_alternative<TaskArea>(s)) return "task";
    if (std::holds_alternative<ResponsibilityIssue>(s)) return "responsible";
    return "authority";
}

// -- serve -------------------------------------------------------------------------

int serve(const std::string& host, int port, const std::string& session_dir, const std::string& policy_path,
          const std::string& static_dir, std::ostream& err) {
    const RuleConfig policy = load_policy(policy_path, err);
    std::optional<SessionStore> store;
    try {
        store.emplace(session_dir);
    } catch (const Error& e) {
        err << "respmap: " << e.what() << '\n';
        return kUsage;
    }
    for (const auto& w : store->load_warnings()) err << "respmap: skipped session file " << w << '\n';
    if (!static_dir.empty() && !fs::is_directory(static_dir)) {
        err << "respmap: static directory " << static_dir << " does not exist\n";
        return kUsage;
    }

    Service service(*store, policy);
    HttpServer server(service, static_dir.empty() ? std::nullopt : std::optional<fs::path>(static_dir));

    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    sigset_t previous;
    pthread_sigmask(SIG_BLOCK, &signals, &previous);

    if (!server.bind(host, port)) {
        pthread_sigmask(SIG_SETMASK, &previous, nullptr);
        err << "respmap: cannot listen on " << host << ':' << port << '\n';
        return kUsage;
    }
    err << "respmap: serving on http://" << host << ':' << server.port() << " (sessions in " << session_dir
        << ")\n";

    std::atomic<bool> stopping{false};
    std::thread watcher([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        stopping = true;
        server.stop();
    });
    server.run();
    if (!stopping.exchange(true)) pthread_kill(watcher.native_handle(), SIGTERM);
    watcher.join();
    pthread_sigmask(SIG_SETMASK, &previous, nullptr);
    return kOk;
}

}  // namespace

std::string init_template(std::string_view name, Locale locale) {
    // The header line comes from the emitter so the name is quoted exactly as
    // the parser expects.
    const std::string empty = emit_rmap(new_map(std::string(name)));
    const std::string header = empty.substr(0, empty.find('\n'));

    std::ostringstream os;
    if (locale == Locale::en) {
        os << "# Responsibility map template. Uncomment a line and fill in actor ids to\n"
              "# answer a question; write 'nobody' when nobody holds the role. Lines left\n"
              "# commented stay unanswered.\n";
    } else {
        os << "# Vorlage für eine Verantwortungskarte. Zum Beantworten einer Frage die Zeile\n"
              "# einkommentieren und Akteur-IDs eintragen; 'nobody' steht für niemand.\n"
              "# Auskommentierte Zeilen bleiben unbeantwortet.\n";
    }
    os << header << '\n';
    const auto questions = questionnaire(locale);
    for (int block = 1; block <= kBlockCount; ++block) {
        if (block > 1) os << '\n';
        os << "  # " << block_title(block, locale) << '\n';
        os << "  # " << block_prompt(block, locale) << '\n';
        if (block == 1) {
            os << "  # actor actor_id \"Display name\" kind=individual\n";
            continue;
        }
        if (block == 5) {
            for (const auto& ex : kChannelExamples) {
                os << "  # " << (locale == Locale::en ? ex.caption_en : ex.caption_de) << '\n';
                os << "  # " << ex.line << '\n';
            }
            continue;
        }
        for (const auto& q : questions) {
            if (q.block != block || !q.slot) continue;
            os << "  # " << q.text << '\n';
            os << "  # " << slot_keyword(*q.slot) << ' ' << slot_name(*q.slot) << " -> actor_id\n";
        }
    }
    os << "}\n";
    return os.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Check responsibility maps of algorithmic decision-support systems.", "respmap"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "respmap 0.3.0");

    const std::vector<std::string> locales{"en", "de"};

    // check
    std::string check_path, check_format = "text", check_locale = "en", check_policy, fail_on = "error";
    auto* check = app.add_subcommand("check", "Analyse a map and print the report");
    check->add_option("path", check_path, "Map file (.rmap, or .json interchange)")->required();
    check->add_option("--format", check_format, "Output format")->check(CLI::IsMember({"text", "structured"}));
    check->add_option("--locale", check_locale, "Report language")->check(CLI::IsMember(locales));
    check->add_option("--policy", check_policy, "Rule configuration (JSON)");
    check->add_option("--fail-on", fail_on, "Lowest severity that makes the exit status 1")
        ->check(CLI::IsMember({"error", "warning", "info"}));

    // diff
    std::string diff_a, diff_b, diff_policy, diff_format = "text";
    auto* diffc = app.add_subcommand("diff", "Compare the findings of two maps");
    diffc->add_option("before", diff_a, "Map file")->required();
    diffc->add_option("after", diff_b, "Map file")->required();
    diffc->add_option("--policy", diff_policy, "Rule configuration (JSON)");
    diffc->add_option("--format", diff_format, "Output format")->check(CLI::IsMember({"text", "structured"}));

    // export
    std::string export_path, graph_out;
    auto* exportc = app.add_subcommand("export", "Write the responsibility graph in DOT format");
    exportc->add_option("path", export_path, "Map file")->required();
    exportc->add_option("--graph", graph_out, "Output file ('-' for standard output)")->required();

    // init
    std::string init_name, init_out, init_locale = "en";
    auto* init = app.add_subcommand("init", "Write a commented map template");
    init->add_option("--name", init_name, "Map name")->required();
    init->add_option("out_path", init_out, "File to create")->required();
    init->add_option("--locale", init_locale, "Language of the comments")->check(CLI::IsMember(locales));

    // questions
    std::string questions_locale = "en";
    auto* questions = app.add_subcommand("questions", "Print the guiding questionnaire");
    questions->add_option("--locale", questions_locale, "Language")->check(CLI::IsMember(locales));

    // serve
    int port = 8080;
    std::string host = "127.0.0.1", session_dir = "sessions", serve_policy, static_dir;
    auto* servec = app.add_subcommand("serve", "Run the HTTP service");
    servec->add_option("--port", port, "TCP port (0 picks a free one)")->check(CLI::Range(0, 65535));
    servec->add_option("--session-dir", session_dir, "Directory holding one file per session");
    servec->add_option("--host", host, "Address to bind");
    servec->add_option("--policy", serve_policy, "Rule configuration (JSON) shared by all sessions");
    servec->add_option("--static-dir", static_dir, "Directory with front-end assets served at /");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*check) {
            const ResponsibilityMap map = load_map(check_path, err);
            const RuleConfig config = load_policy(check_policy, err);
            const Report report = analyze_or_exit(map, config, check_path, err);
            const Locale locale = to_locale(check_locale);
            out << (check_format == "structured" ? render_structured(report, locale) : render_text(report, locale));
            return count_at_or_above(report, to_severity(fail_on)) > 0 ? kFindings : kOk;
        }
        if (*diffc) {
            const ResponsibilityMap a = load_map(diff_a, err);
            const ResponsibilityMap b = load_map(diff_b, err);
            const RuleConfig config = load_policy(diff_policy, err);
            const DiffReport d = diff(analyze_or_exit(a, config, diff_a, err), analyze_or_exit(b, config, diff_b, err));
            out << (diff_format == "structured" ? render_diff_structured(d) : render_diff_text(d));
            return d.introduced.empty() ? kOk : kFindings;
        }
        if (*exportc) {
            const ResponsibilityMap map = load_map(export_path, err);
            try {
                require_valid(map);
            } catch (const InvalidMapError& e) {
                err << export_path << ": error: " << e.what() << '\n';
                return kInvalidInput;
            }
            write_output(graph_out, export_graph(map), out, err);
            return kOk;
        }
        if (*init) {
            std::error_code ec;
            if (fs::exists(init_out, ec) || ec) {
                err << "respmap: " << init_out << " already exists; not overwriting\n";
                return kUsage;
            }
            std::string text;
            try {
                text = init_template(init_name, to_locale(init_locale));
            } catch (const ValidationError& e) {
                err << "respmap: --name: " << e.what() << '\n';
                return kUsage;
            }
            if (init_out == "-") {
                err << "respmap: init needs a file path\n";
                return kUsage;
            }
            write_output(init_out, text, out, err);
            return kOk;
        }
        if (*questions) {
            out << render_questions(to_locale(questions_locale));
            return kOk;
        }
        if (*servec) {
            return serve(host, port, session_dir, serve_policy, static_dir, err);
        }
    } catch (const Exit& e) {
        return e.status;
    } catch (const std::exception& e) {
        err << "respmap: " << e.what() << '\n';
        return kInvalidInput;
    }
    return kUsage;
}

}  // namespace respmap::cli
