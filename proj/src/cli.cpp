#include "litgrid/cli.hpp"
#include "litgrid/annotate.hpp"
#include "litgrid/error.hpp"
#include "litgrid/json_io.hpp"
#include "litgrid/lsheet.hpp"
#include "litgrid/service.hpp"
#include "litgrid/suggest.hpp"
#include "litgrid/weave.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <set>
#include <tuple>

namespace litgrid {

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kDiagnostics = 1;
constexpr int kUsage = 2;

// Thrown for usage and I/O failures inside a subcommand.
struct UsageFailure {
    std::string message;
};

ParseOutput load_or_fail(const std::string& file) {
    try {
        return load_document(file);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Io)
            throw UsageFailure{e.what()};
        throw;
    }
}

// Parse, structural and evaluation diagnostics, without repeats of the same
// problem found at two stages.
std::vector<Diagnostic> all_diagnostics(const ParseOutput& parsed, const EvalResult* r) {
    std::vector<Diagnostic> out;
    std::set<std::tuple<std::string, std::optional<CellAddr>, std::string>> seen;
    auto add = [&](const std::vector<Diagnostic>& ds) {
        for (const auto& d : ds)
            if (seen.insert({d.chunk, d.cell, d.message}).second)
                out.push_back(d);
    };
    add(parsed.diagnostics);
    add(validate_document(parsed.doc));
    if (r)
        add(r->diagnostics);
    return out;
}

void print_diagnostics(const std::vector<Diagnostic>& diags, std::ostream& err) {
    for (const auto& d : diags)
        err << format_diagnostic(d) << "\n";
}

int exit_for(const std::vector<Diagnostic>& diags) {
    return count_severity(diags, Severity::Error) > 0 ? kDiagnostics : kOk;
}

std::string plural(std::size_t n, const char* word) {
    return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

ClassifyConfig config_from_env() {
    const char* path = std::getenv("LITGRID_CONFIG");
    if (!path || !*path)
        return {};
    try {
        return load_classify_config(path);
    } catch (const Error& e) {
        throw UsageFailure{std::string("LITGRID_CONFIG: ") + e.what()};
    }
}

std::string narrative_text(const Document& doc) {
    std::string q;
    for (const auto& c : doc.chunks)
        if (c.is_documenting_narrative()) {
            if (!q.empty())
                q += "\n";
            q += c.as<Narrative>()->body;
        }
    return q;
}

} // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Literate spreadsheet toolkit", "litgrid"};
    app.require_subcommand(1);

    std::string file, theme = std::string(kAllTheme), out_path, tmpl, base, library, host = "127.0.0.1";
    std::vector<std::string> paths;
    bool json = false, apply = false;
    int k = 5, port = 7878;

    auto* check = app.add_subcommand("check", "Validate a document and run its assertions");
    check->add_option("file", file, "Document (.lsheet or .csv)")->required();

    auto* eval = app.add_subcommand("eval", "Evaluate every formula and assertion");
    eval->add_option("file", file, "Document")->required();
    eval->add_flag("--json", json, "Canonical JSON output");

    auto* weave_cmd = app.add_subcommand("weave", "Render a document as HTML");
    weave_cmd->add_option("file", file, "Document")->required();
    weave_cmd->add_option("--theme", theme, "Theme to present");
    weave_cmd->add_option("-o,--output", out_path, "Output file (default stdout)");

    auto* stubs_cmd = app.add_subcommand("stubs", "List or insert documentation stubs");
    stubs_cmd->add_option("file", file, "Document")->required();
    stubs_cmd->add_flag("--apply", apply, "Insert the stubs and rewrite the file");
    stubs_cmd->add_flag("--json", json, "JSON output");

    auto* classify_cmd = app.add_subcommand("classify", "Annotation level of documents");
    classify_cmd->add_option("paths", paths, "Files or directories")->required();
    classify_cmd->add_flag("--json", json, "JSON output");

    auto* new_cmd = app.add_subcommand("new", "Start a document from a template");
    new_cmd->add_option("--template", tmpl, "worked-problem or model-doc")->required();
    new_cmd->add_option("--name", base, "Base id for the generated chunks")->required();
    new_cmd->add_option("-o,--output", out_path, "File to create or extend")->required();

    auto* suggest_cmd = app.add_subcommand("suggest", "Suggest reusable chunks for a document");
    suggest_cmd->add_option("file", file, "Document whose narrative is the query")->required();
    suggest_cmd->add_option("--library", library, "Directory of documents to search")->required();
    suggest_cmd->add_option("-k", k, "Number of suggestions")->check(CLI::PositiveNumber);
    suggest_cmd->add_flag("--json", json, "JSON output");

    auto* serve_cmd = app.add_subcommand("serve", "Serve a document over HTTP");
    serve_cmd->add_option("file", file, "Document")->required();
    serve_cmd->add_option("--port", port, "Port")->check(CLI::Range(1, 65535));
    serve_cmd->add_option("--host", host, "Address to bind");
    serve_cmd->add_option("--library", library, "Directory used by /api/suggest");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "litgrid: " << e.what() << "\n";
        err << "run 'litgrid --help' for usage\n";
        return kUsage;
    }

    try {
        if (check->parsed()) {
            auto parsed = load_or_fail(file);
            auto r = evaluate_checked(parsed.doc);
            auto diags = all_diagnostics(parsed, &r);
            print_diagnostics(diags, err);
            out << plural(count_severity(diags, Severity::Error), "error") << ", "
                << plural(count_severity(diags, Severity::Warning), "warning") << "\n";
            return exit_for(diags);
        }

        if (eval->parsed()) {
            auto parsed = load_or_fail(file);
            auto r = evaluate_checked(parsed.doc);
            auto diags = all_diagnostics(parsed, &r);
            if (json) {
                EvalResult shown = r;
                shown.diagnostics = diags;
                out << values_to_json(shown) << "\n";
            } else {
                for (const auto& [key, value] : r.values)
                    out << key << " = " << format_value(value) << "\n";
                print_diagnostics(diags, err);
            }
            return exit_for(diags);
        }

        if (weave_cmd->parsed()) {
            auto parsed = load_or_fail(file);
            auto r = evaluate_checked(parsed.doc);
            RenderTree rt;
            std::vector<TocEntry> entries;
            try {
                rt = weave(parsed.doc, theme, r);
                entries = toc(parsed.doc, theme);
            } catch (const Error& e) {
                if (e.code() == ErrorCode::UnknownTheme)
                    throw UsageFailure{e.what()};
                throw;
            }
            std::string html = render_html(rt, entries, cross_refs(parsed.doc), term_index(parsed.doc));
            if (out_path.empty()) {
                out << html;
            } else {
                try {
                    write_text_file(out_path, html);
                } catch (const Error& e) {
                    throw UsageFailure{e.what()};
                }
            }
            auto diags = all_diagnostics(parsed, &r);
            diags.insert(diags.end(), rt.diagnostics.begin(), rt.diagnostics.end());
            print_diagnostics(diags, err);
            return exit_for(diags);
        }

        if (stubs_cmd->parsed()) {
            auto parsed = load_or_fail(file);
            auto res = generate_stubs(parsed.doc);
            if (json) {
                Json list = Json::array();
                for (const auto& s : res.stubs)
                    list.push_back({{"target", s.target}, {"inserted", s.inserted}});
                out << dump_json({{"stubs", list}, {"applied", apply && !res.stubs.empty()}}) << "\n";
            } else {
                for (const auto& s : res.stubs)
                    out << s.target << " <- " << s.inserted << "\n";
            }
            if (apply && !res.stubs.empty()) {
                if (fs::path(file).extension() == ".csv")
                    throw UsageFailure{"cannot write stubs into a CSV file; save it as .lsheet first"};
                try {
                    write_text_file(file, serialize_lsheet(res.doc));
                } catch (const Error& e) {
                    throw UsageFailure{e.what()};
                }
            }
            if (!json)
                out << plural(res.stubs.size(), apply ? "stub inserted" : "pending stub") << "\n";
            return kOk;
        }

        if (classify_cmd->parsed()) {
            auto cfg = config_from_env();
            std::vector<fs::path> inputs;
            for (const auto& p : paths) {
                if (!fs::exists(p))
                    throw UsageFailure{"no such file or directory: " + p};
                inputs.emplace_back(p);
            }
            auto stats = survey(inputs, cfg);
            out << (json ? survey_json(stats) : survey_table(stats));
            for (const auto& f : stats.failures)
                err << f.path << ": " << f.message << "\n";
            return stats.unreadable > 0 ? kDiagnostics : kOk;
        }

        if (new_cmd->parsed()) {
            auto chunks = instantiate_template(tmpl, base);
            Document doc;
            if (fs::exists(out_path)) {
                auto parsed = load_or_fail(out_path);
                doc = std::move(parsed.doc);
            } else {
                doc.meta["title"] = base;
            }
            doc = append_chunks(doc, chunks);
            try {
                write_text_file(out_path, serialize_lsheet(doc));
            } catch (const Error& e) {
                throw UsageFailure{e.what()};
            }
            out << "wrote " << plural(chunks.size(), "chunk") << " to " << out_path << "\n";
            return kOk;
        }

        if (suggest_cmd->parsed()) {
            auto parsed = load_or_fail(file);
            if (!fs::is_directory(library))
                throw UsageFailure{"library is not a directory: " + library};
            std::vector<std::string> warnings;
            auto lib = index_library({library}, &warnings);
            for (const auto& w : warnings)
                err << w << "\n";
            auto found = suggest_reuse(narrative_text(parsed.doc), lib, static_cast<std::size_t>(k));
            if (json) {
                Json list = Json::array();
                for (const auto& s : found)
                    list.push_back({{"doc_path", s.doc_path}, {"chunk_id", s.chunk_id}, {"score", s.score}});
                out << dump_json({{"suggestions", list}}) << "\n";
            } else {
                char buf[32];
                for (const auto& s : found) {
                    std::snprintf(buf, sizeof buf, "%.4f", s.score);
                    out << buf << "  " << s.doc_path << "  " << s.chunk_id << "\n";
                }
            }
            return kOk;
        }

        if (serve_cmd->parsed()) {
            auto parsed = load_or_fail(file);
            std::optional<Library> lib;
            if (!library.empty()) {
                std::vector<std::string> warnings;
                lib = index_library({library}, &warnings);
                for (const auto& w : warnings)
                    err << w << "\n";
            }
            print_diagnostics(parsed.diagnostics, err);
            Session session(std::move(parsed.doc), std::move(lib));
            err << "serving " << file << " on http://" << host << ":" << port << "/\n";
            err.flush();
            if (!serve_http(session, host, port))
                throw UsageFailure{"cannot listen on " + host + ":" + std::to_string(port)};
            return kOk;
        }
    } catch (const UsageFailure& f) {
        err << "litgrid: " << f.message << "\n";
        return kUsage;
    } catch (const Error& e) {
        err << "litgrid: " << to_string(e.code()) << ": " << e.what();
        if (auto* pe = dynamic_cast<const PositionedError*>(&e); pe && pe->line())
            err << " (line " << *pe->line() << ")";
        err << "\n";
        if (e.code() == ErrorCode::UnknownTemplate)
            return kUsage;
        return kDiagnostics;
    }
    return kUsage;
}

} // namespace litgrid
