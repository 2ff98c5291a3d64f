#include "litgrid/annotate.hpp"
#include "litgrid/error.hpp"
#include "litgrid/json_io.hpp"
#include "litgrid/lsheet.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>

namespace litgrid {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

int count_words(std::string_view text) {
    std::istringstream in{std::string(text)};
    int n = 0;
    std::string w;
    while (in >> w)
        ++n;
    return n;
}

} // namespace

ClassifyConfig load_classify_config(const fs::path& path) {
    ClassifyConfig cfg;
    std::istringstream in(read_text_file(path));
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        std::string_view content = trim(std::string_view(line).substr(0, hash));
        if (content.empty())
            continue;
        auto eq = content.find('=');
        auto fail = [&](const std::string& msg) {
            throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": " + msg);
        };
        if (eq == std::string_view::npos)
            fail("expected key = value");
        std::string key(trim(content.substr(0, eq)));
        std::string value(trim(content.substr(eq + 1)));
        auto as_int = [&]() {
            int v = 0;
            auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc() || p != value.data() + value.size() || v < 0)
                fail("'" + key + "' needs a non-negative integer");
            return v;
        };
        if (key == "explicit_words") {
            cfg.explicit_words = as_int();
        } else if (key == "literate_headings") {
            cfg.literate_headings = as_int();
        } else if (key == "cell_words") {
            cfg.cell_words = as_int();
        } else if (key == "literate_coverage") {
            double v = 0;
            auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc() || p != value.data() + value.size() || v < 0 || v > 1)
                fail("'literate_coverage' needs a number between 0 and 1");
            cfg.literate_coverage = v;
        } else {
            fail("unknown key '" + key + "'");
        }
    }
    return cfg;
}

std::string_view to_string(Level level) {
    switch (level) {
    case Level::NA: return "NA";
    case Level::Implicit: return "implicit";
    case Level::Explicit: return "explicit";
    case Level::Literate: return "literate";
    }
    return "NA";
}

const Chunk* preceding_content(const Document& doc, std::size_t index) {
    while (index > 0) {
        const Chunk& c = doc.chunks[--index];
        if (c.kind() != ChunkKind::Heading && c.kind() != ChunkKind::ThemeDef)
            return &c;
    }
    return nullptr;
}

bool is_documented(const Document& doc, std::size_t index) {
    if (auto* f = doc.chunks[index].as<Formula>(); f && f->desc && !f->desc->empty())
        return true;
    const Chunk* prev = preceding_content(doc, index);
    return prev && prev->is_documenting_narrative();
}

AnnotationReport classify(const Document& doc, const ClassifyConfig& cfg) {
    AnnotationReport r;
    bool imported = false;
    if (auto it = doc.meta.find("imported"); it != doc.meta.end())
        imported = it->second == "true";

    for (std::size_t i = 0; i < doc.chunks.size(); ++i) {
        const Chunk& c = doc.chunks[i];
        switch (c.kind()) {
        case ChunkKind::Heading:
            ++r.heading_count;
            break;
        case ChunkKind::Narrative:
            if (!c.is_stub())
                r.narrative_words += count_words(c.as<Narrative>()->body);
            break;
        case ChunkKind::Formula:
            r.is_computational = true;
            ++r.named_computables;
            r.documented_computables += is_documented(doc, i);
            break;
        case ChunkKind::Grid:
            ++r.named_computables;
            r.documented_computables += is_documented(doc, i);
            for (const auto& [addr, cell] : c.as<Grid>()->cells) {
                if (cell.is_formula()) {
                    r.is_computational = true;
                } else if (imported) {
                    if (auto* text = std::get_if<std::string>(&cell.parsed)) {
                        int words = count_words(*text);
                        if (words >= cfg.cell_words)
                            r.narrative_words += words;
                    }
                }
            }
            break;
        default:
            break;
        }
    }
    r.doc_coverage = r.named_computables == 0
                         ? 1.0
                         : static_cast<double>(r.documented_computables) / r.named_computables;
    if (!r.is_computational)
        r.level = Level::NA;
    else if (r.narrative_words < cfg.explicit_words)
        r.level = Level::Implicit;
    else if (r.heading_count >= cfg.literate_headings && r.doc_coverage >= cfg.literate_coverage)
        r.level = Level::Literate;
    else
        r.level = Level::Explicit;
    return r;
}

std::optional<int> percent_tenths(int num, int den) {
    if (den <= 0)
        return std::nullopt;
    long long n = 2000LL * num + den;
    return static_cast<int>(n / (2LL * den));
}

std::string format_percent(std::optional<int> tenths) {
    if (!tenths)
        return "n/a";
    return std::to_string(*tenths / 10) + "." + std::to_string(*tenths % 10);
}

std::vector<fs::path> expand_paths(const std::vector<fs::path>& paths) {
    std::set<fs::path> out;
    for (const auto& p : paths) {
        std::error_code ec;
        if (fs::is_directory(p, ec)) {
            for (auto it = fs::recursive_directory_iterator(p, ec); !ec && it != fs::recursive_directory_iterator();
                 it.increment(ec)) {
                if (!it->is_regular_file(ec))
                    continue;
                auto ext = it->path().extension();
                if (ext == ".lsheet" || ext == ".csv")
                    out.insert(it->path().lexically_normal());
            }
        } else {
            out.insert(p.lexically_normal());
        }
    }
    return {out.begin(), out.end()};
}

SurveyStats survey(const std::vector<fs::path>& paths, const ClassifyConfig& cfg) {
    SurveyStats s;
    for (const auto& p : expand_paths(paths)) {
        try {
            auto parsed = load_document(p);
            SurveyRow row{p.generic_string(), classify(parsed.doc, cfg)};
            ++s.n_total;
            if (row.report.is_computational) {
                ++s.n_computational;
                if (row.report.level == Level::Implicit)
                    ++s.n_implicit;
                else
                    ++s.n_explicit;
                if (row.report.level == Level::Literate)
                    ++s.n_literate;
            }
            s.rows.push_back(std::move(row));
        } catch (const Error& e) {
            ++s.unreadable;
            s.failures.push_back({p.generic_string(), e.what()});
        }
    }
    s.pct_computational = percent_tenths(s.n_computational, s.n_total);
    s.pct_implicit_of_comp = percent_tenths(s.n_implicit, s.n_computational);
    s.pct_explicit_of_comp = percent_tenths(s.n_explicit, s.n_computational);
    s.pct_literate_of_comp = percent_tenths(s.n_literate, s.n_computational);
    return s;
}

std::string survey_table(const SurveyStats& s) {
    std::size_t width = 4;
    for (const auto& r : s.rows)
        width = std::max(width, r.path.size());
    std::string out;
    char buf[64];
    auto pad = [](std::string text, std::size_t w) {
        text.resize(std::max(text.size(), w), ' ');
        return text;
    };
    out += pad("path", width) + "  level     words  headings  coverage\n";
    for (const auto& r : s.rows) {
        std::snprintf(buf, sizeof buf, "%-8s %6d %9d %9.2f", std::string(to_string(r.report.level)).c_str(),
                      r.report.narrative_words, r.report.heading_count, r.report.doc_coverage);
        out += pad(r.path, width) + "  " + buf + "\n";
    }
    for (const auto& f : s.failures)
        out += pad(f.path, width) + "  unreadable: " + f.message + "\n";
    out += "\n";
    auto line = [&](const char* label, int n, std::optional<int> pct, const char* of) {
        std::snprintf(buf, sizeof buf, "%-14s %5d", label, n);
        out += buf;
        if (of)
            out += "  " + format_percent(pct) + (pct ? "%" : "") + " " + of;
        out += "\n";
    };
    line("documents", s.n_total, std::nullopt, nullptr);
    line("computational", s.n_computational, s.pct_computational, "of documents");
    line("implicit", s.n_implicit, s.pct_implicit_of_comp, "of computational");
    line("explicit", s.n_explicit, s.pct_explicit_of_comp, "of computational");
    line("literate", s.n_literate, s.pct_literate_of_comp, "of computational");
    line("unreadable", s.unreadable, std::nullopt, nullptr);
    return out;
}

std::string survey_json(const SurveyStats& s) {
    auto pct = [](std::optional<int> t) -> Json {
        if (!t)
            return "n/a";
        return *t / 10.0;
    };
    Json files = Json::array();
    for (const auto& r : s.rows) {
        files.push_back({{"path", r.path},
                         {"is_computational", r.report.is_computational},
                         {"level", std::string(to_string(r.report.level))},
                         {"narrative_words", r.report.narrative_words},
                         {"heading_count", r.report.heading_count},
                         {"named_computables", r.report.named_computables},
                         {"documented_computables", r.report.documented_computables},
                         {"doc_coverage", r.report.doc_coverage}});
    }
    Json failures = Json::array();
    for (const auto& f : s.failures)
        failures.push_back({{"path", f.path}, {"message", f.message}});
    Json j = {{"n_total", s.n_total},
              {"n_computational", s.n_computational},
              {"n_implicit", s.n_implicit},
              {"n_explicit", s.n_explicit},
              {"n_literate", s.n_literate},
              {"unreadable", s.unreadable},
              {"pct_computational", pct(s.pct_computational)},
              {"pct_implicit_of_comp", pct(s.pct_implicit_of_comp)},
              {"pct_explicit_of_comp", pct(s.pct_explicit_of_comp)},
              {"pct_literate_of_comp", pct(s.pct_literate_of_comp)},
              {"files", files},
              {"failures", failures}};
    return dump_json(j, 2) + "\n";
}

StubResult generate_stubs(const Document& doc) {
    StubResult out{doc, {}};
    std::set<std::string> ids;
    for (const auto& c : doc.chunks)
        ids.insert(c.id);
    int counter = 0;
    auto fresh_id = [&](const std::string& target) {
        std::string id = "todo-" + target;
        while (!is_valid_chunk_id(id) || ids.count(id))
            id = "todo-" + std::to_string(++counter);
        ids.insert(id);
        return id;
    };

    std::vector<Chunk> chunks;
    chunks.reserve(doc.chunks.size());
    for (std::size_t i = 0; i < doc.chunks.size(); ++i) {
        const Chunk& c = doc.chunks[i];
        bool target = c.kind() == ChunkKind::Formula || c.kind() == ChunkKind::Grid || c.kind() == ChunkKind::Assertion;
        if (target && !is_documented(doc, i)) {
            const Chunk* prev = preceding_content(doc, i);
            if (!(prev && prev->is_stub())) {
                std::string id = fresh_id(c.id);
                chunks.push_back(Chunk{id, Narrative{"TODO: describe " + c.id, true}});
                out.stubs.push_back({c.id, id});
            }
        }
        chunks.push_back(c);
    }
    if (!out.stubs.empty()) {
        out.doc.chunks = std::move(chunks);
        ++out.doc.revision;
    }
    return out;
}

std::vector<std::string> template_names() { return {"model-doc", "worked-problem"}; }

std::vector<Chunk> instantiate_template(std::string_view name, std::string_view base_view) {
    std::string base(base_view);
    std::vector<Chunk> out;
    auto stub = [](std::string text) { return Narrative{std::move(text), true}; };
    if (name == "worked-problem") {
        out.push_back({base, Heading{1, base}});
        out.push_back({base + "-problem", stub("TODO: state the problem")});
        out.push_back({base + "-data-heading", Heading{2, "Data"}});
        out.push_back({base + "_data", Grid{{}, 2, 2}});
        out.push_back({base + "-model", Heading{2, "Model"}});
        out.push_back({base + "-model-notes", stub("TODO: explain the model")});
        out.push_back({base + "_result", Formula{"0", std::nullopt}});
        out.push_back({base + "-check", Heading{2, "Check"}});
        out.push_back({base + "-assert", Assertion{base + "_result >= 0", "TODO: refine check"}});
    } else if (name == "model-doc") {
        out.push_back({base, Heading{1, base}});
        out.push_back({base + "-intro", stub("TODO: describe " + base)});
        out.push_back({base + "-assumptions", Heading{2, "Assumptions"}});
        out.push_back({base + "-assumptions-notes", stub("TODO: list the assumptions")});
    } else {
        throw Error(ErrorCode::UnknownTemplate, "unknown template '" + std::string(name) + "'");
    }
    // Formula names must also be expression identifiers, so no '-' in base.
    if (base.find('-') != std::string::npos || !is_valid_chunk_id(base))
        throw Error(ErrorCode::InvalidId, "'" + base + "' cannot be used as a template base");
    for (const auto& c : out)
        if (!is_valid_chunk_id(c.id))
            throw Error(ErrorCode::InvalidId, "derived id '" + c.id + "' is not a valid chunk id");
    return out;
}

Document append_chunks(const Document& doc, const std::vector<Chunk>& chunks) {
    Document out = doc;
    for (const auto& c : chunks) {
        if (out.find(c.id))
            throw Error(ErrorCode::IdCollision, "chunk id '" + c.id + "' already exists");
        out.chunks.push_back(c);
    }
    ++out.revision;
    return out;
}

} // namespace litgrid
