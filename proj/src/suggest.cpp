#include "litgrid/suggest.hpp"
#include "litgrid/annotate.hpp"
#include "litgrid/error.hpp"
#include "litgrid/lsheet.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace litgrid {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (cur.size() >= 2)
            out.push_back(cur);
        cur.clear();
    };
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (c >= 'A' && c <= 'Z')
            cur.push_back(static_cast<char>(c - 'A' + 'a'));
        else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))
            cur.push_back(ch);
        else
            flush();
    }
    flush();
    return out;
}

namespace {

// Identifier-shaped words of an expression, skipping string literals.
void append_identifiers(std::string_view expr, std::string& out) {
    for (std::size_t i = 0; i < expr.size();) {
        char c = expr[i];
        if (c == '"') {
            ++i;
            while (i < expr.size()) {
                if (expr[i] == '"') {
                    if (i + 1 < expr.size() && expr[i + 1] == '"') {
                        i += 2;
                        continue;
                    }
                    break;
                }
                ++i;
            }
            ++i;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = i;
            while (i < expr.size() && (std::isalnum(static_cast<unsigned char>(expr[i])) || expr[i] == '_'))
                ++i;
            out += ' ';
            out += expr.substr(start, i - start);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            while (i < expr.size() && (std::isalnum(static_cast<unsigned char>(expr[i])) || expr[i] == '.'))
                ++i;
        } else {
            ++i;
        }
    }
}

} // namespace

std::string chunk_index_text(const Chunk& c) {
    std::string text;
    std::visit(
        [&](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, Narrative>) {
                text = b.body;
            } else if constexpr (std::is_same_v<T, Heading>) {
                text = b.title;
            } else if constexpr (std::is_same_v<T, Formula>) {
                if (b.desc)
                    text = *b.desc;
                append_identifiers(b.expr_text, text);
            } else if constexpr (std::is_same_v<T, Assertion>) {
                text = b.msg;
                append_identifiers(b.expr_text, text);
            } else if constexpr (std::is_same_v<T, Asset>) {
                text = b.caption;
            } else if constexpr (std::is_same_v<T, Grid>) {
                for (const auto& [addr, cell] : b.cells)
                    if (auto* f = std::get_if<FormulaCell>(&cell.parsed))
                        append_identifiers(f->expr_text, text);
            }
        },
        c.body);
    text += ' ';
    text += c.id;
    return text;
}

void Library::add(const std::string& doc_path, const Document& doc) {
    for (const auto& c : doc.chunks) {
        IndexedChunk ic{doc_path, c.id, {}};
        for (auto& t : tokenize(chunk_index_text(c)))
            ++ic.tf[t];
        for (const auto& [term, n] : ic.tf)
            ++df_[term];
        chunks_.push_back(std::move(ic));
    }
}

int Library::df(const std::string& term) const {
    auto it = df_.find(term);
    return it == df_.end() ? 0 : it->second;
}

double Library::idf(const std::string& term) const {
    return std::log(static_cast<double>(chunks_.size()) / (1.0 + df(term))) + 1.0;
}

Library index_library(const std::vector<std::filesystem::path>& paths, std::vector<std::string>* warnings) {
    Library lib;
    for (const auto& p : expand_paths(paths)) {
        try {
            lib.add(p.generic_string(), load_document(p).doc);
        } catch (const Error& e) {
            if (warnings)
                warnings->push_back(p.generic_string() + ": skipped: " + e.what());
        }
    }
    return lib;
}

std::vector<Suggestion> suggest_reuse(std::string_view query, const Library& lib, std::size_t k) {
    if (lib.size() == 0)
        throw Error(ErrorCode::EmptyLibrary, "the reuse library is empty");

    std::map<std::string, double> q;
    for (auto& t : tokenize(query))
        if (lib.df(t) > 0)
            q[t] += 1.0;
    double q_norm = 0;
    for (auto& [term, w] : q) {
        w *= lib.idf(term);
        q_norm += w * w;
    }
    q_norm = std::sqrt(q_norm);

    std::vector<Suggestion> out;
    if (q_norm == 0)
        return out;
    for (const auto& c : lib.chunks()) {
        double dot = 0, norm = 0;
        for (const auto& [term, n] : c.tf) {
            double w = n * lib.idf(term);
            norm += w * w;
            if (auto it = q.find(term); it != q.end())
                dot += w * it->second;
        }
        if (dot <= 0)
            continue;
        out.push_back({c.doc_path, c.chunk_id, dot / (std::sqrt(norm) * q_norm)});
    }
    std::sort(out.begin(), out.end(), [](const Suggestion& a, const Suggestion& b) {
        if (a.score != b.score)
            return a.score > b.score;
        if (a.doc_path != b.doc_path)
            return a.doc_path < b.doc_path;
        return a.chunk_id < b.chunk_id;
    });
    if (out.size() > k)
        out.resize(k);
    return out;
}

} // namespace litgrid
