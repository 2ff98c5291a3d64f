#pragma once

#include "litgrid/model.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace litgrid {

/// Lowercase, split on anything that is not an ASCII letter or digit, drop
/// tokens shorter than two characters.
std::vector<std::string> tokenize(std::string_view text);

/// Text indexed for a chunk: narrative body or heading title, the id, the
/// desc, and identifiers appearing in expressions.
std::string chunk_index_text(const Chunk& c);

struct IndexedChunk {
    std::string doc_path;
    std::string chunk_id;
    std::map<std::string, int> tf;
};

class Library {
public:
    void add(const std::string& doc_path, const Document& doc);

    std::size_t size() const { return chunks_.size(); }
    const std::vector<IndexedChunk>& chunks() const { return chunks_; }
    int df(const std::string& term) const;
    /// ln(N / (1 + df)) + 1
    double idf(const std::string& term) const;

private:
    std::vector<IndexedChunk> chunks_;
    std::map<std::string, int> df_;
};

struct Suggestion {
    std::string doc_path;
    std::string chunk_id;
    double score = 0;
};

/// Reads every `.lsheet`/`.csv` under `paths`. Unreadable files are skipped
/// and described in `warnings`.
Library index_library(const std::vector<std::filesystem::path>& paths, std::vector<std::string>* warnings = nullptr);

/// Top-k by cosine similarity, ties broken by path then chunk id; zero scores
/// are dropped. Throws Error(EmptyLibrary).
std::vector<Suggestion> suggest_reuse(std::string_view query, const Library& lib, std::size_t k);

} // namespace litgrid
