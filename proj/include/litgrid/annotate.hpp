#pragma once

#include "litgrid/model.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace litgrid {

/// Classifier thresholds. Overridable through a `key = value` file.
struct ClassifyConfig {
    int explicit_words = 20;      // narrative words needed for Explicit
    int literate_headings = 2;
    double literate_coverage = 0.5;
    int cell_words = 4;           // imported-grid text cells this long count as narrative
};

/// Reads `explicit_words`, `literate_headings`, `literate_coverage` and
/// `cell_words`; `#` starts a comment. Throws Error(Io) or Error(ParseError).
ClassifyConfig load_classify_config(const std::filesystem::path& path);

enum class Level { NA, Implicit, Explicit, Literate };

std::string_view to_string(Level level);

struct AnnotationReport {
    bool is_computational = false;
    Level level = Level::NA;
    int narrative_words = 0;
    int heading_count = 0;
    int named_computables = 0;
    int documented_computables = 0;
    double doc_coverage = 1.0;

    bool operator==(const AnnotationReport&) const = default;
};

/// The nearest chunk before `index` that is not a heading or theme
/// definition, or nullptr.
const Chunk* preceding_content(const Document& doc, std::size_t index);

/// True when a non-stub narrative precedes the chunk or it carries a desc.
bool is_documented(const Document& doc, std::size_t index);

AnnotationReport classify(const Document& doc, const ClassifyConfig& cfg = {});

struct SurveyRow {
    std::string path;
    AnnotationReport report;
};

struct SurveyFailure {
    std::string path;
    std::string message;
};

struct SurveyStats {
    int n_total = 0;
    int n_computational = 0;
    int n_implicit = 0;
    int n_explicit = 0;
    int n_literate = 0;
    int unreadable = 0;
    // Tenths of a percent; nullopt when the denominator is zero.
    std::optional<int> pct_computational;
    std::optional<int> pct_implicit_of_comp;
    std::optional<int> pct_explicit_of_comp;
    std::optional<int> pct_literate_of_comp;
    std::vector<SurveyRow> rows;          // sorted by path
    std::vector<SurveyFailure> failures;  // sorted by path
};

/// Percentage num/den rounded half-up to tenths of a percent.
std::optional<int> percent_tenths(int num, int den);

/// "41.3", or "n/a".
std::string format_percent(std::optional<int> tenths);

/// Directories are searched recursively for `.lsheet` and `.csv` files.
/// The result is sorted and free of duplicates.
std::vector<std::filesystem::path> expand_paths(const std::vector<std::filesystem::path>& paths);

SurveyStats survey(const std::vector<std::filesystem::path>& paths, const ClassifyConfig& cfg = {});

std::string survey_table(const SurveyStats& s);
std::string survey_json(const SurveyStats& s);

struct StubInfo {
    std::string target;
    std::string inserted;
    bool operator==(const StubInfo&) const = default;
};

struct StubResult {
    Document doc;
    std::vector<StubInfo> stubs;
};

/// Inserts `TODO: describe <id>` stubs before undocumented formulas, grids
/// and assertions. The revision moves only when something was inserted.
StubResult generate_stubs(const Document& doc);

std::vector<std::string> template_names();

/// Throws Error(UnknownTemplate) or Error(InvalidId).
std::vector<Chunk> instantiate_template(std::string_view name, std::string_view base);

/// Appends template chunks. Throws Error(IdCollision) when an id is taken.
Document append_chunks(const Document& doc, const std::vector<Chunk>& chunks);

} // namespace litgrid
