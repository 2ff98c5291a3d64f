#pragma once

#include "litgrid/model.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace litgrid {

struct ParseOutput {
    Document doc;
    std::vector<Diagnostic> diagnostics; // file-level syntax problems, with line numbers
};

/// Reads the `.lsheet` literate format. CRLF and lone CR are normalized to LF.
/// An unclosed fence throws PositionedError(UnterminatedFence) carrying the
/// opener's line; every other problem becomes a diagnostic.
ParseOutput parse_lsheet(std::string_view text);

/// Canonical text: metadata, then chunks separated by one blank line.
std::string serialize_lsheet(const Document& doc);

/// RFC 4180 style records; CRLF and lone CR end records like LF. A trailing newline ends the last record rather
/// than starting an empty one. Throws PositionedError(CsvError) with the
/// 1-based record and field.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// Quotes only when the field needs it.
std::string csv_field(std::string_view field);

/// Single-grid document marked `imported=true`, titled `name`.
Document import_grid_csv(std::string_view text, std::string_view name);

/// Chunk id derived from an arbitrary name (file stem, template base).
std::string id_from_name(std::string_view name);

/// Reads a `.lsheet` file, or imports a `.csv` file. Throws Error(Io).
ParseOutput load_document(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

} // namespace litgrid
