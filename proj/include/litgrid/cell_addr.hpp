#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace litgrid {

inline constexpr int kMaxColumn = 18278; // ZZZ

/// 1-based grid coordinate. Rendered canonically as uppercase column letters
/// followed by the row number, e.g. `B12`.
struct CellAddr {
    int column = 1;
    int row = 1;

    auto operator<=>(const CellAddr&) const = default;
};

std::string column_name(int column);
std::string to_string(CellAddr addr);

/// Parses `[A-Za-z]{1,3}[0-9]+` with row >= 1. Returns nullopt otherwise.
std::optional<CellAddr> parse_cell_addr(std::string_view text);

/// True when `text` has the lexical shape of a cell address, whether or not
/// the row is in range. Chunk ids must never have this shape.
bool looks_like_cell_addr(std::string_view text);

/// `[a-z][a-z0-9_-]*`, at most 64 characters, and not cell-shaped.
bool is_valid_chunk_id(std::string_view text);

} // namespace litgrid
