#include "litgrid/cell_addr.hpp"
#include "litgrid/error.hpp"

#include <algorithm>
#include <cctype>

namespace litgrid {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::UnknownTheme: return "UnknownTheme";
    case ErrorCode::UnknownChunk: return "UnknownChunk";
    case ErrorCode::BadIndex: return "BadIndex";
    case ErrorCode::GridBoundsExceeded: return "GridBoundsExceeded";
    case ErrorCode::IdCollision: return "IdCollision";
    case ErrorCode::InvalidId: return "InvalidId";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownFunction: return "UnknownFunction";
    case ErrorCode::UnknownRef: return "UnknownRef";
    case ErrorCode::UnresolvedContext: return "UnresolvedContext";
    case ErrorCode::UnknownTemplate: return "UnknownTemplate";
    case ErrorCode::EmptyLibrary: return "EmptyLibrary";
    case ErrorCode::UnterminatedFence: return "UnterminatedFence";
    case ErrorCode::CsvError: return "CsvError";
    case ErrorCode::BadEdit: return "BadEdit";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

std::string column_name(int column) {
    std::string out;
    while (column > 0) {
        int rem = (column - 1) % 26;
        out.push_back(static_cast<char>('A' + rem));
        column = (column - 1) / 26;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::string to_string(CellAddr addr) {
    return column_name(addr.column) + std::to_string(addr.row);
}

namespace {

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Splits a cell-shaped token into its letter and digit parts.
bool split_cell(std::string_view text, std::string_view& letters, std::string_view& digits) {
    std::size_t i = 0;
    while (i < text.size() && is_alpha(text[i]))
        ++i;
    if (i == 0 || i > 3 || i == text.size())
        return false;
    for (std::size_t j = i; j < text.size(); ++j)
        if (!is_digit(text[j]))
            return false;
    letters = text.substr(0, i);
    digits = text.substr(i);
    return true;
}

} // namespace

bool looks_like_cell_addr(std::string_view text) {
    std::string_view letters, digits;
    return split_cell(text, letters, digits);
}

std::optional<CellAddr> parse_cell_addr(std::string_view text) {
    std::string_view letters, digits;
    if (!split_cell(text, letters, digits))
        return std::nullopt;
    int column = 0;
    for (char c : letters)
        column = column * 26 + (std::toupper(static_cast<unsigned char>(c)) - 'A' + 1);
    std::size_t first = digits.find_first_not_of('0');
    if (first == std::string_view::npos)
        return std::nullopt; // row 0
    if (digits.size() - first > 9)
        return std::nullopt;
    int row = 0;
    for (char c : digits.substr(first))
        row = row * 10 + (c - '0');
    return CellAddr{column, row};
}

bool is_valid_chunk_id(std::string_view text) {
    if (text.empty() || text.size() > 64)
        return false;
    if (text[0] < 'a' || text[0] > 'z')
        return false;
    for (char c : text) {
        bool ok = (c >= 'a' && c <= 'z') || is_digit(c) || c == '_' || c == '-';
        if (!ok)
            return false;
    }
    return !looks_like_cell_addr(text);
}

} // namespace litgrid
