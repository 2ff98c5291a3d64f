#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace litgrid {

enum class ErrorCode {
    UnknownTheme,
    UnknownChunk,
    BadIndex,
    GridBoundsExceeded,
    IdCollision,
    InvalidId,
    ParseError,
    UnknownFunction,
    UnknownRef,
    UnresolvedContext,
    UnknownTemplate,
    EmptyLibrary,
    UnterminatedFence,
    CsvError,
    BadEdit,
    Io,
};

std::string_view to_string(ErrorCode code);

/// Fatal error raised by the library. Recoverable problems are reported as
/// Diagnostic values instead.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Error with a source position: a byte offset for expressions, a 1-based
/// line (and optionally column) for files.
class PositionedError : public Error {
public:
    PositionedError(ErrorCode code, const std::string& message, std::size_t offset,
                    std::optional<int> line = std::nullopt, std::optional<int> column = std::nullopt)
        : Error(code, message), offset_(offset), line_(line), column_(column) {}

    std::size_t offset() const noexcept { return offset_; }
    std::optional<int> line() const noexcept { return line_; }
    std::optional<int> column() const noexcept { return column_; }

private:
    std::size_t offset_;
    std::optional<int> line_;
    std::optional<int> column_;
};

} // namespace litgrid
