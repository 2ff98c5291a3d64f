#pragma once

#include "litgrid/model.hpp"

#include <string>
#include <string_view>
#include <variant>

namespace litgrid {

enum class ErrorKind { Div0, Value, Name, Ref, Cycle, Parse };

std::string_view to_string(ErrorKind kind); // "DIV0", "VALUE", ...

struct ErrorValue {
    ErrorKind kind = ErrorKind::Value;
    bool operator==(const ErrorValue&) const = default;
};

/// Result of evaluating a node. Numbers are always finite.
using Value = std::variant<double, std::string, bool, Empty, ErrorValue>;

inline bool is_error(const Value& v) { return std::holds_alternative<ErrorValue>(v); }
inline Value error_value(ErrorKind kind) { return ErrorValue{kind}; }

/// Value held by a non-formula cell.
Value literal_value(const ParsedCell& parsed);

/// Shortest decimal text that round-trips the double, capped at 15
/// significant digits. Negative zero prints as "0".
std::string format_number(double v);

/// Display text shared by weave, the CLI and JSON-adjacent views:
/// numbers via format_number, TRUE/FALSE, "" for Empty, `#DIV0` style errors.
std::string format_value(const Value& v);

/// Bitwise equality (numbers compared by representation).
bool identical(const Value& a, const Value& b);

} // namespace litgrid
