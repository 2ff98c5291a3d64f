#include "litgrid/value.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>

namespace litgrid {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Div0: return "DIV0";
    case ErrorKind::Value: return "VALUE";
    case ErrorKind::Name: return "NAME";
    case ErrorKind::Ref: return "REF";
    case ErrorKind::Cycle: return "CYCLE";
    case ErrorKind::Parse: return "PARSE";
    }
    return "VALUE";
}

Value literal_value(const ParsedCell& parsed) {
    return std::visit(
        [](const auto& p) -> Value {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, FormulaCell>)
                return error_value(ErrorKind::Parse);
            else
                return p;
        },
        parsed);
}

std::string format_number(double v) {
    if (v == 0)
        return "0";
    char buf[40];
    for (int precision = 1; precision <= 15; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) {
            // %g goes scientific once the exponent reaches the precision;
            // keep integers below 1e15 in plain form (10, not 1e+01).
            int exponent = static_cast<int>(std::floor(std::log10(std::fabs(v))));
            if (exponent >= precision && exponent < 15)
                std::snprintf(buf, sizeof buf, "%.*g", exponent + 1, v);
            return buf;
        }
    }
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

std::string format_value(const Value& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, double>)
                return format_number(x);
            else if constexpr (std::is_same_v<T, std::string>)
                return x;
            else if constexpr (std::is_same_v<T, bool>)
                return x ? "TRUE" : "FALSE";
            else if constexpr (std::is_same_v<T, Empty>)
                return "";
            else
                return "#" + std::string(to_string(x.kind));
        },
        v);
}

bool identical(const Value& a, const Value& b) {
    if (a.index() != b.index())
        return false;
    if (auto* x = std::get_if<double>(&a))
        return std::bit_cast<std::uint64_t>(*x) == std::bit_cast<std::uint64_t>(std::get<double>(b));
    return a == b;
}

} // namespace litgrid
