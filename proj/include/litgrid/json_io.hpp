#pragma once

#include "litgrid/engine.hpp"
#include "litgrid/model.hpp"

#include "json.hpp"

#include <string>

namespace litgrid {

using Json = nlohmann::json;

/// Canonical values encoding: keys ascending, numbers in the shortest form
/// that round-trips (at most 15 significant digits).
/// `{"values":{key:{"t":..,"v":..}},"diagnostics":[...]}`
std::string values_to_json(const EvalResult& r);

/// Same encoding as a single value inside values_to_json.
std::string value_to_json(const Value& v);

Json diagnostic_to_json(const Diagnostic& d);
Json diagnostics_to_json(const std::vector<Diagnostic>& diags);

Json chunk_to_json(const Chunk& c);
Json document_to_json(const Document& doc);

/// Throws Error(BadEdit) for malformed input.
ChunkBody chunk_body_from_json(const Json& j);
Chunk chunk_from_json(const Json& j);
Edit edit_from_json(const Json& j);

/// UTF-8 safe dump; invalid bytes are replaced rather than thrown on.
std::string dump_json(const Json& j, int indent = -1);

} // namespace litgrid
