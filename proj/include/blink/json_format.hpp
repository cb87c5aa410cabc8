#pragma once

#include <string>

#include <json.hpp>

namespace blink {

using ordered_json = nlohmann::ordered_json;

// "%.17g", with non-finite values spelled nan/inf.
std::string format_double(double value);

// Compact single-line dump with every floating-point number in 17
// significant digits. Output is byte-stable for equal documents.
std::string dump_json(const ordered_json& doc);

// Parses a JSON document, rethrowing syntax errors as SchemaMismatch.
ordered_json parse_json(const std::string& text, const char* what);

}  // namespace blink
