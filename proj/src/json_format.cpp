#include "blink/json_format.hpp"

#include <cmath>
#include <cstdio>

#include "blink/error.hpp"

namespace blink {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

void dump_into(const ordered_json& j, std::string& out) {
  switch (j.type()) {
    case ordered_json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ',';
        first = false;
        out += ordered_json(key).dump();
        out += ':';
        dump_into(value, out);
      }
      out += '}';
      break;
    }
    case ordered_json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& value : j) {
        if (!first) out += ',';
        first = false;
        dump_into(value, out);
      }
      out += ']';
      break;
    }
    case ordered_json::value_t::number_float: {
      const double v = j.get<double>();
      // JSON has no nan/inf; they never appear in valid documents.
      out += std::isfinite(v) ? format_double(v) : "null";
      break;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const ordered_json& doc) {
  std::string out;
  dump_into(doc, out);
  return out;
}

ordered_json parse_json(const std::string& text, const char* what) {
  try {
    return ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    throw SchemaMismatch(std::string(what) + ": " + e.what());
  }
}

}  // namespace blink
