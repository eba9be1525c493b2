#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabgen/table.hpp"

namespace tabgen {

enum class JsonShape { list, object };

struct ExtractedPayload {
  bool ok = false;
  std::string failure;
  // One entry per extracted object, aligned with the requested columns.
  // Object shape yields exactly one row on success.
  std::vector<Row> rows;
};

// Locates the first JSON value of the expected shape inside free text (prose,
// code fences). A list may also be given as a single object; an object may
// come wrapped in a one-element list. When no strict JSON is present, a
// lenient pass accepts objects whose values are unquoted, e.g.
// {"year": 1987, "venue": Rome}.
//
// Field values become text: strings verbatim, integral numbers without a
// fractional part, other numbers in shortest round-trip form, booleans as
// true/false, nested values as compact JSON, null as a null cell. Declared
// columns absent from an object are null; extra fields are ignored.
ExtractedPayload extract_json_payload(std::string_view text, JsonShape shape,
                                      const std::vector<std::string>& columns);

// Stringification rule above, exposed for reuse.
CellValue json_scalar_to_cell(const nlohmann::json& value);

}  // namespace tabgen
