#include "tabgen/json_extract.hpp"

#include <cmath>
#include <optional>

#include "tabgen/matching.hpp"

namespace tabgen {
namespace {

using nlohmann::json;

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

void skip_ws(std::string_view s, std::size_t& pos) {
  while (pos < s.size() && is_ws(s[pos])) ++pos;
}

// Index one past the bracket closing the one at `start`, honoring strings.
std::optional<std::size_t> balanced_end(std::string_view s, std::size_t start) {
  std::vector<char> stack;
  bool in_string = false;
  for (std::size_t i = start; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '[' || c == '{') {
      stack.push_back(c == '[' ? ']' : '}');
    } else if (c == ']' || c == '}') {
      if (stack.empty() || stack.back() != c) return std::nullopt;
      stack.pop_back();
      if (stack.empty()) return i + 1;
    }
  }
  return std::nullopt;
}

// End of a JSON string literal starting at `start` (a quote), one past the
// closing quote.
std::optional<std::size_t> string_end(std::string_view s, std::size_t start) {
  for (std::size_t i = start + 1; i < s.size(); ++i) {
    if (s[i] == '\\') {
      ++i;
    } else if (s[i] == '"') {
      return i + 1;
    }
  }
  return std::nullopt;
}

const json* find_field(const json& obj, const std::string& column) {
  auto it = obj.find(column);
  if (it != obj.end()) return &*it;
  const std::string wanted = normalize_text(column);
  for (auto jt = obj.begin(); jt != obj.end(); ++jt) {
    if (normalize_text(jt.key()) == wanted) return &*jt;
  }
  return nullptr;
}

Row object_to_row(const json& obj, const std::vector<std::string>& columns) {
  Row row;
  row.reserve(columns.size());
  for (const auto& c : columns) {
    const json* v = find_field(obj, c);
    row.push_back(v ? json_scalar_to_cell(*v) : CellValue{});
  }
  return row;
}

std::optional<std::vector<Row>> rows_from_array(const json& arr, const std::vector<std::string>& columns) {
  std::vector<Row> rows;
  bool any_usable = arr.empty();
  for (const auto& item : arr) {
    if (item.is_object()) {
      rows.push_back(object_to_row(item, columns));
      any_usable = true;
    } else if (item.is_array() && item.size() == columns.size()) {
      Row row;
      for (const auto& v : item) row.push_back(json_scalar_to_cell(v));
      rows.push_back(std::move(row));
      any_usable = true;
    } else if (columns.size() == 1 && !item.is_structured()) {
      rows.push_back(Row{json_scalar_to_cell(item)});
      any_usable = true;
    }
  }
  if (!any_usable) return std::nullopt;
  return rows;
}

// Shape acceptance for one parsed candidate.
std::optional<std::vector<Row>> accept(const json& value, JsonShape shape, const std::vector<std::string>& columns) {
  if (shape == JsonShape::object) {
    if (value.is_object()) return std::vector<Row>{object_to_row(value, columns)};
    if (value.is_array() && !value.empty() && value.front().is_object()) {
      return std::vector<Row>{object_to_row(value.front(), columns)};
    }
    return std::nullopt;
  }
  if (value.is_array()) return rows_from_array(value, columns);
  if (value.is_object()) {
    for (const auto& member : value) {
      if (member.is_array() && !member.empty() && member.front().is_object()) return rows_from_array(member, columns);
    }
    return std::vector<Row>{object_to_row(value, columns)};
  }
  return std::nullopt;
}

std::optional<std::vector<Row>> strict_pass(std::string_view text, JsonShape shape,
                                            const std::vector<std::string>& columns) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '[' && text[i] != '{') continue;
    const auto end = balanced_end(text, i);
    if (!end) continue;
    json value = json::parse(text.substr(i, *end - i), nullptr, false);
    if (value.is_discarded()) continue;
    if (auto rows = accept(value, shape, columns)) return rows;
  }
  return std::nullopt;
}

// An unquoted member name: a run without separators that ends in ':'.
bool starts_bare_key(std::string_view s, std::size_t pos) {
  const auto colon = s.find(':', pos);
  if (colon == std::string_view::npos || colon == pos) return false;
  return s.substr(pos, colon - pos).find_first_of("{}[],\"\n") == std::string_view::npos;
}

// {"k": bare value, "k2": "quoted"}; returns the object and advances pos.
std::optional<json> lenient_object(std::string_view s, std::size_t& pos) {
  if (pos >= s.size() || s[pos] != '{') return std::nullopt;
  ++pos;
  json obj = json::object();
  for (;;) {
    skip_ws(s, pos);
    if (pos >= s.size()) return std::nullopt;
    if (s[pos] == '}') {
      ++pos;
      break;
    }
    std::string key;
    if (s[pos] == '"') {
      const auto end = string_end(s, pos);
      if (!end) return std::nullopt;
      json k = json::parse(s.substr(pos, *end - pos), nullptr, false);
      if (k.is_discarded()) return std::nullopt;
      key = k.get<std::string>();
      pos = *end;
    } else {
      const auto colon = s.find(':', pos);
      if (colon == std::string_view::npos) return std::nullopt;
      auto raw = s.substr(pos, colon - pos);
      while (!raw.empty() && is_ws(raw.back())) raw.remove_suffix(1);
      if (raw.empty() || raw.find_first_of("{}[],\"\n") != std::string_view::npos) return std::nullopt;
      key = std::string(raw);
      pos = colon;
    }
    skip_ws(s, pos);
    if (pos >= s.size() || s[pos] != ':') return std::nullopt;
    ++pos;
    skip_ws(s, pos);
    if (pos >= s.size()) return std::nullopt;

    json value;
    if (s[pos] == '"') {
      const auto end = string_end(s, pos);
      if (!end) return std::nullopt;
      value = json::parse(s.substr(pos, *end - pos), nullptr, false);
      if (value.is_discarded()) return std::nullopt;
      pos = *end;
    } else if (s[pos] == '{' || s[pos] == '[') {
      const auto end = balanced_end(s, pos);
      if (!end) return std::nullopt;
      value = json::parse(s.substr(pos, *end - pos), nullptr, false);
      if (value.is_discarded()) value = std::string(s.substr(pos, *end - pos));
      pos = *end;
    } else {
      // Bare value: runs to '}' or to a comma that starts the next member.
      std::size_t end = pos;
      while (end < s.size()) {
        if (s[end] == '}' || s[end] == '\n') break;
        if (s[end] == ',') {
          std::size_t look = end + 1;
          skip_ws(s, look);
          if (look >= s.size() || s[look] == '"' || s[look] == '}' || starts_bare_key(s, look)) break;
        }
        ++end;
      }
      auto raw = s.substr(pos, end - pos);
      while (!raw.empty() && is_ws(raw.back())) raw.remove_suffix(1);
      if (raw == "null") {
        value = nullptr;
      } else {
        json parsed = json::parse(raw, nullptr, false);
        value = (!parsed.is_discarded() && parsed.is_primitive()) ? parsed : json(std::string(raw));
      }
      pos = end;
    }
    obj[key] = std::move(value);
    skip_ws(s, pos);
    if (pos < s.size() && s[pos] == ',') {
      ++pos;
      continue;
    }
    if (pos < s.size() && s[pos] == '}') {
      ++pos;
      break;
    }
    return std::nullopt;
  }
  if (obj.empty()) return std::nullopt;
  return obj;
}

std::optional<json> lenient_list(std::string_view s, std::size_t& pos) {
  if (pos >= s.size() || s[pos] != '[') return std::nullopt;
  ++pos;
  json arr = json::array();
  for (;;) {
    skip_ws(s, pos);
    if (pos >= s.size()) return std::nullopt;
    if (s[pos] == ']') {
      ++pos;
      break;
    }
    auto obj = lenient_object(s, pos);
    if (!obj) return std::nullopt;
    arr.push_back(std::move(*obj));
    skip_ws(s, pos);
    if (pos < s.size() && s[pos] == ',') {
      ++pos;
      continue;
    }
    if (pos < s.size() && s[pos] == ']') {
      ++pos;
      break;
    }
    return std::nullopt;
  }
  if (arr.empty()) return std::nullopt;
  return arr;
}

std::optional<std::vector<Row>> lenient_pass(std::string_view text, JsonShape shape,
                                             const std::vector<std::string>& columns) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    std::size_t pos = i;
    if (text[i] == '[') {
      if (auto arr = lenient_list(text, pos)) {
        if (auto rows = accept(*arr, shape, columns)) return rows;
      }
    } else if (text[i] == '{') {
      if (auto obj = lenient_object(text, pos)) {
        if (auto rows = accept(*obj, shape, columns)) return rows;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

CellValue json_scalar_to_cell(const json& value) {
  switch (value.type()) {
    case json::value_t::null: return std::nullopt;
    case json::value_t::string: return value.get<std::string>();
    case json::value_t::boolean: return value.get<bool>() ? "true" : "false";
    case json::value_t::number_integer: return std::to_string(value.get<std::int64_t>());
    case json::value_t::number_unsigned: return std::to_string(value.get<std::uint64_t>());
    case json::value_t::number_float: {
      const double d = value.get<double>();
      if (std::isfinite(d) && std::floor(d) == d && std::fabs(d) < 9.0e15) {
        return std::to_string(static_cast<std::int64_t>(d));
      }
      return value.dump();
    }
    default: return value.dump();
  }
}

ExtractedPayload extract_json_payload(std::string_view text, JsonShape shape,
                                      const std::vector<std::string>& columns) {
  ExtractedPayload out;
  auto rows = strict_pass(text, shape, columns);
  if (!rows) rows = lenient_pass(text, shape, columns);
  if (!rows) {
    out.failure = shape == JsonShape::list ? "no JSON list found in response" : "no JSON object found in response";
    return out;
  }
  out.ok = true;
  out.rows = std::move(*rows);
  return out;
}

}  // namespace tabgen
