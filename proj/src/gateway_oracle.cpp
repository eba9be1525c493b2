#include <string_view>

#include "tabgen/gateway.hpp"
#include "tabgen/util.hpp"

namespace tabgen {
namespace {

using ojson = nlohmann::ordered_json;

constexpr std::string_view kCellMarker = "For the table row whose key is (";
constexpr std::string_view kCellTail = ") what is the value of attribute ";
constexpr std::string_view kRowMarker = "Retrieve a single row whose key is (";
constexpr std::string_view kRowTail = ").\nThe response will be formatted";
constexpr std::string_view kResponseLine = ".\nThe response will be formatted";
constexpr std::string_view kKeysMarker = " entities for the table.";
constexpr std::string_view kFullMarker = "fields: [";

ojson cell_json(const CellValue& v) { return v ? ojson(*v) : ojson(nullptr); }

[[noreturn]] void unrecognized(std::string_view why) {
  throw GatewayError(GatewayErrorKind::unrecognized_prompt, std::string(why));
}

// Splits "k1 = v1, k2 = v2" using the known key names in schema order.
std::vector<std::string> parse_bindings(std::string_view text, const std::vector<std::string>& keys) {
  std::vector<std::string> values;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const std::string head = keys[i] + " = ";
    if (text.substr(pos, head.size()) != head) unrecognized("key binding for '" + keys[i] + "' not found");
    pos += head.size();
    std::size_t end = text.size();
    if (i + 1 < keys.size()) {
      end = text.find(", " + keys[i + 1] + " = ", pos);
      if (end == std::string_view::npos) unrecognized("key binding for '" + keys[i + 1] + "' not found");
    }
    values.emplace_back(text.substr(pos, end - pos));
    pos = end == text.size() ? end : end + 2;
  }
  return values;
}

std::string_view between(std::string_view text, std::string_view open, std::string_view close) {
  const auto a = text.find(open);
  if (a == std::string_view::npos) return {};
  const auto start = a + open.size();
  const auto b = text.find(close, start);
  if (b == std::string_view::npos) return {};
  return text.substr(start, b - start);
}

}  // namespace

OracleClient::OracleClient(OracleSpec spec) : spec_(std::move(spec)) {
  const nlohmann::json fingerprint{{"columns", columns_to_json(spec_.gold.columns())},
                                   {"rows", rows_to_json(spec_.gold)}};
  identity_ = "oracle:p=" + nlohmann::json(spec_.corruption_rate).dump() + ":seed=" + std::to_string(spec_.seed) +
              ":gold=" + sha256_hex(fingerprint.dump()).substr(0, 16);
}

bool OracleClient::is_corrupted(const std::vector<std::string>& raw_key, const std::string& column) const {
  if (spec_.corruption_rate <= 0.0) return false;
  std::uint64_t h = splitmix64(spec_.seed);
  for (const auto& part : raw_key) h = fnv1a64(part, h ^ 0x1f);
  h = splitmix64(fnv1a64(column, h ^ 0x1e));
  return unit_interval(h) < spec_.corruption_rate;
}

std::string OracleClient::corrupt(const CellValue& value) { return "WRONG<" + value.value_or("") + ">"; }

LlmResponse OracleClient::complete(const LlmRequest& request) {
  const std::string_view prompt = request.user_message;
  const auto& gold = spec_.gold;
  const auto keys = gold.key_column_names();
  const auto columns = gold.column_names();

  auto raw_key_of = [&](const Row& row) {
    std::vector<std::string> k;
    for (auto i : gold.key_indices()) k.push_back(row[i].value_or(""));
    return k;
  };
  auto find_row = [&](const std::vector<std::string>& values) -> const Row* {
    for (const auto& row : gold.rows()) {
      if (raw_key_of(row) == values) return &row;
    }
    Row probe(gold.num_cols());
    for (std::size_t i = 0; i < values.size(); ++i) probe[gold.key_indices()[i]] = values[i];
    const auto wanted = key_tuple(probe, gold.key_indices(), RowOrigin::generated);
    for (const auto& row : gold.rows()) {
      if (key_tuple(row, gold.key_indices(), RowOrigin::gold) == wanted) return &row;
    }
    return nullptr;
  };
  auto emit_value = [&](const Row* row, std::size_t col) -> ojson {
    if (!row) return ojson(nullptr);
    if (gold.columns()[col].is_key) return cell_json((*row)[col]);
    if (is_corrupted(raw_key_of(*row), gold.columns()[col].name)) return ojson(corrupt((*row)[col]));
    return cell_json((*row)[col]);
  };

  ojson answer;
  if (prompt.find(kCellMarker) != std::string_view::npos && prompt.find(kCellTail) != std::string_view::npos) {
    const auto values = parse_bindings(between(prompt, kCellMarker, kCellTail), keys);
    const std::string target(between(prompt, kCellTail, kResponseLine));
    const auto col = gold.column_index(target);
    if (!col || gold.columns()[*col].is_key) unrecognized("unknown target column '" + target + "'");
    answer = ojson::object();
    answer[target] = emit_value(find_row(values), *col);
  } else if (prompt.find(kRowMarker) != std::string_view::npos) {
    const auto values = parse_bindings(between(prompt, kRowMarker, kRowTail), keys);
    const Row* row = find_row(values);
    answer = ojson::object();
    std::size_t k = 0;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      answer[columns[c]] = gold.columns()[c].is_key ? ojson(values[k++]) : emit_value(row, c);
    }
  } else if (prompt.find(kKeysMarker) != std::string_view::npos) {
    answer = ojson::array();
    for (const auto& row : gold.rows()) {
      ojson obj = ojson::object();
      for (auto i : gold.key_indices()) obj[columns[i]] = cell_json(row[i]);
      answer.push_back(std::move(obj));
    }
  } else if (prompt.find(kFullMarker) != std::string_view::npos) {
    answer = ojson::array();
    for (const auto& row : gold.rows()) {
      ojson obj = ojson::object();
      for (std::size_t c = 0; c < columns.size(); ++c) obj[columns[c]] = emit_value(&row, c);
      answer.push_back(std::move(obj));
    }
  } else {
    unrecognized("prompt matches none of the four templates");
  }

  LlmResponse r;
  r.text = answer.dump();
  r.input_tokens = count_tokens(request.system_message) + count_tokens(request.user_message);
  r.output_tokens = count_tokens(r.text);
  return r;
}

}  // namespace tabgen
