#include "tabgen/prompts.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#ifndef TABGEN_PROMPT_DIR
#define TABGEN_PROMPT_DIR "assets/prompts"
#endif

namespace tabgen {
namespace {

constexpr std::string_view kExampleHeader = "\nEXAMPLE:\n";

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::string python_list(const std::vector<std::string>& items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += '\'';
    for (char c : items[i]) {
      if (c == '\'' || c == '\\') out += '\\';
      out += c;
    }
    out += '\'';
  }
  return out + "]";
}

std::string placeholder_field(const std::string& name) { return "\"" + name + "\": _" + name; }

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read prompt template " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void require_description(const std::string& description) {
  if (description.empty()) throw PromptError("table description is empty");
}

// key = value pairs in schema order.
std::string key_bindings(const std::vector<std::string>& columns, const std::vector<std::string>& key_columns,
                         const std::vector<std::string>& key_values) {
  std::vector<std::string> parts;
  for (const auto& c : columns) {
    auto it = std::find(key_columns.begin(), key_columns.end(), c);
    if (it != key_columns.end()) parts.push_back(c + " = " + key_values[static_cast<std::size_t>(it - key_columns.begin())]);
  }
  return join(parts, ", ");
}

void check_keys(const std::vector<std::string>& columns, const std::vector<std::string>& key_columns,
                const std::vector<std::string>& key_values) {
  if (key_columns.empty()) throw PromptError("no key columns given");
  if (key_columns.size() != key_values.size()) {
    throw PromptError("got " + std::to_string(key_values.size()) + " key values for " +
                      std::to_string(key_columns.size()) + " key columns");
  }
  for (const auto& k : key_columns) {
    if (std::find(columns.begin(), columns.end(), k) == columns.end()) {
      throw PromptError("key column '" + k + "' is not among the table columns");
    }
  }
}

}  // namespace

std::string_view to_string(PromptKind kind) {
  switch (kind) {
    case PromptKind::full_table: return "full_table";
    case PromptKind::keys: return "keys";
    case PromptKind::row: return "row";
    case PromptKind::cell: return "cell";
  }
  return "full_table";
}

PromptKind parse_prompt_kind(std::string_view text) {
  for (auto k : {PromptKind::full_table, PromptKind::keys, PromptKind::row, PromptKind::cell}) {
    if (to_string(k) == text) return k;
  }
  throw PromptError("unknown prompt kind '" + std::string(text) + "'");
}

std::string substitute(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size() + 256);
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        const std::string name(tmpl.substr(i + 1, close - i - 1));
        auto it = values.find(name);
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
  PromptTemplates t;
  for (auto k : {PromptKind::full_table, PromptKind::keys, PromptKind::row, PromptKind::cell}) {
    t.templates_[k] = read_file(dir / (std::string(to_string(k)) + ".txt"));
  }
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    const std::string name = entry.path().filename().string();
    const std::string prefix = "wrapper.";
    if (name.starts_with(prefix) && name.ends_with(".txt") && name.size() > prefix.size() + 4) {
      std::string family = name.substr(prefix.size(), name.size() - prefix.size() - 4);
      std::string body = read_file(entry.path());
      if (!body.empty()) t.wrappers_[family] = std::move(body);
    }
  }
  return t;
}

std::filesystem::path PromptTemplates::default_dir() { return TABGEN_PROMPT_DIR; }

const std::string& PromptTemplates::text(PromptKind kind) const { return templates_.at(kind); }

std::optional<std::string> PromptTemplates::wrapper(std::string_view family) const {
  auto it = wrappers_.find(family);
  if (it == wrappers_.end()) return std::nullopt;
  return it->second;
}

RenderedPrompt PromptTemplates::render_full_table(const std::string& description,
                                                  const std::vector<std::string>& columns) const {
  require_description(description);
  if (columns.size() < 2) throw PromptError("full-table prompt needs at least 2 columns");
  std::vector<std::string> fields;
  for (const auto& c : columns) fields.push_back(placeholder_field(c));
  RenderedPrompt p;
  p.kind = PromptKind::full_table;
  p.bindings.description = description;
  p.bindings.columns = columns;
  p.text = substitute(text(PromptKind::full_table), {{"description", description},
                                                    {"num_columns", std::to_string(columns.size())},
                                                    {"column_list", python_list(columns)},
                                                    {"format_fields", join(fields, ", ")}});
  return p;
}

RenderedPrompt PromptTemplates::render_keys(const std::string& description,
                                            const std::vector<std::string>& key_columns) const {
  require_description(description);
  if (key_columns.empty()) throw PromptError("keys prompt needs at least one key column");
  std::vector<std::string> fields;
  for (const auto& c : key_columns) fields.push_back(placeholder_field(c));
  RenderedPrompt p;
  p.kind = PromptKind::keys;
  p.bindings.description = description;
  p.bindings.key_columns = key_columns;
  p.text = substitute(text(PromptKind::keys), {{"description", description},
                                              {"key_columns", join(key_columns, ", ")},
                                              {"format_fields", join(fields, ", ")}});
  return p;
}

RenderedPrompt PromptTemplates::render_row(const std::string& description, const std::vector<std::string>& columns,
                                           const std::vector<std::string>& key_columns,
                                           const std::vector<std::string>& key_values) const {
  require_description(description);
  check_keys(columns, key_columns, key_values);
  if (columns.size() <= key_columns.size()) throw PromptError("row prompt needs at least one non-key column");
  std::vector<std::string> fields;
  for (const auto& c : columns) {
    auto it = std::find(key_columns.begin(), key_columns.end(), c);
    if (it != key_columns.end()) {
      fields.push_back("\"" + c + "\": " + key_values[static_cast<std::size_t>(it - key_columns.begin())]);
    } else {
      fields.push_back(placeholder_field(c));
    }
  }
  RenderedPrompt p;
  p.kind = PromptKind::row;
  p.bindings = {description, columns, key_columns, key_values, std::nullopt};
  p.text = substitute(text(PromptKind::row), {{"description", description},
                                             {"columns", join(columns, ", ")},
                                             {"key_columns", join(key_columns, ", ")},
                                             {"key_bindings", key_bindings(columns, key_columns, key_values)},
                                             {"format_fields", join(fields, ", ")}});
  return p;
}

RenderedPrompt PromptTemplates::render_cell(const std::string& description, const std::vector<std::string>& columns,
                                            const std::vector<std::string>& key_columns,
                                            const std::vector<std::string>& key_values,
                                            const std::string& target_column) const {
  require_description(description);
  check_keys(columns, key_columns, key_values);
  if (std::find(key_columns.begin(), key_columns.end(), target_column) != key_columns.end()) {
    throw PromptError("target column '" + target_column + "' is a key column");
  }
  if (std::find(columns.begin(), columns.end(), target_column) == columns.end()) {
    throw PromptError("target column '" + target_column + "' is not among the table columns");
  }
  RenderedPrompt p;
  p.kind = PromptKind::cell;
  p.bindings = {description, columns, key_columns, key_values, target_column};
  p.text = substitute(text(PromptKind::cell), {{"description", description},
                                              {"columns", join(columns, ", ")},
                                              {"key_columns", join(key_columns, ", ")},
                                              {"key_bindings", key_bindings(columns, key_columns, key_values)},
                                              {"target_column", target_column},
                                              {"format_fields", placeholder_field(target_column)}});
  return p;
}

RenderedPrompt augment_with_example(const RenderedPrompt& prompt, const std::vector<ColumnSpec>& schema,
                                    const Row& example_row) {
  if (prompt.has_example) throw PromptError("prompt already carries an example row");
  if (example_row.size() != schema.size()) throw PromptError("example row does not match the table schema");

  auto value_of = [&](const std::string& column) -> nlohmann::ordered_json {
    for (std::size_t i = 0; i < schema.size(); ++i) {
      if (schema[i].name == column) {
        return example_row[i] ? nlohmann::ordered_json(*example_row[i]) : nlohmann::ordered_json(nullptr);
      }
    }
    throw PromptError("example row has no column '" + column + "'");
  };
  auto object_of = [&](const std::vector<std::string>& columns) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (const auto& c : columns) obj[c] = value_of(c);
    return obj;
  };

  nlohmann::ordered_json block;
  switch (prompt.kind) {
    case PromptKind::full_table:
      block = nlohmann::ordered_json::array({object_of(prompt.bindings.columns)});
      break;
    case PromptKind::keys:
      block = nlohmann::ordered_json::array({object_of(prompt.bindings.key_columns)});
      break;
    case PromptKind::row:
      block = object_of(prompt.bindings.columns);
      break;
    case PromptKind::cell:
      block = object_of({*prompt.bindings.target_column});
      break;
  }

  RenderedPrompt out = prompt;
  out.text += kExampleHeader;
  out.text += block.dump();
  out.text += '\n';
  out.has_example = true;
  return out;
}

std::string apply_wrapper(std::string_view wrapper, std::string_view prompt) {
  if (wrapper.empty()) return std::string(prompt);
  return substitute(wrapper, {{"prompt", std::string(prompt)}});
}

}  // namespace tabgen
