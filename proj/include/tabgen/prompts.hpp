#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tabgen/error.hpp"
#include "tabgen/table.hpp"

namespace tabgen {

class PromptError : public Error {
 public:
  using Error::Error;
};

enum class PromptKind { full_table, keys, row, cell };

std::string_view to_string(PromptKind kind);
PromptKind parse_prompt_kind(std::string_view text);

struct PromptBindings {
  std::string description;
  std::vector<std::string> columns;
  std::vector<std::string> key_columns;
  std::vector<std::string> key_values;
  std::optional<std::string> target_column;
};

struct RenderedPrompt {
  PromptKind kind = PromptKind::full_table;
  std::string text;
  PromptBindings bindings;
  bool has_example = false;
};

// Replaces every {name} whose name is in `values`; other braces are kept
// verbatim. Substituted text is not rescanned.
std::string substitute(std::string_view tmpl, const std::map<std::string, std::string>& values);

// Template assets: full_table.txt, keys.txt, row.txt, cell.txt and optional
// wrapper.<family>.txt files containing a {prompt} placeholder.
class PromptTemplates {
 public:
  static PromptTemplates load(const std::filesystem::path& dir);
  // Directory baked in at build time.
  static std::filesystem::path default_dir();

  const std::string& text(PromptKind kind) const;
  // Empty wrappers are treated as absent.
  std::optional<std::string> wrapper(std::string_view family) const;

  RenderedPrompt render_full_table(const std::string& description, const std::vector<std::string>& columns) const;
  RenderedPrompt render_keys(const std::string& description, const std::vector<std::string>& key_columns) const;
  // key_values[i] belongs to key_columns[i]. The key = value list and the
  // pre-filled response format follow the order of `columns`.
  RenderedPrompt render_row(const std::string& description, const std::vector<std::string>& columns,
                            const std::vector<std::string>& key_columns,
                            const std::vector<std::string>& key_values) const;
  RenderedPrompt render_cell(const std::string& description, const std::vector<std::string>& columns,
                             const std::vector<std::string>& key_columns, const std::vector<std::string>& key_values,
                             const std::string& target_column) const;

 private:
  std::map<PromptKind, std::string> templates_;
  std::map<std::string, std::string, std::less<>> wrappers_;
};

// Appends an EXAMPLE block with `example_row` rendered in the JSON shape the
// prompt's response format asks for. Throws PromptError on a second call.
RenderedPrompt augment_with_example(const RenderedPrompt& prompt, const std::vector<ColumnSpec>& schema,
                                    const Row& example_row);

std::string apply_wrapper(std::string_view wrapper, std::string_view prompt);

}  // namespace tabgen
