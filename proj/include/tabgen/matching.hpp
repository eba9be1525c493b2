#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tabgen/table.hpp"

namespace tabgen {

struct CanonicalDate {
  int year = 0;
  unsigned month = 0;
  unsigned day = 0;

  auto operator<=>(const CanonicalDate&) const = default;
};

// Date patterns use the tokens YYYY, MM, M, DD, D, Do (day with an ordinal
// suffix), MMMM (month name, full or abbreviated). A space matches one or
// more whitespace characters; any other character matches itself
// (letters case-insensitively).
std::vector<std::string> default_date_formats();

struct MatchRule {
  // Allowed error as a fraction of |gold|.
  double numeric_rel_tolerance = 0.001;
  // Compared against the lowercased, trimmed value.
  std::set<std::string> nullish_aliases{"", "none", "n/a", "nan"};
  std::vector<std::string> date_formats = default_date_formats();
  // Key cells counted inside the overall (tau) score go through cells_match
  // when true, or exact normalized-text equality when false.
  bool fuzzy_key_cells = true;

  // Throws ConfigError on negative tolerance or an unparseable date pattern.
  void validate() const;
};

// Lowercase and drop every non-alphanumeric ASCII byte. Bytes >= 0x80
// (UTF-8 sequences) are kept so non-Latin text is still comparable.
std::string normalize_text(std::string_view s);

// Key cells are compared by normalized text only.
inline std::string normalize_for_key(std::string_view s) { return normalize_text(s); }

// Grammar: [+-]? (digits | 1-3 digits (,ddd)+)? (. digits)? %?
// At least one digit is required; a trailing % divides by 100.
std::optional<double> parse_number(std::string_view s);

std::optional<CanonicalDate> parse_date(std::string_view s,
                                        const std::vector<std::string>& formats = default_date_formats());

bool is_nullish(const CellValue& value, const MatchRule& rule = {});

// Cascade: null, then date, then number (tolerance anchored on gold), then
// normalized text.
bool cells_match(const CellValue& pred, const CellValue& gold, const MatchRule& rule = {});

}  // namespace tabgen
