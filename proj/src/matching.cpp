#include "tabgen/matching.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <string>

#include "tabgen/error.hpp"

namespace tabgen {
namespace {

bool is_ascii_alnum(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string lower_copy(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = lower(c);
  return out;
}

constexpr std::array<std::string_view, 12> kMonthNames{
    "january", "february", "march",     "april",   "may",      "june",
    "july",    "august",   "september", "october", "november", "december"};

std::optional<unsigned> month_from_name(std::string_view word) {
  const std::string w = lower_copy(word);
  if (w == "sept") return 9;
  for (unsigned i = 0; i < kMonthNames.size(); ++i) {
    if (w == kMonthNames[i] || (w.size() == 3 && kMonthNames[i].substr(0, 3) == w)) return i + 1;
  }
  return std::nullopt;
}

enum class TokenKind { year, month_number, month_name, day, day_ordinal, space, literal };

struct PatternToken {
  TokenKind kind;
  char literal = 0;
};

std::optional<std::vector<PatternToken>> compile_pattern(std::string_view pattern) {
  std::vector<PatternToken> tokens;
  std::size_t i = 0;
  auto starts = [&](std::string_view tok) { return pattern.substr(i, tok.size()) == tok; };
  while (i < pattern.size()) {
    if (starts("YYYY")) {
      tokens.push_back({TokenKind::year});
      i += 4;
    } else if (starts("MMMM")) {
      tokens.push_back({TokenKind::month_name});
      i += 4;
    } else if (starts("MM")) {
      tokens.push_back({TokenKind::month_number});
      i += 2;
    } else if (starts("Do")) {
      tokens.push_back({TokenKind::day_ordinal});
      i += 2;
    } else if (starts("DD")) {
      tokens.push_back({TokenKind::day});
      i += 2;
    } else if (pattern[i] == 'M') {
      tokens.push_back({TokenKind::month_number});
      i += 1;
    } else if (pattern[i] == 'D') {
      tokens.push_back({TokenKind::day});
      i += 1;
    } else if (pattern[i] == 'Y') {
      return std::nullopt;
    } else if (is_space(pattern[i])) {
      while (i < pattern.size() && is_space(pattern[i])) ++i;
      tokens.push_back({TokenKind::space});
    } else {
      tokens.push_back({TokenKind::literal, pattern[i]});
      i += 1;
    }
  }
  bool has_year = false, has_month = false, has_day = false;
  for (const auto& t : tokens) {
    has_year |= t.kind == TokenKind::year;
    has_month |= t.kind == TokenKind::month_number || t.kind == TokenKind::month_name;
    has_day |= t.kind == TokenKind::day || t.kind == TokenKind::day_ordinal;
  }
  if (!has_year || !has_month || !has_day) return std::nullopt;
  return tokens;
}

// Reads 1-2 digits.
std::optional<unsigned> read_small_number(std::string_view s, std::size_t& pos) {
  std::size_t start = pos;
  while (pos < s.size() && pos - start < 2 && is_digit(s[pos])) ++pos;
  if (pos == start) return std::nullopt;
  unsigned v = 0;
  for (std::size_t k = start; k < pos; ++k) v = v * 10 + static_cast<unsigned>(s[k] - '0');
  return v;
}

std::optional<CanonicalDate> match_pattern(std::string_view s, const std::vector<PatternToken>& tokens) {
  std::size_t pos = 0;
  std::optional<int> year;
  std::optional<unsigned> month, day;
  char previous_literal = 0;
  for (const auto& tok : tokens) {
    switch (tok.kind) {
      case TokenKind::year: {
        if (pos + 4 > s.size()) return std::nullopt;
        int v = 0;
        for (std::size_t k = pos; k < pos + 4; ++k) {
          if (!is_digit(s[k])) return std::nullopt;
          v = v * 10 + (s[k] - '0');
        }
        pos += 4;
        if (pos < s.size() && is_digit(s[pos])) return std::nullopt;
        year = v;
        break;
      }
      case TokenKind::month_number:
        month = read_small_number(s, pos);
        if (!month) return std::nullopt;
        break;
      case TokenKind::day:
        day = read_small_number(s, pos);
        if (!day) return std::nullopt;
        break;
      case TokenKind::day_ordinal: {
        day = read_small_number(s, pos);
        if (!day || pos + 2 > s.size()) return std::nullopt;
        const std::string suffix = lower_copy(s.substr(pos, 2));
        if (suffix != "st" && suffix != "nd" && suffix != "rd" && suffix != "th") return std::nullopt;
        pos += 2;
        break;
      }
      case TokenKind::month_name: {
        std::size_t start = pos;
        while (pos < s.size() && is_alpha(s[pos])) ++pos;
        month = month_from_name(s.substr(start, pos - start));
        if (!month) return std::nullopt;
        if (pos < s.size() && s[pos] == '.') ++pos;
        break;
      }
      case TokenKind::space: {
        std::size_t start = pos;
        while (pos < s.size() && is_space(s[pos])) ++pos;
        if (pos == start && previous_literal != ',') return std::nullopt;
        break;
      }
      case TokenKind::literal:
        if (pos >= s.size() || lower(s[pos]) != lower(tok.literal)) return std::nullopt;
        ++pos;
        break;
    }
    previous_literal = tok.kind == TokenKind::literal ? tok.literal : 0;
  }
  if (pos != s.size()) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{*year}, std::chrono::month{*month},
                                        std::chrono::day{*day}};
  if (!ymd.ok()) return std::nullopt;
  return CanonicalDate{*year, *month, *day};
}

}  // namespace

std::vector<std::string> default_date_formats() {
  return {"YYYY-MM-DD", "Do, MMMM, YYYY", "MMMM D, YYYY", "D MMMM YYYY", "MM/DD/YYYY",
          "YYYY/MM/DD", "Do MMMM YYYY",   "D MMMM, YYYY", "MMMM Do, YYYY"};
}

void MatchRule::validate() const {
  if (!(numeric_rel_tolerance >= 0.0) || !std::isfinite(numeric_rel_tolerance)) {
    throw ConfigError("numeric tolerance must be a non-negative finite number");
  }
  for (const auto& f : date_formats) {
    if (!compile_pattern(f)) throw ConfigError("invalid date pattern: '" + f + "'");
  }
}

std::string normalize_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80) {
      out.push_back(ch);
    } else if (is_ascii_alnum(c)) {
      out.push_back(lower(ch));
    }
  }
  return out;
}

std::optional<double> parse_number(std::string_view text) {
  const std::string_view s = trim(text);
  std::size_t pos = 0;
  std::string digits;
  if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    if (s[pos] == '-') digits.push_back('-');
    ++pos;
  }

  // Integer part: plain digits, or 1-3 digits followed by ,ddd groups.
  std::size_t int_start = pos;
  while (pos < s.size() && is_digit(s[pos])) ++pos;
  std::size_t lead = pos - int_start;
  digits.append(s.substr(int_start, lead));
  if (pos < s.size() && s[pos] == ',') {
    if (lead == 0 || lead > 3) return std::nullopt;
    while (pos < s.size() && s[pos] == ',') {
      if (pos + 4 > s.size()) return std::nullopt;
      for (std::size_t k = pos + 1; k < pos + 4; ++k) {
        if (!is_digit(s[k])) return std::nullopt;
      }
      digits.append(s.substr(pos + 1, 3));
      pos += 4;
      if (pos < s.size() && is_digit(s[pos])) return std::nullopt;
    }
  }
  std::size_t frac_digits = 0;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    std::size_t frac_start = pos;
    while (pos < s.size() && is_digit(s[pos])) ++pos;
    frac_digits = pos - frac_start;
    if (frac_digits == 0) return std::nullopt;
    digits.push_back('.');
    digits.append(s.substr(frac_start, frac_digits));
  }
  if (lead == 0 && frac_digits == 0) return std::nullopt;
  bool percent = false;
  if (pos < s.size() && s[pos] == '%') {
    percent = true;
    ++pos;
  }
  if (pos != s.size()) return std::nullopt;

  double value = 0.0;
  const char* first = digits.data();
  const char* last = digits.data() + digits.size();
  if (lead == 0) {
    // from_chars rejects a bare ".5"; give it a leading zero.
    digits.insert(digits.front() == '-' ? 1 : 0, "0");
    first = digits.data();
    last = digits.data() + digits.size();
  }
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return percent ? value / 100.0 : value;
}

std::optional<CanonicalDate> parse_date(std::string_view text, const std::vector<std::string>& formats) {
  const std::string_view s = trim(text);
  if (s.empty()) return std::nullopt;
  for (const auto& f : formats) {
    const auto tokens = compile_pattern(f);
    if (!tokens) continue;
    if (auto d = match_pattern(s, *tokens)) return d;
  }
  return std::nullopt;
}

bool is_nullish(const CellValue& value, const MatchRule& rule) {
  if (!value) return true;
  return rule.nullish_aliases.contains(lower_copy(trim(*value)));
}

bool cells_match(const CellValue& pred, const CellValue& gold, const MatchRule& rule) {
  const bool pred_null = is_nullish(pred, rule);
  const bool gold_null = is_nullish(gold, rule);
  if (pred_null || gold_null) return pred_null && gold_null;

  const auto pred_date = parse_date(*pred, rule.date_formats);
  const auto gold_date = parse_date(*gold, rule.date_formats);
  if (pred_date && gold_date) return *pred_date == *gold_date;

  const auto pred_num = parse_number(*pred);
  const auto gold_num = parse_number(*gold);
  if (pred_num && gold_num) {
    if (*gold_num == 0.0) return *pred_num == 0.0;
    return std::fabs(*pred_num - *gold_num) <= rule.numeric_rel_tolerance * std::fabs(*gold_num);
  }

  return normalize_text(*pred) == normalize_text(*gold);
}

}  // namespace tabgen
