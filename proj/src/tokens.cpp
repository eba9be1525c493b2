#include "tabgen/tokens.hpp"

namespace tabgen {

std::size_t count_tokens(std::string_view text) {
  std::size_t count = 0;
  bool in_word = false;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    const bool word = c >= 0x80 || (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    if (word) {
      if (!in_word) ++count;
      in_word = true;
    } else {
      in_word = false;
      if (!space) ++count;
    }
  }
  return count;
}

}  // namespace tabgen
