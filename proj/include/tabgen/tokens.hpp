#pragma once

#include <cstddef>
#include <string_view>

namespace tabgen {

// Local token approximation used whenever a provider does not report usage:
// every maximal run of alphanumeric bytes (bytes >= 0x80 count as
// alphanumeric) is one token, and every other non-whitespace byte is a token
// of its own. Whitespace separates tokens and is never counted.
std::size_t count_tokens(std::string_view text);

}  // namespace tabgen
