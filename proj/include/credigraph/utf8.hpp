#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace credigraph::utf8 {

// Replaces every invalid or truncated sequence with U+FFFD.
std::string decode_lossy(std::string_view bytes);

// Number of scalar values in valid UTF-8.
std::size_t length(std::string_view text) noexcept;

// Prefix of at most `max_chars` scalar values; never splits a sequence.
std::string_view truncate(std::string_view text, std::size_t max_chars) noexcept;

}  // namespace credigraph::utf8
