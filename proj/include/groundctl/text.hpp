#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace groundctl::text {

// Offset of the first byte that is not part of a well-formed UTF-8 sequence.
std::optional<std::size_t> first_invalid_utf8(std::string_view s);

// Replaces ill-formed sequences with U+FFFD.
std::string sanitize_utf8(std::string_view s);

// True when `pos` is not in the middle of a multi-byte sequence.
inline bool is_utf8_boundary(std::string_view s, std::size_t pos) {
    return pos == 0 || pos >= s.size() ||
           (static_cast<unsigned char>(s[pos]) & 0xC0) != 0x80;
}

// Longest prefix of at most `max_bytes` bytes that ends on a code point boundary.
std::string_view utf8_prefix(std::string_view s, std::size_t max_bytes);

std::string to_lower_ascii(std::string_view s);
std::string_view trim(std::string_view s);
std::string collapse_whitespace(std::string_view s);
std::string replace_all(std::string s, std::string_view from, std::string_view to);
std::vector<std::string_view> split_lines(std::string_view s);

// Lowercased runs of ASCII alphanumerics. Bytes >= 0x80 count as word bytes so
// UTF-8 words stay whole.
std::vector<std::string> tokenize(std::string_view s);

}  // namespace groundctl::text
