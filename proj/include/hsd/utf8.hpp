#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace hsd::utf8 {

bool is_valid(std::string_view text);

// Throws ValidationError on malformed input.
std::vector<char32_t> decode(std::string_view text);

void append(std::string& out, char32_t cp);
std::string encode(const std::vector<char32_t>& cps);

std::size_t length(std::string_view text);

bool is_space(char32_t cp);
bool is_punct(char32_t cp);
bool is_cjk(char32_t cp);
bool is_control(char32_t cp);

// Simple case mapping for Latin, Greek and Cyrillic blocks. Characters
// without a single-code-point lowercase form are returned unchanged.
char32_t to_lower(char32_t cp);
std::string to_lower(std::string_view text);

// Removes combining marks after decomposing precomposed Latin-1 and
// Latin Extended-A letters (é -> e, ü -> u). ß is left as is.
char32_t strip_accent(char32_t cp);

}  // namespace hsd::utf8
