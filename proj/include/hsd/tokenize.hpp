#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hsd {

// Classifier-side tokenizer: lowercases, splits punctuation off words, and
// keeps URLs, @-mentions and #-hashtags as single tokens. Hyphenated words,
// intra-word apostrophes and decimal numbers stay whole.
std::vector<std::string> tokenize(std::string_view text);

}  // namespace hsd
