#include "hsd/tokenize.hpp"

#include "hsd/utf8.hpp"

namespace hsd {
namespace {

bool is_word_char(char32_t cp) {
  return !utf8::is_space(cp) && !utf8::is_punct(cp) && !utf8::is_control(cp);
}

bool starts_with_at(const std::vector<char32_t>& cps, std::size_t pos,
                    std::u32string_view prefix) {
  if (pos + prefix.size() > cps.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (utf8::to_lower(cps[pos + i]) != prefix[i]) return false;
  }
  return true;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::vector<char32_t> cps;
  if (utf8::is_valid(text)) {
    cps = utf8::decode(text);
  } else {
    // Treat stray bytes as Latin-1 so tokenization stays total.
    for (unsigned char c : text) cps.push_back(c);
  }

  std::size_t i = 0;
  const std::size_t n = cps.size();
  auto emit = [&](std::size_t begin, std::size_t end) {
    std::string token;
    for (std::size_t k = begin; k < end; ++k) {
      utf8::append(token, utf8::to_lower(cps[k]));
    }
    tokens.push_back(std::move(token));
  };

  while (i < n) {
    const char32_t cp = cps[i];
    if (utf8::is_space(cp) || utf8::is_control(cp)) {
      ++i;
      continue;
    }

    // URLs run to the next whitespace, minus trailing sentence punctuation.
    if (starts_with_at(cps, i, U"http://") || starts_with_at(cps, i, U"https://") ||
        starts_with_at(cps, i, U"www.")) {
      std::size_t j = i;
      while (j < n && !utf8::is_space(cps[j])) ++j;
      std::size_t end = j;
      while (end > i + 4 && utf8::is_punct(cps[end - 1]) && cps[end - 1] != '/') --end;
      emit(i, end);
      for (std::size_t k = end; k < j; ++k) emit(k, k + 1);
      i = j;
      continue;
    }

    // @mention / #hashtag: the marker plus following word characters.
    if ((cp == '@' || cp == '#') && i + 1 < n &&
        (is_word_char(cps[i + 1]) || cps[i + 1] == '_')) {
      std::size_t j = i + 1;
      while (j < n && (is_word_char(cps[j]) || cps[j] == '_')) ++j;
      emit(i, j);
      i = j;
      continue;
    }

    if (utf8::is_punct(cp)) {
      emit(i, i + 1);
      ++i;
      continue;
    }

    // Word: word characters, joined across single inner hyphens,
    // apostrophes, or (between digits) periods and commas.
    std::size_t j = i;
    while (j < n) {
      if (is_word_char(cps[j])) {
        ++j;
        continue;
      }
      const char32_t c = cps[j];
      const bool joiner = c == '-' || c == '\'' || c == 0x2019 ||
                          ((c == '.' || c == ',') && j > i &&
                           cps[j - 1] >= '0' && cps[j - 1] <= '9' && j + 1 < n &&
                           cps[j + 1] >= '0' && cps[j + 1] <= '9');
      if (joiner && j > i && j + 1 < n && is_word_char(cps[j + 1])) {
        ++j;
        continue;
      }
      break;
    }
    emit(i, j);
    i = j;
  }
  return tokens;
}

}  // namespace hsd
