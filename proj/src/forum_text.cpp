#include "hsd/forum_text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <nlohmann/json.hpp>
#include <sstream>

#include "hsd/errors.hpp"
#include "hsd/utf8.hpp"

namespace hsd::corpus {
namespace {

constexpr std::array<std::string_view, 40> kGermanWords = {
    "der",   "die",   "das",  "und",   "ist",   "nicht", "ich",   "sie",
    "wir",   "ein",   "eine", "zu",    "mit",   "auf",   "den",   "dem",
    "sich",  "auch",  "es",   "von",   "sind",  "noch",  "wie",   "aber",
    "nur",   "dass",  "daß",  "wenn",  "kein",  "keine", "hier",  "bei",
    "oder",  "werden", "haben", "mir",  "uns",   "diese", "schon", "doch"};

constexpr std::array<std::string_view, 32> kEnglishWords = {
    "the",  "and",  "is",   "are",  "of",   "to",    "that",  "this",
    "with", "for",  "you",  "it",   "was",  "they",  "have",  "not",
    "be",   "on",   "what", "there", "will", "would", "from", "which",
    "were", "been", "their", "we",  "he",   "she",   "my",    "your"};

std::vector<std::string> words_of(std::string_view line) {
  std::vector<std::string> words;
  std::string current;
  for (char32_t cp : utf8::decode(line)) {
    if (utf8::is_space(cp) || utf8::is_punct(cp)) {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else {
      utf8::append(current, utf8::to_lower(cp));
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::size_t token_count(std::string_view line) {
  std::size_t n = 0;
  bool in_token = false;
  for (char32_t cp : utf8::decode(line)) {
    const bool space = utf8::is_space(cp);
    if (!space && !in_token) ++n;
    in_token = !space;
  }
  return n;
}

bool is_letter_byte(unsigned char c) {
  return std::isalpha(c) || c >= 0x80;
}

}  // namespace

bool looks_german(std::string_view line) {
  if (!utf8::is_valid(line)) return false;
  for (char32_t cp : utf8::decode(line)) {
    switch (utf8::to_lower(cp)) {
      case U'ä': case U'ö': case U'ü': case U'ß':
        return true;
      default:
        break;
    }
  }
  std::size_t german = 0;
  std::size_t english = 0;
  for (const auto& w : words_of(line)) {
    for (auto g : kGermanWords) german += (w == g) ? 1 : 0;
    for (auto e : kEnglishWords) english += (w == e) ? 1 : 0;
  }
  return german > 0 && german >= english;
}

bool has_non_ascii_german(std::string_view line) {
  if (!utf8::is_valid(line)) return false;
  for (char32_t cp : utf8::decode(line)) {
    switch (utf8::to_lower(cp)) {
      case U'ä': case U'ö': case U'ü': case U'ß':
        return true;
      default:
        break;
    }
  }
  const auto words = words_of(line);
  if (words.empty()) return false;
  std::size_t ascii = 0;
  for (const auto& w : words) {
    ascii += std::all_of(w.begin(), w.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
  }
  return static_cast<double>(ascii) / static_cast<double>(words.size()) <= 0.95;
}

std::string apply_forum_corrections(std::string_view post) {
  std::string text(post);

  // "tut mir" separated from "leid" by any run of whitespace, including
  // line breaks, becomes "tut mir leid".
  for (std::string_view head : {"tut mir", "Tut mir"}) {
    for (std::size_t pos = 0; (pos = text.find(head, pos)) != std::string::npos;) {
      const std::size_t after = pos + 7;
      std::size_t next = after;
      while (next < text.size() && std::isspace(static_cast<unsigned char>(text[next]))) ++next;
      if (next > after && text.compare(next, 4, "leid") == 0 &&
          (next + 4 == text.size() || !is_letter_byte(static_cast<unsigned char>(text[next + 4])))) {
        text.replace(after, next - after, " ");
      }
      pos = after;
    }
  }

  // "d aß" -> "daß" when "d" starts a word.
  const std::string broken = "d a\xC3\x9F";
  for (std::size_t pos = 0; (pos = text.find(broken, pos)) != std::string::npos;) {
    const bool word_start =
        pos == 0 || !is_letter_byte(static_cast<unsigned char>(text[pos - 1]));
    if (word_start) {
      text.replace(pos, broken.size(), "da\xC3\x9F");
    }
    pos += 1;
  }
  return text;
}

bool is_bullet_line(std::string_view line) {
  line = trim(line);
  if (line.empty()) return false;
  if (line.starts_with("- ") || line.starts_with("* ") || line.starts_with("+ ") ||
      line.starts_with("\xE2\x80\xA2") /* • */ || line.starts_with("\xC2\xB7") /* · */ ||
      line.starts_with("\xE2\x80\x93 ") /* – */) {
    return true;
  }
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i == 0 && i < line.size() && std::isalpha(static_cast<unsigned char>(line[i])) &&
      i + 1 < line.size() && line[i + 1] == ')') {
    return true;  // "a) ..."
  }
  return i > 0 && i + 1 < line.size() && (line[i] == '.' || line[i] == ')') &&
         line[i + 1] == ' ' && i <= 2;
}

bool is_cut_off(std::string_view line) {
  line = trim(line);
  if (line.empty()) return true;
  const char last = line.back();
  if (last == ',' || last == ';' || last == '-' || last == '(' || last == '/' ||
      last == '&') {
    return true;
  }
  return line.ends_with("\xE2\x80\x93");  // en dash
}

Dataset preprocess_forum_text(const std::vector<std::string>& raw_posts,
                              const ForumFilterOptions& options,
                              std::vector<DroppedLine>* dropped) {
  Dataset out;
  out.name = "forum";
  for (std::size_t p = 0; p < raw_posts.size(); ++p) {
    if (!utf8::is_valid(raw_posts[p])) continue;
    const std::string post = apply_forum_corrections(raw_posts[p]);
    std::istringstream paragraphs(post);
    std::string raw_line;
    std::size_t paragraph = 0;
    while (std::getline(paragraphs, raw_line)) {
      const std::string_view line = trim(raw_line);
      if (line.empty()) continue;
      ForumLine candidate{p, paragraph++, std::string(line)};

      std::optional<DropReason> reason;
      if (is_bullet_line(line)) {
        reason = DropReason::BulletList;
      } else if (utf8::length(line) > options.max_chars) {
        reason = DropReason::TooLong;
      } else if (token_count(line) < options.min_tokens) {
        reason = DropReason::TooShort;
      } else if (is_cut_off(line)) {
        reason = DropReason::CutOff;
      } else if (options.is_german && !options.is_german(line)) {
        reason = DropReason::NonGerman;
      }

      if (reason) {
        if (dropped) dropped->push_back({std::move(candidate), *reason});
        continue;
      }
      Example ex;
      ex.id = "forum-" + std::to_string(candidate.post) + "-" +
              std::to_string(candidate.paragraph);
      ex.text = std::move(candidate.text);
      ex.source = out.name;
      out.examples.push_back(std::move(ex));
    }
  }
  return out;
}

std::vector<std::string> read_forum_dump(const std::filesystem::path& jsonl) {
  const std::string content = read_file(jsonl);
  std::istringstream lines(content);
  std::vector<std::string> posts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto record = nlohmann::json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object() || !record.contains("text") ||
        !record["text"].is_string()) {
      throw ValidationError(jsonl.string() + ":" + std::to_string(line_no) +
                            ": expected a JSON object with a string \"text\"");
    }
    posts.push_back(record["text"].get<std::string>());
  }
  return posts;
}

}  // namespace hsd::corpus
