#include "hsd/wordpiece.hpp"

#include <sstream>

#include "hsd/dataset.hpp"
#include "hsd/errors.hpp"
#include "hsd/utf8.hpp"

namespace hsd {
namespace {

constexpr std::size_t kMaxCharsPerWord = 100;

int require(const std::unordered_map<std::string, int>& index, const std::string& token) {
  const auto it = index.find(token);
  if (it == index.end()) {
    throw ValidationError("wordpiece vocabulary lacks " + token);
  }
  return it->second;
}

}  // namespace

WordPieceTokenizer::WordPieceTokenizer(std::vector<std::string> vocab, bool lowercase)
    : vocab_(std::move(vocab)), lowercase_(lowercase) {
  index_.reserve(vocab_.size());
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    index_.emplace(vocab_[i], static_cast<int>(i));
  }
  cls_ = require(index_, "[CLS]");
  sep_ = require(index_, "[SEP]");
  unk_ = require(index_, "[UNK]");
}

WordPieceTokenizer WordPieceTokenizer::load(const std::filesystem::path& vocab_txt,
                                            bool lowercase) {
  std::istringstream in(read_file(vocab_txt));
  std::vector<std::string> vocab;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    vocab.push_back(line);
  }
  return WordPieceTokenizer(std::move(vocab), lowercase);
}

std::vector<std::string> WordPieceTokenizer::basic_tokens(std::string_view text) const {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (char32_t cp : utf8::decode(text)) {
    if (cp == 0 || utf8::is_control(cp)) continue;
    if (utf8::is_space(cp)) {
      flush();
      continue;
    }
    if (lowercase_) cp = utf8::strip_accent(utf8::to_lower(cp));
    if (utf8::is_punct(cp) || utf8::is_cjk(cp)) {
      flush();
      std::string single;
      utf8::append(single, cp);
      tokens.push_back(std::move(single));
      continue;
    }
    utf8::append(current, cp);
  }
  flush();
  return tokens;
}

std::vector<std::string> WordPieceTokenizer::wordpieces(std::string_view text) const {
  std::vector<std::string> pieces;
  for (const auto& word : basic_tokens(text)) {
    const auto cps = utf8::decode(word);
    if (cps.size() > kMaxCharsPerWord) {
      pieces.push_back("[UNK]");
      continue;
    }
    std::vector<std::string> sub;
    std::size_t start = 0;
    bool bad = false;
    while (start < cps.size()) {
      std::size_t end = cps.size();
      std::string found;
      while (start < end) {
        std::string candidate = start > 0 ? "##" : "";
        for (std::size_t k = start; k < end; ++k) utf8::append(candidate, cps[k]);
        if (index_.contains(candidate)) {
          found = std::move(candidate);
          break;
        }
        --end;
      }
      if (found.empty()) {
        bad = true;
        break;
      }
      sub.push_back(std::move(found));
      start = end;
    }
    if (bad) {
      pieces.push_back("[UNK]");
    } else {
      pieces.insert(pieces.end(), sub.begin(), sub.end());
    }
  }
  return pieces;
}

std::vector<int> WordPieceTokenizer::encode(std::string_view text, int max_len) const {
  if (max_len < 2) throw ValidationError("wordpiece: max_len must be >= 2");
  const auto pieces = wordpieces(text);
  std::vector<int> ids;
  ids.reserve(std::min<std::size_t>(pieces.size() + 2, static_cast<std::size_t>(max_len)));
  ids.push_back(cls_);
  for (const auto& piece : pieces) {
    if (static_cast<int>(ids.size()) >= max_len - 1) break;
    ids.push_back(id_of(piece));
  }
  ids.push_back(sep_);
  return ids;
}

int WordPieceTokenizer::id_of(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  return it == index_.end() ? unk_ : it->second;
}

}  // namespace hsd
