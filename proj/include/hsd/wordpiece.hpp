#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hsd {

// BERT-style tokenizer: basic cleanup and punctuation splitting followed by
// greedy longest-match-first WordPiece over vocab.txt.
class WordPieceTokenizer {
 public:
  WordPieceTokenizer() = default;
  WordPieceTokenizer(std::vector<std::string> vocab, bool lowercase);

  static WordPieceTokenizer load(const std::filesystem::path& vocab_txt, bool lowercase);

  // Throws ValidationError on invalid UTF-8.
  std::vector<std::string> basic_tokens(std::string_view text) const;
  std::vector<std::string> wordpieces(std::string_view text) const;
  // [CLS] pieces... [SEP], truncated to max_len ids in total.
  std::vector<int> encode(std::string_view text, int max_len) const;

  int id_of(std::string_view token) const;  // [UNK] id when missing
  bool contains(std::string_view token) const { return index_.contains(std::string(token)); }
  const std::vector<std::string>& vocab() const { return vocab_; }
  bool lowercase() const { return lowercase_; }

  int cls_id() const { return cls_; }
  int sep_id() const { return sep_; }
  int unk_id() const { return unk_; }

 private:
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, int> index_;
  bool lowercase_ = false;
  int cls_ = 0, sep_ = 0, unk_ = 0;
};

}  // namespace hsd
