#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "hsd/dataset.hpp"

namespace hsd::corpus {

using LanguagePredicate = std::function<bool(std::string_view line)>;

// Default German detector. A line counts as German when it contains one of
// ä/ö/ü/ß, or when it hits at least one German function word and no more
// English function words than German ones.
bool looks_german(std::string_view line);

// Stricter alternative: rejects a line when more than 95% of its words are
// pure ASCII and it has none of ä/ö/ü/ß.
bool has_non_ascii_german(std::string_view line);

struct ForumFilterOptions {
  LanguagePredicate is_german = looks_german;
  // Paragraphs longer than this many code points are dropped.
  std::size_t max_chars = 1000;
  // Paragraphs with fewer whitespace-separated tokens are dropped.
  std::size_t min_tokens = 3;
};

enum class DropReason { NonGerman, BulletList, TooLong, TooShort, CutOff };

struct ForumLine {
  std::size_t post = 0;
  std::size_t paragraph = 0;
  std::string text;
};

struct DroppedLine {
  ForumLine line;
  DropReason reason;
};

// Applied to whole posts before paragraph splitting.
std::string apply_forum_corrections(std::string_view post);

bool is_bullet_line(std::string_view line);
bool is_cut_off(std::string_view line);

// Each newline-separated paragraph of each post is a candidate sample.
// Kept paragraphs are returned as unlabeled examples with ids
// `forum-<post>-<paragraph>`; `dropped`, when given, receives the rest.
Dataset preprocess_forum_text(const std::vector<std::string>& raw_posts,
                              const ForumFilterOptions& options = {},
                              std::vector<DroppedLine>* dropped = nullptr);

// Raw dump: JSON lines with a string field "text" per post.
std::vector<std::string> read_forum_dump(const std::filesystem::path& jsonl);

}  // namespace hsd::corpus
