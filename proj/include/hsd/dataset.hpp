#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hsd {

enum class Label : std::uint8_t { NoHate = 0, Hate = 1 };

inline constexpr std::size_t kNumClasses = 2;

inline std::size_t index_of(Label label) {
  return static_cast<std::size_t>(label);
}

std::string_view to_string(Label label);
std::optional<Label> parse_label(std::string_view text);

struct Example {
  std::string id;
  std::string text;
  std::optional<Label> label;
  std::string source;

  bool operator==(const Example&) const = default;
};

struct ClassCounts {
  std::size_t no_hate = 0;
  std::size_t hate = 0;

  std::size_t total() const { return no_hate + hate; }
  std::size_t of(Label label) const {
    return label == Label::Hate ? hate : no_hate;
  }
  bool operator==(const ClassCounts&) const = default;
};

struct Dataset {
  std::string name;
  std::vector<Example> examples;

  std::size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }
  auto begin() const { return examples.begin(); }
  auto end() const { return examples.end(); }
  const Example& operator[](std::size_t i) const { return examples[i]; }

  std::size_t labeled_count() const;
  std::vector<Label> labels() const;  // throws on unlabeled examples
  std::vector<std::string> ids() const;
};

// Exact per-class counts; rejects datasets with unlabeled examples.
ClassCounts class_counts(const Dataset& dataset);

// Throws ValidationError naming the first repeated id.
void require_unique_ids(const Dataset& dataset);

// Canonical on-disk format: one `id<TAB>label<TAB>text` record per line,
// UTF-8. Label is `noHate`, `Hate`, or empty for unlabeled examples.
// Backslash, tab, CR and newline inside fields are escaped as
// `\\`, `\t`, `\r`, `\n`.
std::string escape_field(std::string_view field);
std::string unescape_field(std::string_view field);

std::string format_tsv(const Dataset& dataset);
Dataset parse_tsv(std::string_view content, std::string name,
                  std::string_view origin = "<memory>");
Dataset read_tsv(const std::filesystem::path& path);
Dataset read_tsv(const std::filesystem::path& path, std::string name);
void write_tsv(const std::filesystem::path& path, const Dataset& dataset);

// Whole-file helpers shared by the readers.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace hsd
