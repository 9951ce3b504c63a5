#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hsd/dataset.hpp"

namespace hsd::corpus {

enum class StormfrontLabel { NoHate, Hate, Relation, Skip };
enum class GermevalCoarse { Offense, Other };
enum class GermevalFine { Other, Abuse, Insult, Profanity };

// Raw labels are kept as they appear in the source files; the relabel
// adapters validate them.
struct RawStormfrontRecord {
  std::string id;
  std::string text;
  std::string raw_label;
};

struct RawGermevalRecord {
  std::string id;
  std::string text;
  std::string coarse_label;
  std::string fine_label;
};

// Accepts the spellings used by the released files ("noHate", "hate",
// "relation", "idk/skip", ...), case-insensitively.
std::optional<StormfrontLabel> parse_stormfront_label(std::string_view raw);
std::optional<GermevalCoarse> parse_germeval_coarse(std::string_view raw);
std::optional<GermevalFine> parse_germeval_fine(std::string_view raw);

// Skip -> noHate, Relation -> Hate. Size, order, ids and text preserved.
Dataset relabel_stormfront(const std::vector<RawStormfrontRecord>& records,
                           std::string name = "stormfront");

// Abuse -> Hate, Other/Insult/Profanity -> noHate.
Dataset relabel_germeval(const std::vector<RawGermevalRecord>& records,
                         std::string name = "germeval");

struct GermanSplit {
  Dataset train;
  Dataset dev;
};

inline constexpr std::size_t kGermanDevSize = 809;

// The final 809 examples of the official training file become the dev set.
GermanSplit split_german(const Dataset& official_train);

struct SplitCounts {
  std::size_t no_hate = 0;
  std::size_t hate = 0;
};

struct EnglishSplitCounts {
  SplitCounts test{427, 63};
  SplitCounts dev{134, 20};
  // Unset: every example not drawn for test/dev goes to train.
  std::optional<SplitCounts> train = SplitCounts{9018, 1281};
};

struct EnglishSplit {
  Dataset train;
  Dataset dev;
  Dataset test;
  // Examples not drawn for any split when explicit train counts leave a
  // remainder. Keeps the four parts an exact partition of the input.
  Dataset excluded;
};

// Stratified draw without replacement. Within each split, examples keep
// their input order.
EnglishSplit split_english(const Dataset& full, const EnglishSplitCounts& counts,
                           std::uint64_t seed);

// Stormfront release layout: a metadata CSV with at least the columns
// `file_id` and `label`, and one `<file_id>.txt` per sample either in
// `all_files/` next to the CSV or in the same directory.
std::vector<RawStormfrontRecord> read_stormfront(
    const std::filesystem::path& metadata_csv);

// GermEval layout: `text<TAB>coarse<TAB>fine` per line. Ids are
// `<file stem>-<zero-based line index>`.
std::vector<RawGermevalRecord> read_germeval(const std::filesystem::path& tsv);

}  // namespace hsd::corpus
