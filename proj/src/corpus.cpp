#include "hsd/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>
#include <unordered_map>

#include "hsd/errors.hpp"
#include "hsd/rng.hpp"

namespace hsd::corpus {
namespace {

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// RFC 4180 fields of a single line (no embedded newlines in this layout).
std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

Dataset subset(const Dataset& source, std::string name,
               std::vector<std::size_t> indices) {
  std::sort(indices.begin(), indices.end());
  Dataset out;
  out.name = std::move(name);
  out.examples.reserve(indices.size());
  for (std::size_t i : indices) out.examples.push_back(source.examples[i]);
  return out;
}

}  // namespace

std::optional<StormfrontLabel> parse_stormfront_label(std::string_view raw) {
  const std::string s = ascii_lower(trim(raw));
  if (s == "nohate") return StormfrontLabel::NoHate;
  if (s == "hate") return StormfrontLabel::Hate;
  if (s == "relation") return StormfrontLabel::Relation;
  if (s == "skip" || s == "idk/skip") return StormfrontLabel::Skip;
  return std::nullopt;
}

std::optional<GermevalCoarse> parse_germeval_coarse(std::string_view raw) {
  const std::string s = ascii_lower(trim(raw));
  if (s == "offense") return GermevalCoarse::Offense;
  if (s == "other") return GermevalCoarse::Other;
  return std::nullopt;
}

std::optional<GermevalFine> parse_germeval_fine(std::string_view raw) {
  const std::string s = ascii_lower(trim(raw));
  if (s == "other") return GermevalFine::Other;
  if (s == "abuse") return GermevalFine::Abuse;
  if (s == "insult") return GermevalFine::Insult;
  if (s == "profanity") return GermevalFine::Profanity;
  return std::nullopt;
}

Dataset relabel_stormfront(const std::vector<RawStormfrontRecord>& records,
                           std::string name) {
  Dataset out;
  out.name = std::move(name);
  out.examples.reserve(records.size());
  for (const auto& rec : records) {
    const auto raw = parse_stormfront_label(rec.raw_label);
    if (!raw) {
      throw ValidationError("stormfront record '" + rec.id +
                            "': unknown label '" + rec.raw_label + "'");
    }
    const Label label =
        (*raw == StormfrontLabel::Hate || *raw == StormfrontLabel::Relation)
            ? Label::Hate
            : Label::NoHate;
    out.examples.push_back({rec.id, rec.text, label, out.name});
  }
  return out;
}

Dataset relabel_germeval(const std::vector<RawGermevalRecord>& records,
                         std::string name) {
  Dataset out;
  out.name = std::move(name);
  out.examples.reserve(records.size());
  for (const auto& rec : records) {
    const auto fine = parse_germeval_fine(rec.fine_label);
    if (!fine) {
      throw ValidationError("germeval record '" + rec.id +
                            "': unknown fine label '" + rec.fine_label + "'");
    }
    const Label label = *fine == GermevalFine::Abuse ? Label::Hate : Label::NoHate;
    out.examples.push_back({rec.id, rec.text, label, out.name});
  }
  return out;
}

GermanSplit split_german(const Dataset& official_train) {
  const std::size_t n = official_train.size();
  if (n < kGermanDevSize + 1) {
    throw ValidationError("split_german: need at least " +
                          std::to_string(kGermanDevSize + 1) +
                          " examples, got " + std::to_string(n));
  }
  const std::size_t cut = n - kGermanDevSize;
  GermanSplit split;
  split.train.name = "DE-TRAIN";
  split.dev.name = "DE-DEV";
  split.train.examples.assign(official_train.examples.begin(),
                              official_train.examples.begin() + static_cast<std::ptrdiff_t>(cut));
  split.dev.examples.assign(official_train.examples.begin() + static_cast<std::ptrdiff_t>(cut),
                            official_train.examples.end());
  return split;
}

EnglishSplit split_english(const Dataset& full, const EnglishSplitCounts& counts,
                           std::uint64_t seed) {
  std::vector<std::size_t> by_class[kNumClasses];
  for (std::size_t i = 0; i < full.size(); ++i) {
    const auto& ex = full.examples[i];
    if (!ex.label) {
      throw ValidationError("split_english: example '" + ex.id + "' is unlabeled");
    }
    by_class[index_of(*ex.label)].push_back(i);
  }

  std::vector<std::size_t> test, dev, train, excluded;
  for (Label label : {Label::NoHate, Label::Hate}) {
    auto& pool = by_class[index_of(label)];
    auto want = [label](const SplitCounts& c) {
      return label == Label::Hate ? c.hate : c.no_hate;
    };
    const std::size_t n_test = want(counts.test);
    const std::size_t n_dev = want(counts.dev);
    const std::size_t requested =
        n_test + n_dev + (counts.train ? want(*counts.train) : 0);
    if (requested > pool.size()) {
      throw ValidationError(
          "split_english: requested " + std::to_string(requested) + " " +
          std::string(to_string(label)) + " examples but only " +
          std::to_string(pool.size()) + " are available (short by " +
          std::to_string(requested - pool.size()) + ")");
    }
    Rng rng(Rng::mix(seed, index_of(label)));
    rng.shuffle(std::span<std::size_t>(pool));
    const std::size_t n_train =
        counts.train ? want(*counts.train) : pool.size() - n_test - n_dev;
    auto it = pool.begin();
    test.insert(test.end(), it, it + static_cast<std::ptrdiff_t>(n_test));
    it += static_cast<std::ptrdiff_t>(n_test);
    dev.insert(dev.end(), it, it + static_cast<std::ptrdiff_t>(n_dev));
    it += static_cast<std::ptrdiff_t>(n_dev);
    train.insert(train.end(), it, it + static_cast<std::ptrdiff_t>(n_train));
    it += static_cast<std::ptrdiff_t>(n_train);
    excluded.insert(excluded.end(), it, pool.end());
  }

  EnglishSplit split;
  split.train = subset(full, "EN-TRAIN", std::move(train));
  split.dev = subset(full, "EN-DEV", std::move(dev));
  split.test = subset(full, "EN-TEST", std::move(test));
  split.excluded = subset(full, "EN-EXCLUDED", std::move(excluded));
  return split;
}

std::vector<RawStormfrontRecord> read_stormfront(
    const std::filesystem::path& metadata_csv) {
  const std::string content = read_file(metadata_csv);
  std::istringstream lines(content);
  std::string line;
  if (!std::getline(lines, line)) {
    throw ValidationError(metadata_csv.string() + ": empty metadata file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  std::optional<std::size_t> id_col, label_col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = ascii_lower(trim(header[i]));
    if (name == "file_id") id_col = i;
    if (name == "label") label_col = i;
  }
  if (!id_col || !label_col) {
    throw ValidationError(metadata_csv.string() +
                          ": header must contain file_id and label columns");
  }

  const auto base = metadata_csv.parent_path();
  const auto text_dir = std::filesystem::is_directory(base / "all_files")
                            ? base / "all_files"
                            : base;
  std::vector<RawStormfrontRecord> records;
  std::size_t line_no = 1;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() <= std::max(*id_col, *label_col)) {
      throw ValidationError(metadata_csv.string() + ":" +
                            std::to_string(line_no) + ": missing columns");
    }
    RawStormfrontRecord rec;
    rec.id = std::string(trim(fields[*id_col]));
    rec.raw_label = std::string(trim(fields[*label_col]));
    std::string text = read_file(text_dir / (rec.id + ".txt"));
    const auto kept = trim(text);
    rec.text = std::string(kept);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<RawGermevalRecord> read_germeval(const std::filesystem::path& tsv) {
  const std::string content = read_file(tsv);
  const std::string stem = tsv.stem().string();
  std::vector<RawGermevalRecord> records;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < content.size()) {
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string::npos) eol = content.size();
    std::string_view line(content.data() + pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    const std::size_t t2 = line.rfind('\t');
    const std::size_t t1 =
        t2 == std::string_view::npos || t2 == 0 ? std::string_view::npos
                                                : line.rfind('\t', t2 - 1);
    if (t1 == std::string_view::npos) {
      throw ValidationError(tsv.string() + ":" + std::to_string(line_no) +
                            ": expected text<TAB>coarse<TAB>fine");
    }
    char id[32];
    std::snprintf(id, sizeof id, "%05zu", records.size());
    RawGermevalRecord rec{stem + "-" + id, std::string(line.substr(0, t1)),
                          std::string(trim(line.substr(t1 + 1, t2 - t1 - 1))),
                          std::string(trim(line.substr(t2 + 1)))};
    const auto coarse = parse_germeval_coarse(rec.coarse_label);
    const auto fine = parse_germeval_fine(rec.fine_label);
    if (!coarse) {
      throw ValidationError(tsv.string() + ":" + std::to_string(line_no) +
                            ": unknown coarse label '" + rec.coarse_label + "' (" + rec.id + ")");
    }
    if (fine && *fine == GermevalFine::Other && *coarse != GermevalCoarse::Other) {
      throw ValidationError(tsv.string() + ":" + std::to_string(line_no) +
                            ": fine label OTHER requires coarse OTHER (" + rec.id + ")");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace hsd::corpus
