#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hsd/dataset.hpp"
#include "hsd/rng.hpp"

// Synthetic bilingual fixtures for tests and smoke runs. Concepts have an
// English and a German surface form; aligned embeddings place both forms
// of a concept near one shared random vector.
namespace hsd::synth {

enum class Language { English, German };

struct Concept {
  std::string en;
  std::string de;
};

struct Lexicon {
  std::vector<Concept> neutral;
  std::vector<Concept> insult;   // offensive but not group-directed
  std::vector<Concept> hateful;  // group-directed attacks
};

const Lexicon& default_lexicon();

// Word-vector text files ("count dim" header) for both languages.
// Punctuation tokens are shared between the two files.
void write_aligned_embeddings(const Lexicon& lexicon, const std::filesystem::path& en,
                              const std::filesystem::path& de, int dimension,
                              std::uint64_t seed, double noise = 0.15);

enum class TextKind { Neutral, Insult, Hateful };

// One sentence of 5..12 words ending in '.' or '!'.
std::string sentence(const Lexicon& lexicon, Language lang, TextKind kind, Rng& rng);

// Hateful sentences are labeled Hate, the rest noHate. `label_noise` flips
// that fraction of labels.
Dataset toy_corpus(const Lexicon& lexicon, Language lang, std::size_t no_hate,
                   std::size_t hate, std::uint64_t seed, const std::string& name,
                   double label_noise = 0.0);

// BERT vocabulary covering the lexicon in both languages plus special
// tokens, punctuation, single characters (including ä, ö, ü, ß) and their
// "##" continuations.
std::vector<std::string> bert_vocabulary(const Lexicon& lexicon);

struct GermevalCounts {
  std::size_t other = 0, abuse = 0, insult = 0, profanity = 0;
  std::size_t total() const { return other + abuse + insult + profanity; }
};

// Official GermEval layout (text<TAB>coarse<TAB>fine). `tail` gives the
// composition of the last `tail.total()` lines of the file; the rest of
// `counts` is spread over the preceding lines. Order within both parts is
// a seeded shuffle.
void write_germeval_file(const std::filesystem::path& path, const Lexicon& lexicon,
                         const GermevalCounts& counts, const GermevalCounts& tail,
                         std::uint64_t seed);

// Stormfront release layout: annotations_metadata.csv + all_files/<id>.txt.
struct StormfrontCounts {
  std::size_t no_hate = 0, hate = 0, relation = 0, skip = 0;
};
void write_stormfront_dump(const std::filesystem::path& dir, const Lexicon& lexicon,
                           const StormfrontCounts& counts, std::uint64_t seed);

// Forum dump (JSON lines, one post per line) whose posts mix clean German
// paragraphs with the kinds of lines the forum cleaner removes.
void write_forum_dump(const std::filesystem::path& path, const Lexicon& lexicon,
                      std::size_t posts, double hateful_fraction, std::uint64_t seed);

// Word-vector file of `rows` random tokens ("w000001", ...) of `dimension`
// values each, with a "rows dimension" header.
void write_random_embeddings(const std::filesystem::path& path, std::size_t rows,
                             int dimension, std::uint64_t seed);

}  // namespace hsd::synth
