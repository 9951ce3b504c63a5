#include "hsd/synth.hpp"

#include <cstdio>
#include <nlohmann/json.hpp>
#include <set>

#include "hsd/errors.hpp"

namespace hsd::synth {
namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kPunctuation{".", "!", "?", ",", ":", ";"};

const std::string& pick(const std::vector<Concept>& concepts, Language lang, Rng& rng) {
  const Concept& c = concepts[rng.below(concepts.size())];
  return lang == Language::English ? c.en : c.de;
}

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

void append_vector(std::string& out, const std::string& token, const std::vector<double>& v) {
  out += token;
  char buf[32];
  for (double x : v) {
    std::snprintf(buf, sizeof buf, " %.5f", x);
    out += buf;
  }
  out += '\n';
}

std::vector<double> random_vector(Rng& rng, int dimension, double scale) {
  std::vector<double> v(static_cast<std::size_t>(dimension));
  for (auto& x : v) x = rng.normal() * scale;
  return v;
}

}  // namespace

const Lexicon& default_lexicon() {
  static const Lexicon lexicon{
      {{"the", "die"},         {"and", "und"},           {"is", "ist"},
       {"we", "wir"},          {"very", "sehr"},         {"not", "nicht"},
       {"in", "in"},           {"with", "mit"},          {"our", "unsere"},
       {"this", "diese"},      {"weather", "wetter"},    {"today", "heute"},
       {"tomorrow", "morgen"}, {"city", "stadt"},        {"house", "haus"},
       {"street", "straße"},   {"family", "familie"},    {"children", "kinder"},
       {"school", "schule"},   {"work", "arbeit"},       {"music", "musik"},
       {"book", "buch"},       {"garden", "garten"},     {"train", "zug"},
       {"coffee", "kaffee"},   {"bread", "brot"},        {"beautiful", "schön"},
       {"green", "grün"},      {"small", "klein"},       {"big", "groß"},
       {"friend", "freund"},   {"evening", "abend"},     {"early", "früh"},
       {"water", "wasser"},    {"forest", "wald"},       {"mountain", "berg"},
       {"lake", "see"},        {"summer", "sommer"},     {"football", "fußball"},
       {"game", "spiel"},      {"news", "nachrichten"},  {"politics", "politik"},
       {"government", "regierung"}, {"election", "wahl"}, {"village", "dorf"},
       {"doctor", "arzt"},     {"church", "kirche"},     {"history", "geschichte"},
       {"car", "auto"},        {"bicycle", "fahrrad"},   {"holiday", "urlaub"},
       {"kitchen", "küche"},   {"door", "tür"},          {"key", "schlüssel"},
       {"river", "fluss"},     {"bridge", "brücke"},     {"north", "norden"},
       {"south", "süden"},     {"people", "leute"},      {"neighbour", "nachbar"},
       {"market", "markt"},    {"price", "preis"},       {"money", "geld"},
       {"year", "jahr"},       {"week", "woche"},        {"good", "gut"},
       {"new", "neu"},         {"old", "alt"}},
      {{"idiot", "idiot"},
       {"stupid", "dumm"},
       {"clown", "clown"},
       {"liar", "lügner"},
       {"loser", "versager"},
       {"fool", "narr"},
       {"lazy", "faul"},
       {"ugly", "hässlich"}},
      {{"vermin", "ungeziefer"},
       {"invaders", "eindringlinge"},
       {"parasites", "parasiten"},
       {"subhuman", "untermenschen"},
       {"scum", "abschaum"},
       {"plague", "plage"},
       {"deport", "abschieben"},
       {"expel", "vertreiben"},
       {"filth", "dreck"},
       {"breed", "brut"},
       {"hordes", "horden"},
       {"infest", "verseuchen"}}};
  return lexicon;
}

void write_aligned_embeddings(const Lexicon& lexicon, const fs::path& en, const fs::path& de,
                              int dimension, std::uint64_t seed, double noise) {
  if (dimension < 1) throw ValidationError("embedding dimension must be positive");
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dimension));
  std::string en_text, de_text;
  std::size_t rows = 0;
  auto emit = [&](const std::string& en_token, const std::string& de_token) {
    const auto base = random_vector(rng, dimension, scale);
    std::vector<double> a = base, b = base;
    for (auto& x : a) x += rng.normal() * scale * noise;
    for (auto& x : b) x += rng.normal() * scale * noise;
    append_vector(en_text, en_token, a);
    append_vector(de_text, de_token, b);
    ++rows;
  };
  for (const auto* group : {&lexicon.neutral, &lexicon.insult, &lexicon.hateful}) {
    for (const auto& c : *group) emit(c.en, c.de);
  }
  for (const auto& p : kPunctuation) emit(p, p);
  const std::string header = std::to_string(rows) + " " + std::to_string(dimension) + "\n";
  write_file(en, header + en_text);
  write_file(de, header + de_text);
}

std::string sentence(const Lexicon& lexicon, Language lang, TextKind kind, Rng& rng) {
  const std::size_t n = 5 + rng.below(8);
  std::vector<std::string> words;
  for (std::size_t i = 0; i < n; ++i) words.push_back(pick(lexicon.neutral, lang, rng));
  switch (kind) {
    case TextKind::Neutral:
      break;
    case TextKind::Insult:
      words[rng.below(n)] = pick(lexicon.insult, lang, rng);
      break;
    case TextKind::Hateful: {
      const std::size_t k = 1 + rng.below(2);
      for (std::size_t i = 0; i < k; ++i) words[rng.below(n)] = pick(lexicon.hateful, lang, rng);
      break;
    }
  }
  std::string out = capitalize(words[0]);
  for (std::size_t i = 1; i < n; ++i) out += " " + words[i];
  out += rng.bernoulli(0.3) ? "!" : ".";
  return out;
}

Dataset toy_corpus(const Lexicon& lexicon, Language lang, std::size_t no_hate, std::size_t hate,
                   std::uint64_t seed, const std::string& name, double label_noise) {
  Rng rng(seed);
  std::vector<std::pair<TextKind, Label>> plan;
  for (std::size_t i = 0; i < no_hate; ++i) {
    plan.emplace_back(rng.bernoulli(0.2) ? TextKind::Insult : TextKind::Neutral, Label::NoHate);
  }
  for (std::size_t i = 0; i < hate; ++i) plan.emplace_back(TextKind::Hateful, Label::Hate);
  rng.shuffle(std::span(plan));
  Dataset out;
  out.name = name;
  char id[64];
  for (std::size_t i = 0; i < plan.size(); ++i) {
    std::snprintf(id, sizeof id, "%s-%05zu", name.c_str(), i);
    Label label = plan[i].second;
    if (label_noise > 0.0 && rng.bernoulli(label_noise)) {
      label = label == Label::Hate ? Label::NoHate : Label::Hate;
    }
    out.examples.push_back({id, sentence(lexicon, lang, plan[i].first, rng), label, name});
  }
  return out;
}

std::vector<std::string> bert_vocabulary(const Lexicon& lexicon) {
  std::vector<std::string> vocab{"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"};
  std::set<std::string> seen(vocab.begin(), vocab.end());
  auto add = [&](const std::string& token) {
    if (seen.insert(token).second) vocab.push_back(token);
  };
  for (const auto& p : kPunctuation) add(p);
  for (const auto* group : {&lexicon.neutral, &lexicon.insult, &lexicon.hateful}) {
    for (const auto& c : *group) {
      add(c.en);
      add(c.de);
    }
  }
  std::vector<std::string> chars;
  for (char c = 'a'; c <= 'z'; ++c) chars.emplace_back(1, c);
  for (char c = '0'; c <= '9'; ++c) chars.emplace_back(1, c);
  for (const char* c : {"ä", "ö", "ü", "ß"}) chars.emplace_back(c);
  for (const auto& c : chars) add(c);
  for (const auto& c : chars) add("##" + c);
  return vocab;
}

void write_germeval_file(const fs::path& path, const Lexicon& lexicon,
                         const GermevalCounts& counts, const GermevalCounts& tail,
                         std::uint64_t seed) {
  if (tail.other > counts.other || tail.abuse > counts.abuse || tail.insult > counts.insult ||
      tail.profanity > counts.profanity) {
    throw ValidationError("GermEval fixture: tail exceeds the totals");
  }
  Rng rng(seed);
  auto part = [&](std::size_t other, std::size_t abuse, std::size_t insult, std::size_t prof) {
    std::vector<std::string> fine;
    fine.insert(fine.end(), other, "OTHER");
    fine.insert(fine.end(), abuse, "ABUSE");
    fine.insert(fine.end(), insult, "INSULT");
    fine.insert(fine.end(), prof, "PROFANITY");
    rng.shuffle(std::span(fine));
    return fine;
  };
  auto lines = part(counts.other - tail.other, counts.abuse - tail.abuse,
                    counts.insult - tail.insult, counts.profanity - tail.profanity);
  const auto last = part(tail.other, tail.abuse, tail.insult, tail.profanity);
  lines.insert(lines.end(), last.begin(), last.end());
  std::string out;
  for (const auto& fine : lines) {
    const TextKind kind = fine == "OTHER"   ? TextKind::Neutral
                          : fine == "ABUSE" ? TextKind::Hateful
                                            : TextKind::Insult;
    out += sentence(lexicon, Language::German, kind, rng);
    out += fine == "OTHER" ? "\tOTHER\t" : "\tOFFENSE\t";
    out += fine + "\n";
  }
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  write_file(path, out);
}

void write_stormfront_dump(const fs::path& dir, const Lexicon& lexicon,
                           const StormfrontCounts& counts, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::string> labels;
  labels.insert(labels.end(), counts.no_hate, "noHate");
  labels.insert(labels.end(), counts.hate, "hate");
  labels.insert(labels.end(), counts.relation, "relation");
  labels.insert(labels.end(), counts.skip, "idk/skip");
  rng.shuffle(std::span(labels));
  fs::create_directories(dir / "all_files");
  std::string csv = "file_id,user_id,subforum_id,num_contexts,label\n";
  char id[32];
  for (std::size_t i = 0; i < labels.size(); ++i) {
    std::snprintf(id, sizeof id, "%08zu_%zu", 12000000 + i * 7, 1 + i % 3);
    const std::string& label = labels[i];
    std::string text;
    if (label == "noHate") {
      text = sentence(lexicon, Language::English,
                      rng.bernoulli(0.2) ? TextKind::Insult : TextKind::Neutral, rng);
    } else if (label == "idk/skip") {
      text = sentence(lexicon, Language::German, TextKind::Neutral, rng);
    } else {
      text = sentence(lexicon, Language::English, TextKind::Hateful, rng);
    }
    write_file(dir / "all_files" / (std::string(id) + ".txt"), text + "\n");
    csv += std::string(id) + "," + std::to_string(500000 + i % 97) + ",1346,0," + label + "\n";
  }
  write_file(dir / "annotations_metadata.csv", csv);
}

void write_forum_dump(const fs::path& path, const Lexicon& lexicon, std::size_t posts,
                      double hateful_fraction, std::uint64_t seed) {
  Rng rng(seed);
  std::string out;
  for (std::size_t p = 0; p < posts; ++p) {
    std::string post;
    const std::size_t paragraphs = 1 + rng.below(4);
    for (std::size_t i = 0; i < paragraphs; ++i) {
      if (i > 0) post += "\n";
      const double u = rng.uniform();
      if (u < 0.06) {
        post += "- " + sentence(lexicon, Language::German, TextKind::Neutral, rng);
      } else if (u < 0.10) {
        post += rng.bernoulli(0.5) ? "Danke" : "Gruß, Klaus";
      } else if (u < 0.13) {
        std::string quote;
        while (quote.size() < 1100) quote += sentence(lexicon, Language::German, TextKind::Neutral, rng) + " ";
        post += quote;
      } else if (u < 0.17) {
        post += sentence(lexicon, Language::English, TextKind::Neutral, rng);
      } else if (u < 0.20) {
        std::string cut = sentence(lexicon, Language::German, TextKind::Neutral, rng);
        cut.back() = ',';
        post += cut;
      } else if (u < 0.22) {
        post += "Es tut mir\nleid, aber " +
                sentence(lexicon, Language::German, TextKind::Neutral, rng);
      } else {
        const TextKind kind = rng.bernoulli(hateful_fraction) ? TextKind::Hateful
                              : rng.bernoulli(0.1)            ? TextKind::Insult
                                                              : TextKind::Neutral;
        post += sentence(lexicon, Language::German, kind, rng);
      }
    }
    out += nlohmann::json{{"thread", "forum"}, {"post", p}, {"text", post}}.dump() + "\n";
  }
  write_file(path, out);
}

void write_random_embeddings(const fs::path& path, std::size_t rows, int dimension,
                             std::uint64_t seed) {
  Rng rng(seed);
  std::string out = std::to_string(rows) + " " + std::to_string(dimension) + "\n";
  out.reserve(rows * static_cast<std::size_t>(dimension) * 9);
  char buf[32];
  for (std::size_t r = 0; r < rows; ++r) {
    std::snprintf(buf, sizeof buf, "w%07zu", r + 1);
    out += buf;
    for (int d = 0; d < dimension; ++d) {
      std::snprintf(buf, sizeof buf, " %.4f", rng.uniform(-1.0, 1.0));
      out += buf;
    }
    out += '\n';
  }
  write_file(path, out);
}

}  // namespace hsd::synth
