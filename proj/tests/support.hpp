#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "hsd/embeddings.hpp"
#include "hsd/synth.hpp"
#include "hsd/training.hpp"
#include "hsd/transformer.hpp"

namespace hsd::test {

namespace fs = std::filesystem;

// Fresh directory under the build tree's temp area, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

// GermEval train/test files with the official label counts; the last 809
// training lines hold 642 noHate / 167 Hate.
struct GermevalFixture {
  fs::path train, test;
};
GermevalFixture write_germeval_fixture(const fs::path& dir, std::uint64_t seed = 7);

// Stormfront dump with the original label counts (9488/1196/168/92).
fs::path write_stormfront_fixture(const fs::path& dir, std::uint64_t seed = 7);

struct EmbeddingFixture {
  fs::path en, de;
  std::shared_ptr<const EmbeddingTable> en_table, de_table;
};
EmbeddingFixture write_embedding_fixture(const fs::path& dir, int dimension = 24,
                                         std::uint64_t seed = 11);

// Small random BERT checkpoint over the synthetic bilingual vocabulary.
models::BertConfig tiny_bert_config();
fs::path write_tiny_bert(const fs::path& dir, std::uint64_t seed = 5);

// Every input a config can reference, written under one directory.
struct World {
  fs::path root;
  GermevalFixture germeval;
  fs::path stormfront_csv, forum, en_vec, de_vec, bert;
  // Config text with small model sizes; `extra` is appended verbatim.
  std::string config(const std::string& stage, const std::string& extra = "") const;
  fs::path write_config(const std::string& name, const std::string& stage,
                        const std::string& extra = "") const;
};
World write_world(const fs::path& dir, std::uint64_t seed = 7);

// Central-difference check of the weighted batch loss. Samples `random`
// entries uniformly over all trainable parameters plus `nonzero` entries
// whose analytic gradient is not negligible. Relative error is
// |a - n| / max(|a|, |n|, floor).
struct GradCheck {
  std::size_t checked = 0;
  std::size_t nontrivial = 0;
  double max_rel_error = 0.0;
  std::string worst;
};
GradCheck gradient_check(models::Classifier& net, const std::vector<models::ModelInput>& inputs,
                         const std::vector<Label>& gold, const models::TrainingHyperparams& hp,
                         std::size_t random, std::size_t nonzero, std::uint64_t seed,
                         double step = 1e-5, double floor = 1e-6);

// 32-example balanced toy set (16/16) in the given language.
Dataset toy_set(synth::Language lang, std::uint64_t seed, std::size_t per_class = 16);

}  // namespace hsd::test
