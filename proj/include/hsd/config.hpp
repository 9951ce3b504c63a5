#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hsd/corpus.hpp"
#include "hsd/models.hpp"
#include "hsd/sampling.hpp"

namespace hsd::config {

enum class Stage { Crosslingual, Bootstrap, ImbalanceSweep };

std::string_view to_string(Stage stage);

enum class BootstrapTarget { GermanTrain, Forum };

// Experiment configuration. INI syntax: top-level keys, then sections
// [data], [embeddings], [sampling], [bootstrap] and one section per
// architecture ([cnn], [bilstm], [transformer]) holding its model settings
// and training hyperparameters. Fine-tuning hyperparameters live in
// [cnn_finetune] etc. Relative paths resolve against the config's folder.
struct ExperimentConfig {
  Stage stage = Stage::Crosslingual;
  std::uint64_t seed = 0;
  std::filesystem::path out;

  struct Data {
    std::filesystem::path germeval_train;
    std::filesystem::path germeval_test;
    std::filesystem::path stormfront_csv;
    std::filesystem::path forum_dump;
    corpus::EnglishSplitCounts english_counts;
    // Caps the training set of every run; 0 keeps everything.
    std::size_t train_limit = 0;
  } data;

  struct Embeddings {
    std::filesystem::path en;
    std::filesystem::path de;
    std::optional<std::size_t> max_vocab;
  } embeddings;

  // Sampling applied to EN-TRAIN before cross-lingual training.
  sampling::SamplingSpec train_sampling{{1, 1}, sampling::Mode::Oversample, 0};
  // Sweep grid; each spec is applied to every language in sweep_languages.
  std::vector<sampling::SamplingSpec> sweep;
  std::vector<std::string> sweep_languages{"DE"};

  struct Bootstrap {
    BootstrapTarget target = BootstrapTarget::GermanTrain;
    int rounds = 1;
  } bootstrap;

  std::vector<models::Architecture> architectures{
      models::Architecture::Cnn, models::Architecture::BiLstmCnn,
      models::Architecture::Transformer};
  models::CnnConfig cnn;
  models::BiLstmConfig bilstm;
  models::TransformerConfig transformer;
  std::map<models::Architecture, models::TrainingHyperparams> train_hp;
  std::map<models::Architecture, models::TrainingHyperparams> finetune_hp;

  // sha256 of the canonical key/value listing of the parsed file (seed
  // excluded; it is recorded separately).
  std::string hash;
  std::filesystem::path source;

  bool uses(models::Architecture arch) const;
};

// Default hyperparameters. `stage` is "train" (EN-OS[1:1]), "rel"
// (fine-tuning on DE-REL*) or "new" (fine-tuning on DE-NEW).
models::TrainingHyperparams default_hyperparams(models::Architecture arch,
                                                  std::string_view stage);

// Throws ValidationError on syntax errors, unknown keys, bad values, or
// missing referenced files.
ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<std::uint64_t> seed_override = std::nullopt);
ExperimentConfig parse_config(const std::string& content, const std::filesystem::path& base_dir,
                              std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace hsd::config
