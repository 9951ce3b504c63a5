#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hsd/bootstrap.hpp"
#include "hsd/config.hpp"
#include "hsd/evaluation.hpp"
#include "hsd/models.hpp"

namespace hsd::experiments {

struct Prepared {
  Dataset de_train, de_dev, de_test;
  Dataset en_train, en_dev, en_test;
  // Stormfront examples left out of every English split.
  Dataset en_excluded;
};

// Relabels and splits the configured sources, writing
// <out>/data/<NAME>.tsv plus a .meta.json sidecar per dataset. Datasets
// whose sources are not configured stay empty.
Prepared prepare(const config::ExperimentConfig& cfg, const std::filesystem::path& out);

// Applies the training spec to EN-TRAIN and every sweep spec to the sweep
// languages' training sets; writes <out>/data/sampled/<NAME>.tsv. Counts
// are re-checked against the spec before anything is written.
std::vector<Dataset> sample(const config::ExperimentConfig& cfg, const Prepared& data,
                            const std::filesystem::path& out);

// EN-TRAIN resampled with the training spec and capped by train_limit.
Dataset crosslingual_training_set(const config::ExperimentConfig& cfg, const Prepared& data);

// Trains every configured architecture on the cross-lingual training set
// with DE-DEV model selection. Checkpoints go to <out>/models/crosslingual
// and are reused when their cache key matches. Embedding-based models are
// returned with the German table bound.
std::map<models::Architecture, models::TrainedModel> train_crosslingual(
    const config::ExperimentConfig& cfg, const Prepared& data, const std::filesystem::path& out);

std::vector<evaluation::EvalReport> run_crosslingual(const config::ExperimentConfig& cfg,
                                                     const std::filesystem::path& out);

struct BootstrapResult {
  std::vector<evaluation::EvalReport> before;
  std::vector<evaluation::EvalReport> after;
  std::optional<evaluation::ConfusionMatrix> audit;
  ClassCounts labeled;
  std::size_t unlabeled_size = 0;
  std::size_t dropped = 0;
};

BootstrapResult run_bootstrap(const config::ExperimentConfig& cfg,
                              const std::filesystem::path& out);

std::vector<evaluation::EvalReport> run_imbalance_sweep(const config::ExperimentConfig& cfg,
                                                        const std::filesystem::path& out);

// Collects <out>/reports/<stage>/*.json into comparison tables, writing
// comparison.txt and comparison.csv per stage. Returns the text tables.
std::string report(const std::filesystem::path& out);

// Output directory: `out_override` when given, else the config's `out`.
std::filesystem::path output_dir(const config::ExperimentConfig& cfg,
                                 const std::optional<std::filesystem::path>& out_override);

}  // namespace hsd::experiments
