#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "hsd/dataset.hpp"
#include "hsd/evaluation.hpp"
#include "hsd/models.hpp"

namespace hsd::bootstrap {

inline constexpr std::size_t kMembers = 3;

// Three voters; the pipeline uses CNN, BiLSTM-CNN and transformer, in that
// order.
struct Ensemble {
  std::array<models::TrainedModel, kMembers> members;
};

using Votes = std::array<Label, kMembers>;

// Label with at least two of the three votes.
Label majority(const Votes& votes);

struct VoteRecord {
  std::string id;
  Votes votes{};
  Label label = Label::NoHate;
};

struct DroppedExample {
  std::string id;
  std::string reason;
};

// Ensemble-labeled data. Gold labels of the input, if any, are moved into
// `shadow_gold` (aligned with data.examples) and never appear in `data`.
struct BootstrappedDataset {
  Dataset data;
  std::vector<VoteRecord> votes;
  std::vector<std::optional<Label>> shadow_gold;
  std::vector<DroppedExample> dropped;
  nlohmann::json provenance;

  bool has_gold() const;
  // Input dataset with the gold labels restored, for auditing.
  Dataset gold_dataset() const;
};

// An example on which any member fails to predict is dropped and recorded.
BootstrappedDataset ensemble_label(const Ensemble& ensemble, const Dataset& unlabeled);

// Gold rows x ensemble columns. Throws ValidationError listing the ids of
// `boot` missing from `gold` (or unlabeled there).
evaluation::ConfusionMatrix audit_against_gold(const BootstrappedDataset& boot,
                                               const Dataset& gold);

using HyperparamMap = std::map<models::Architecture, models::TrainingHyperparams>;

// Relabels `unlabeled` with the ensemble, then fine-tunes every member on
// that one frozen labeled set. With rounds > 1 the relabel/fine-tune cycle
// repeats using the updated members. The input ensemble is not modified.
Ensemble bootstrap_round(const Ensemble& ensemble, const Dataset& unlabeled,
                         const HyperparamMap& hyperparams, int rounds = 1,
                         const Dataset* dev = nullptr,
                         BootstrappedDataset* first_labeling = nullptr);

// Sidecar: `id<TAB>vote1<TAB>vote2<TAB>vote3<TAB>majority` per line.
std::string format_votes(const BootstrappedDataset& boot);
std::vector<VoteRecord> parse_votes(std::string_view content);
void write_bootstrapped(const std::filesystem::path& tsv, const BootstrappedDataset& boot);

}  // namespace hsd::bootstrap
