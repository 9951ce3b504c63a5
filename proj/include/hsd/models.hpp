#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hsd/dataset.hpp"
#include "hsd/embeddings.hpp"
#include "hsd/nn.hpp"

namespace hsd::models {

enum class Architecture { Cnn, BiLstmCnn, Transformer };

std::string_view to_string(Architecture arch);
std::optional<Architecture> parse_architecture(std::string_view text);

// (P(noHate), P(Hate))
using Probabilities = std::array<double, 2>;

// Token ids plus the number of real (non-padding) positions.
struct ModelInput {
  std::vector<int> ids;
  int length = 0;
};

// A binary text classifier with a hand-written backward pass.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual Architecture architecture() const = 0;

  // Throws ValidationError when the text cannot be encoded.
  virtual ModelInput encode(std::string_view text) const = 0;

  // Inference-mode forward pass (no dropout).
  virtual Probabilities forward(const ModelInput& input) const = 0;

  // Training-mode forward pass with dropout drawn from `rng` (none when
  // null); adds scale * d(-log p_gold)/d(theta) into every parameter's grad
  // and returns -log p_gold.
  virtual double accumulate_gradient(const ModelInput& input, Label gold,
                                     double scale, Rng* rng) = 0;

  virtual nn::ParameterList parameters() = 0;
  virtual std::unique_ptr<Classifier> clone() const = 0;

  virtual double dropout() const = 0;
  virtual void set_dropout(double rate) = 0;

  // Whether per-class loss weights apply to this architecture.
  virtual bool uses_class_weights() const { return true; }

  // Architecture configuration as stored in the checkpoint manifest.
  virtual nlohmann::json config_json() const = 0;
};

struct TrainingHyperparams {
  double weight_no_hate = 1.0;
  double weight_hate = 1.0;
  double dropout = 0.5;
  double learning_rate = 1e-3;
  int batch_size = 32;
  int epochs = 1;
  std::uint64_t seed = 0;

  double weight(Label label) const {
    return label == Label::Hate ? weight_hate : weight_no_hate;
  }
  void validate() const;  // throws ValidationError
  bool operator==(const TrainingHyperparams&) const = default;
};

nlohmann::json to_json(const TrainingHyperparams& hp);
TrainingHyperparams hyperparams_from_json(const nlohmann::json& j);

struct EpochRecord {
  int epoch = 0;
  double mean_loss = 0.0;
  std::optional<double> dev_macro_f1;
};

// One training or fine-tuning stage in a model's provenance.
struct StageRecord {
  std::string stage;    // "train" / "fine_tune"
  std::string dataset;  // training dataset name
  std::size_t examples = 0;
  TrainingHyperparams hyperparams;
  std::vector<EpochRecord> epochs;
  std::optional<int> best_epoch;
  std::optional<double> dev_macro_f1;
};

nlohmann::json to_json(const StageRecord& record);
StageRecord stage_from_json(const nlohmann::json& j);

// A classifier plus its training provenance. Copies are deep.
class TrainedModel {
 public:
  TrainedModel() = default;
  TrainedModel(std::unique_ptr<Classifier> net, std::uint64_t init_seed);
  TrainedModel(const TrainedModel& other);
  TrainedModel& operator=(const TrainedModel& other);
  TrainedModel(TrainedModel&&) noexcept = default;
  TrainedModel& operator=(TrainedModel&&) noexcept = default;

  Architecture architecture() const { return net_->architecture(); }
  const Classifier& net() const { return *net_; }
  Classifier& net() { return *net_; }
  bool valid() const { return net_ != nullptr; }

  std::uint64_t init_seed() const { return init_seed_; }
  const std::vector<StageRecord>& history() const { return history_; }
  void add_stage(StageRecord record) { history_.push_back(std::move(record)); }

  // Embedding-based architectures only: swaps in another language's table
  // from the same aligned space. Rejects tables of a different dimension.
  void bind_embeddings(std::shared_ptr<const EmbeddingTable> table);
  std::shared_ptr<const EmbeddingTable> embeddings() const;

 private:
  std::unique_ptr<Classifier> net_;
  std::uint64_t init_seed_ = 0;
  std::vector<StageRecord> history_;
};

struct CnnConfig {
  std::vector<int> filter_sizes{3, 4, 5};
  int filters_per_size = 100;
  // 0: pooled features feed the output layer directly.
  int dense_units = 0;
  double dropout = 0.5;
  bool frozen_embeddings = true;
  int max_len = 64;
};

struct BiLstmConfig {
  int recurrent_units = 100;
  int conv_feature_maps = 200;
  std::vector<int> kernel_sizes{3, 4, 5};
  int dense_units = 100;
  double dropout = 0.5;
  int max_len = 64;
};

struct TransformerConfig {
  // Checkpoint directory, or a name resolved under $HSD_MODEL_REGISTRY.
  std::string model_identifier;
  double dropout = 0.1;
  int max_subword_len = 128;
};

TrainedModel build_cnn(const CnnConfig& cfg,
                       std::shared_ptr<const EmbeddingTable> table,
                       std::uint64_t seed);
TrainedModel build_bilstm_cnn(const BiLstmConfig& cfg,
                              std::shared_ptr<const EmbeddingTable> table,
                              std::uint64_t seed);
TrainedModel build_transformer_classifier(const TransformerConfig& cfg,
                                          std::uint64_t seed);

// Checkpoint directory: manifest.json (architecture, config, provenance)
// plus parameters. Transformer checkpoints keep the Hugging Face BERT
// layout (config.json, vocab.txt, model.safetensors).
void save_model(const TrainedModel& model, const std::filesystem::path& dir);

struct LoadOptions {
  // Replaces the embedding file recorded in the manifest.
  std::shared_ptr<const EmbeddingTable> embeddings;
};

TrainedModel load_model(const std::filesystem::path& dir, const LoadOptions& options = {});

}  // namespace hsd::models
