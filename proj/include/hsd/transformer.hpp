#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "hsd/models.hpp"
#include "hsd/safetensors.hpp"
#include "hsd/wordpiece.hpp"

namespace hsd::models {

// Subset of a Hugging Face BERT config.json that the encoder needs.
struct BertConfig {
  int vocab_size = 0;
  int hidden_size = 768;
  int num_hidden_layers = 12;
  int num_attention_heads = 12;
  int intermediate_size = 3072;
  int max_position_embeddings = 512;
  int type_vocab_size = 2;
  double layer_norm_eps = 1e-12;
  double hidden_dropout_prob = 0.1;
  double attention_probs_dropout_prob = 0.1;

  static BertConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
};

struct LayerNorm {
  nn::Parameter gamma;
  nn::Parameter beta;
  double eps = 1e-12;

  struct Cache {
    nn::Matrix normalized;
    nn::Vector inv_std;
  };

  LayerNorm() = default;
  LayerNorm(const std::string& name, Eigen::Index dim, double epsilon);

  nn::Matrix forward(const nn::Matrix& x, Cache* cache) const;
  nn::Matrix backward(const Cache& cache, const nn::Matrix& dy);
  void collect(nn::ParameterList& out) { out.push_back(&gamma); out.push_back(&beta); }
};

// Pretrained BERT encoder + pooler + fresh 2-way classification head.
// Inputs are encoded with the checkpoint's own WordPiece vocabulary.
class TransformerClassifier final : public Classifier {
 public:
  // Loads the encoder from a checkpoint directory. The classification head
  // is read from the checkpoint when present, otherwise initialised from
  // `seed`.
  TransformerClassifier(const TransformerConfig& cfg, const std::filesystem::path& dir,
                        std::uint64_t seed);

  Architecture architecture() const override { return Architecture::Transformer; }
  ModelInput encode(std::string_view text) const override;
  Probabilities forward(const ModelInput& input) const override;
  double accumulate_gradient(const ModelInput& input, Label gold, double scale,
                             Rng* rng) override;
  nn::ParameterList parameters() override;
  std::unique_ptr<Classifier> clone() const override;
  double dropout() const override { return cfg_.dropout; }
  void set_dropout(double rate) override { cfg_.dropout = rate; }
  bool uses_class_weights() const override { return false; }
  nlohmann::json config_json() const override;

  const BertConfig& bert_config() const { return bert_; }
  const WordPieceTokenizer& tokenizer() const { return tokenizer_; }
  const TransformerConfig& config() const { return cfg_; }
  Eigen::Index hidden_size() const { return bert_.hidden_size; }
  Eigen::Index head_parameter_count() const;
  nn::Vector logits(const ModelInput& input) const;

  // Writes config.json, vocab.txt, tokenizer_config.json and
  // model.safetensors (including the classification head).
  void save_checkpoint(const std::filesystem::path& dir) const;

 private:
  struct EncoderLayer {
    nn::Linear query, key, value, attention_output;
    LayerNorm attention_norm;
    nn::Linear intermediate, output;
    LayerNorm output_norm;
  };
  struct LayerCache;
  struct ForwardCache;

  nn::Vector run(const ModelInput& input, Rng* rng, ForwardCache* cache) const;
  TensorMap export_tensors() const;

  TransformerConfig cfg_;
  BertConfig bert_;
  WordPieceTokenizer tokenizer_;
  nn::Parameter word_embeddings_;      // vocab x H
  nn::Parameter position_embeddings_;  // positions x H
  nn::Parameter type_embeddings_;      // types x H
  LayerNorm embedding_norm_;
  std::vector<EncoderLayer> layers_;
  nn::Linear pooler_;
  nn::Linear classifier_;
};

// Resolves a model identifier: an existing directory is used as is,
// otherwise it is looked up under $HSD_MODEL_REGISTRY.
std::filesystem::path resolve_checkpoint(const std::string& identifier);

// A vocabulary is treated as covering both pipeline languages when it has
// common English words and pieces carrying each of ä, ö, ü and ß.
bool covers_english_and_german(const WordPieceTokenizer& tokenizer);

// Writes a randomly initialised encoder checkpoint in the Hugging Face
// BERT layout (no classification head). Used for fixtures and smoke runs.
void write_random_bert_checkpoint(const std::filesystem::path& dir, BertConfig config,
                                  const std::vector<std::string>& vocab, bool lowercase,
                                  std::uint64_t seed);

}  // namespace hsd::models
