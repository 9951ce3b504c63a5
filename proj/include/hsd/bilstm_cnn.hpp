#pragma once

#include <memory>

#include "hsd/models.hpp"

namespace hsd::models {

// Frozen embedding lookup -> bidirectional LSTM -> convolutions over the
// concatenated LSTM states -> global max-pool -> concatenate -> dropout ->
// dense + ReLU -> dropout -> 2-way softmax. The LSTM only reads the real
// tokens (at least one position, so empty input reads a single PAD).
class BiLstmCnnClassifier final : public Classifier {
 public:
  BiLstmCnnClassifier(const BiLstmConfig& cfg,
                      std::shared_ptr<const EmbeddingTable> table,
                      std::uint64_t seed);

  Architecture architecture() const override { return Architecture::BiLstmCnn; }
  ModelInput encode(std::string_view text) const override;
  Probabilities forward(const ModelInput& input) const override;
  double accumulate_gradient(const ModelInput& input, Label gold, double scale,
                             Rng* rng) override;
  nn::ParameterList parameters() override;
  std::unique_ptr<Classifier> clone() const override;
  double dropout() const override { return cfg_.dropout; }
  void set_dropout(double rate) override { cfg_.dropout = rate; }
  nlohmann::json config_json() const override;

  const BiLstmConfig& config() const { return cfg_; }
  Eigen::Index recurrent_width() const { return 2 * forward_lstm_.units(); }
  Eigen::Index pooled_width() const;
  // Per-timestep BiLSTM output (2H x steps) for an input.
  nn::Matrix recurrent_states(const ModelInput& input) const;
  nn::Vector pooled_features(const ModelInput& input) const;

  const std::shared_ptr<const EmbeddingTable>& table() const { return table_; }
  void set_table(std::shared_ptr<const EmbeddingTable> table);

 private:
  nn::Matrix embed(const ModelInput& input) const;

  BiLstmConfig cfg_;
  std::shared_ptr<const EmbeddingTable> table_;
  nn::Lstm forward_lstm_;
  nn::Lstm backward_lstm_;
  std::vector<nn::ConvMaxPool> convs_;
  nn::Linear dense_;
  nn::Linear output_;
};

}  // namespace hsd::models
