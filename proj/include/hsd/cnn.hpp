#pragma once

#include <memory>

#include "hsd/models.hpp"

namespace hsd::models {

// Frozen embedding lookup -> parallel convolutions -> global max-pool ->
// concatenate -> dropout -> [dense + ReLU -> dropout] -> 2-way softmax.
class CnnClassifier final : public Classifier {
 public:
  CnnClassifier(const CnnConfig& cfg, std::shared_ptr<const EmbeddingTable> table,
                std::uint64_t seed);

  Architecture architecture() const override { return Architecture::Cnn; }
  ModelInput encode(std::string_view text) const override;
  Probabilities forward(const ModelInput& input) const override;
  double accumulate_gradient(const ModelInput& input, Label gold, double scale,
                             Rng* rng) override;
  nn::ParameterList parameters() override;
  std::unique_ptr<Classifier> clone() const override;
  double dropout() const override { return cfg_.dropout; }
  void set_dropout(double rate) override { cfg_.dropout = rate; }
  nlohmann::json config_json() const override;

  const CnnConfig& config() const { return cfg_; }
  // Width of the concatenated pooled feature vector.
  Eigen::Index pooled_width() const;
  // Pooled features for an input, before dropout.
  nn::Vector pooled_features(const ModelInput& input) const;

  const std::shared_ptr<const EmbeddingTable>& table() const { return table_; }
  void set_table(std::shared_ptr<const EmbeddingTable> table);

 private:
  nn::Matrix embed(const ModelInput& input) const;

  CnnConfig cfg_;
  std::shared_ptr<const EmbeddingTable> table_;
  std::vector<nn::ConvMaxPool> convs_;
  nn::Linear hidden_;
  nn::Linear output_;
};

}  // namespace hsd::models
