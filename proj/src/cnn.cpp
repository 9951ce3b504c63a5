#include "hsd/cnn.hpp"

#include <cmath>

#include "hsd/errors.hpp"
#include "hsd/tokenize.hpp"

namespace hsd::models {

CnnClassifier::CnnClassifier(const CnnConfig& cfg,
                             std::shared_ptr<const EmbeddingTable> table,
                             std::uint64_t seed)
    : cfg_(cfg), table_(std::move(table)) {
  if (!table_) throw ValidationError("build_cnn: embedding table not loaded");
  if (!cfg_.frozen_embeddings) {
    throw ValidationError("build_cnn: embeddings must be frozen");
  }
  if (cfg_.filter_sizes.empty()) throw ValidationError("build_cnn: no filter sizes");
  if (cfg_.filters_per_size < 1) throw ValidationError("build_cnn: filters_per_size < 1");
  if (cfg_.max_len < 1) throw ValidationError("build_cnn: max_len < 1");
  if (cfg_.dropout < 0.0 || cfg_.dropout >= 1.0) {
    throw ValidationError("build_cnn: dropout must be in [0, 1)");
  }
  for (int k : cfg_.filter_sizes) {
    if (k < 1 || k > cfg_.max_len) {
      throw ValidationError("build_cnn: filter size " + std::to_string(k) +
                            " exceeds max_len " + std::to_string(cfg_.max_len));
    }
  }

  Rng rng(seed);
  const Eigen::Index dim = table_->dimension();
  for (std::size_t i = 0; i < cfg_.filter_sizes.size(); ++i) {
    convs_.emplace_back("conv" + std::to_string(cfg_.filter_sizes[i]),
                        cfg_.filter_sizes[i], dim, cfg_.filters_per_size);
    nn::glorot_uniform(convs_.back().weight.value, rng);
  }
  Eigen::Index features = pooled_width();
  if (cfg_.dense_units > 0) {
    hidden_ = nn::Linear("hidden", features, cfg_.dense_units);
    nn::glorot_uniform(hidden_.weight.value, rng);
    features = cfg_.dense_units;
  }
  output_ = nn::Linear("output", features, 2);
  nn::glorot_uniform(output_.weight.value, rng);
}

Eigen::Index CnnClassifier::pooled_width() const {
  return static_cast<Eigen::Index>(cfg_.filter_sizes.size()) * cfg_.filters_per_size;
}

void CnnClassifier::set_table(std::shared_ptr<const EmbeddingTable> table) {
  if (!table || table->dimension() != table_->dimension()) {
    throw ValidationError("CNN: embedding dimension mismatch (" +
                          std::to_string(table ? table->dimension() : 0) + " vs " +
                          std::to_string(table_->dimension()) + ")");
  }
  table_ = std::move(table);
}

ModelInput CnnClassifier::encode(std::string_view text) const {
  const auto tokens = tokenize(text);
  auto encoded = hsd::encode(tokens, *table_, cfg_.max_len);
  return {std::move(encoded.indices), encoded.true_length};
}

nn::Matrix CnnClassifier::embed(const ModelInput& input) const {
  const int steps = std::max(input.length, 1);
  nn::Matrix seq(table_->dimension(), steps);
  for (int t = 0; t < steps; ++t) {
    const int idx = t < input.length ? input.ids[static_cast<std::size_t>(t)]
                                     : EmbeddingTable::kPad;
    seq.col(t) = table_->row(idx).transpose();
  }
  return seq;
}

nn::Vector CnnClassifier::pooled_features(const ModelInput& input) const {
  const nn::Matrix seq = embed(input);
  nn::Vector features(pooled_width());
  Eigen::Index offset = 0;
  for (const auto& conv : convs_) {
    features.segment(offset, conv.maps()) = conv.forward(seq, input.length, nullptr);
    offset += conv.maps();
  }
  return features;
}

Probabilities CnnClassifier::forward(const ModelInput& input) const {
  nn::Matrix h = pooled_features(input);
  if (cfg_.dense_units > 0) h = hidden_.forward(h).cwiseMax(0.0);
  const nn::Vector p = nn::softmax(output_.forward(h).col(0));
  return {p(0), p(1)};
}

double CnnClassifier::accumulate_gradient(const ModelInput& input, Label gold,
                                          double scale, Rng* rng) {
  const nn::Matrix seq = embed(input);
  std::vector<nn::ConvMaxPool::Cache> caches(convs_.size());
  nn::Matrix pooled(pooled_width(), 1);
  Eigen::Index offset = 0;
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    pooled.block(offset, 0, convs_[i].maps(), 1) =
        convs_[i].forward(seq, input.length, &caches[i]);
    offset += convs_[i].maps();
  }
  const nn::Matrix mask1 = nn::dropout_mask(pooled.rows(), 1, cfg_.dropout, rng);
  const nn::Matrix dropped = pooled.cwiseProduct(mask1);

  nn::Matrix hidden_pre, hidden_out, mask2;
  const nn::Matrix* top = &dropped;
  if (cfg_.dense_units > 0) {
    hidden_pre = hidden_.forward(dropped);
    mask2 = nn::dropout_mask(hidden_pre.rows(), 1, cfg_.dropout, rng);
    hidden_out = hidden_pre.cwiseMax(0.0).cwiseProduct(mask2);
    top = &hidden_out;
  }
  const nn::Vector p = nn::softmax(output_.forward(*top).col(0));
  const std::size_t g = index_of(gold);
  const double loss = -std::log(std::max(p(static_cast<Eigen::Index>(g)), 1e-300));

  nn::Matrix dlogits = p;
  dlogits(static_cast<Eigen::Index>(g), 0) -= 1.0;
  dlogits *= scale;
  nn::Matrix dtop = output_.backward(*top, dlogits);
  if (cfg_.dense_units > 0) {
    dtop = dtop.cwiseProduct(mask2);
    dtop = (hidden_pre.array() > 0.0).select(dtop, 0.0);
    dtop = hidden_.backward(dropped, dtop);
  }
  const nn::Matrix dpooled = dtop.cwiseProduct(mask1);

  // Frozen embeddings: no gradient is propagated into the input sequence.
  offset = 0;
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    convs_[i].backward(caches[i], dpooled.block(offset, 0, convs_[i].maps(), 1), nullptr);
    offset += convs_[i].maps();
  }
  return loss;
}

nn::ParameterList CnnClassifier::parameters() {
  nn::ParameterList out;
  for (auto& conv : convs_) conv.collect(out);
  if (cfg_.dense_units > 0) hidden_.collect(out);
  output_.collect(out);
  return out;
}

std::unique_ptr<Classifier> CnnClassifier::clone() const {
  return std::make_unique<CnnClassifier>(*this);
}

nlohmann::json CnnClassifier::config_json() const {
  return {{"filter_sizes", cfg_.filter_sizes},
          {"filters_per_size", cfg_.filters_per_size},
          {"dense_units", cfg_.dense_units},
          {"dropout", cfg_.dropout},
          {"frozen_embeddings", cfg_.frozen_embeddings},
          {"max_len", cfg_.max_len},
          {"embedding_dimension", table_->dimension()}};
}

}  // namespace hsd::models
