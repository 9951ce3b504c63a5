#include "hsd/bilstm_cnn.hpp"

#include <cmath>

#include "hsd/errors.hpp"
#include "hsd/tokenize.hpp"

namespace hsd::models {

BiLstmCnnClassifier::BiLstmCnnClassifier(const BiLstmConfig& cfg,
                                         std::shared_ptr<const EmbeddingTable> table,
                                         std::uint64_t seed)
    : cfg_(cfg), table_(std::move(table)) {
  if (!table_) throw ValidationError("build_bilstm_cnn: embedding table not loaded");
  if (cfg_.recurrent_units < 1 || cfg_.conv_feature_maps < 1 || cfg_.dense_units < 1) {
    throw ValidationError("build_bilstm_cnn: layer sizes must be positive");
  }
  if (cfg_.kernel_sizes.empty()) throw ValidationError("build_bilstm_cnn: no kernel sizes");
  if (cfg_.max_len < 1) throw ValidationError("build_bilstm_cnn: max_len < 1");
  if (cfg_.dropout < 0.0 || cfg_.dropout >= 1.0) {
    throw ValidationError("build_bilstm_cnn: dropout must be in [0, 1)");
  }
  for (int k : cfg_.kernel_sizes) {
    if (k < 1 || k > cfg_.max_len) {
      throw ValidationError("build_bilstm_cnn: kernel size " + std::to_string(k) +
                            " exceeds max_len " + std::to_string(cfg_.max_len));
    }
  }

  Rng rng(seed);
  const Eigen::Index dim = table_->dimension();
  forward_lstm_ = nn::Lstm("lstm_fw", dim, cfg_.recurrent_units);
  backward_lstm_ = nn::Lstm("lstm_bw", dim, cfg_.recurrent_units);
  forward_lstm_.init(rng);
  backward_lstm_.init(rng);
  for (int k : cfg_.kernel_sizes) {
    convs_.emplace_back("conv" + std::to_string(k), k, recurrent_width(),
                        cfg_.conv_feature_maps);
    nn::glorot_uniform(convs_.back().weight.value, rng);
  }
  dense_ = nn::Linear("dense", pooled_width(), cfg_.dense_units);
  nn::glorot_uniform(dense_.weight.value, rng);
  output_ = nn::Linear("output", cfg_.dense_units, 2);
  nn::glorot_uniform(output_.weight.value, rng);
}

Eigen::Index BiLstmCnnClassifier::pooled_width() const {
  return static_cast<Eigen::Index>(cfg_.kernel_sizes.size()) * cfg_.conv_feature_maps;
}

void BiLstmCnnClassifier::set_table(std::shared_ptr<const EmbeddingTable> table) {
  if (!table || table->dimension() != table_->dimension()) {
    throw ValidationError("BiLSTM: embedding dimension mismatch (" +
                          std::to_string(table ? table->dimension() : 0) + " vs " +
                          std::to_string(table_->dimension()) + ")");
  }
  table_ = std::move(table);
}

ModelInput BiLstmCnnClassifier::encode(std::string_view text) const {
  const auto tokens = tokenize(text);
  auto encoded = hsd::encode(tokens, *table_, cfg_.max_len);
  return {std::move(encoded.indices), encoded.true_length};
}

nn::Matrix BiLstmCnnClassifier::embed(const ModelInput& input) const {
  const int steps = std::max(input.length, 1);
  nn::Matrix seq(table_->dimension(), steps);
  for (int t = 0; t < steps; ++t) {
    const int idx = t < input.length ? input.ids[static_cast<std::size_t>(t)]
                                     : EmbeddingTable::kPad;
    seq.col(t) = table_->row(idx).transpose();
  }
  return seq;
}

nn::Matrix BiLstmCnnClassifier::recurrent_states(const ModelInput& input) const {
  const nn::Matrix seq = embed(input);
  const Eigen::Index h = forward_lstm_.units();
  nn::Matrix states(2 * h, seq.cols());
  states.topRows(h) = forward_lstm_.forward(seq, false, nullptr);
  states.bottomRows(h) = backward_lstm_.forward(seq, true, nullptr);
  return states;
}

nn::Vector BiLstmCnnClassifier::pooled_features(const ModelInput& input) const {
  const nn::Matrix states = recurrent_states(input);
  const int steps = static_cast<int>(states.cols());
  nn::Vector features(pooled_width());
  Eigen::Index offset = 0;
  for (const auto& conv : convs_) {
    features.segment(offset, conv.maps()) = conv.forward(states, steps, nullptr);
    offset += conv.maps();
  }
  return features;
}

Probabilities BiLstmCnnClassifier::forward(const ModelInput& input) const {
  const nn::Matrix pooled = pooled_features(input);
  const nn::Matrix hidden = dense_.forward(pooled).cwiseMax(0.0);
  const nn::Vector p = nn::softmax(output_.forward(hidden).col(0));
  return {p(0), p(1)};
}

double BiLstmCnnClassifier::accumulate_gradient(const ModelInput& input, Label gold,
                                                double scale, Rng* rng) {
  const nn::Matrix seq = embed(input);
  const Eigen::Index h = forward_lstm_.units();
  const int steps = static_cast<int>(seq.cols());
  nn::Lstm::Cache fw_cache, bw_cache;
  nn::Matrix states(2 * h, steps);
  states.topRows(h) = forward_lstm_.forward(seq, false, &fw_cache);
  states.bottomRows(h) = backward_lstm_.forward(seq, true, &bw_cache);

  std::vector<nn::ConvMaxPool::Cache> caches(convs_.size());
  nn::Matrix pooled(pooled_width(), 1);
  Eigen::Index offset = 0;
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    pooled.block(offset, 0, convs_[i].maps(), 1) =
        convs_[i].forward(states, steps, &caches[i]);
    offset += convs_[i].maps();
  }
  const nn::Matrix mask1 = nn::dropout_mask(pooled.rows(), 1, cfg_.dropout, rng);
  const nn::Matrix dropped = pooled.cwiseProduct(mask1);
  const nn::Matrix dense_pre = dense_.forward(dropped);
  const nn::Matrix mask2 = nn::dropout_mask(dense_pre.rows(), 1, cfg_.dropout, rng);
  const nn::Matrix dense_out = dense_pre.cwiseMax(0.0).cwiseProduct(mask2);
  const nn::Vector p = nn::softmax(output_.forward(dense_out).col(0));
  const std::size_t g = index_of(gold);
  const double loss = -std::log(std::max(p(static_cast<Eigen::Index>(g)), 1e-300));

  nn::Matrix dlogits = p;
  dlogits(static_cast<Eigen::Index>(g), 0) -= 1.0;
  dlogits *= scale;
  nn::Matrix d = output_.backward(dense_out, dlogits).cwiseProduct(mask2);
  d = (dense_pre.array() > 0.0).select(d, 0.0);
  const nn::Matrix dpooled = dense_.backward(dropped, d).cwiseProduct(mask1);

  nn::Matrix dstates = nn::Matrix::Zero(2 * h, steps);
  offset = 0;
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    convs_[i].backward(caches[i], dpooled.block(offset, 0, convs_[i].maps(), 1), &dstates);
    offset += convs_[i].maps();
  }
  forward_lstm_.backward(fw_cache, dstates.topRows(h));
  backward_lstm_.backward(bw_cache, dstates.bottomRows(h));
  return loss;
}

nn::ParameterList BiLstmCnnClassifier::parameters() {
  nn::ParameterList out;
  forward_lstm_.collect(out);
  backward_lstm_.collect(out);
  for (auto& conv : convs_) conv.collect(out);
  dense_.collect(out);
  output_.collect(out);
  return out;
}

std::unique_ptr<Classifier> BiLstmCnnClassifier::clone() const {
  return std::make_unique<BiLstmCnnClassifier>(*this);
}

nlohmann::json BiLstmCnnClassifier::config_json() const {
  return {{"recurrent_units", cfg_.recurrent_units},
          {"conv_feature_maps", cfg_.conv_feature_maps},
          {"kernel_sizes", cfg_.kernel_sizes},
          {"dense_units", cfg_.dense_units},
          {"dropout", cfg_.dropout},
          {"max_len", cfg_.max_len},
          {"embedding_dimension", table_->dimension()}};
}

}  // namespace hsd::models
