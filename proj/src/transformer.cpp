#include "hsd/transformer.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "hsd/dataset.hpp"
#include "hsd/errors.hpp"
#include "hsd/utf8.hpp"

namespace hsd::models {
namespace {

namespace fs = std::filesystem;

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); }

double gelu_grad(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return cdf + x * pdf;
}

void row_softmax(nn::Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double top = m.row(i).maxCoeff();
    m.row(i) = (m.row(i).array() - top).exp().matrix();
    m.row(i) /= m.row(i).sum();
  }
}

nn::Matrix to_matrix(const Tensor& t, const std::string& name) {
  if (t.shape.size() == 1) {
    return Eigen::Map<const nn::Vector>(t.data.data(), t.shape[0]);
  }
  if (t.shape.size() == 2) {
    return Eigen::Map<const RowMatrix>(t.data.data(), t.shape[0], t.shape[1]);
  }
  throw ValidationError("tensor " + name + " has unsupported rank");
}

Tensor to_tensor(const nn::Matrix& m) {
  Tensor t;
  if (m.cols() == 1) {
    t.shape = {m.rows()};
    t.data.assign(m.data(), m.data() + m.size());
  } else {
    t.shape = {m.rows(), m.cols()};
    const RowMatrix row_major = m;
    t.data.assign(row_major.data(), row_major.data() + row_major.size());
  }
  return t;
}

// Finds a tensor under the names used by BertModel / BertFor* checkpoints.
const Tensor* find_tensor(const TensorMap& tensors, const std::string& name) {
  std::vector<std::string> candidates{"bert." + name, name};
  for (const auto& [from, to] : {std::pair<std::string, std::string>{"LayerNorm.weight", "LayerNorm.gamma"},
                                 {"LayerNorm.bias", "LayerNorm.beta"}}) {
    if (name.ends_with(from)) {
      const std::string legacy = name.substr(0, name.size() - from.size()) + to;
      candidates.push_back("bert." + legacy);
      candidates.push_back(legacy);
    }
  }
  for (const auto& c : candidates) {
    if (const auto it = tensors.find(c); it != tensors.end()) return &it->second;
  }
  return nullptr;
}

void assign(nn::Parameter& param, const TensorMap& tensors, const std::string& name,
            bool required = true) {
  const Tensor* t = find_tensor(tensors, name);
  if (t == nullptr) {
    if (required) throw ValidationError("checkpoint lacks tensor " + name);
    return;
  }
  nn::Matrix m = to_matrix(*t, name);
  if (m.rows() != param.value.rows() || m.cols() != param.value.cols()) {
    throw ValidationError("checkpoint tensor " + name + " has shape " +
                          std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                          ", expected " + std::to_string(param.value.rows()) + "x" +
                          std::to_string(param.value.cols()));
  }
  param.value = std::move(m);
  param.zero_grad();
}

bool read_lowercase_flag(const fs::path& dir) {
  const fs::path tok = dir / "tokenizer_config.json";
  if (fs::exists(tok)) {
    const auto j = nlohmann::json::parse(read_file(tok), nullptr, false);
    if (!j.is_discarded() && j.contains("do_lower_case") && j["do_lower_case"].is_boolean()) {
      return j["do_lower_case"].get<bool>();
    }
  }
  return dir.filename().string().find("uncased") != std::string::npos;
}

}  // namespace

BertConfig BertConfig::from_json(const nlohmann::json& j) {
  BertConfig c;
  c.vocab_size = j.at("vocab_size").get<int>();
  c.hidden_size = j.value("hidden_size", c.hidden_size);
  c.num_hidden_layers = j.value("num_hidden_layers", c.num_hidden_layers);
  c.num_attention_heads = j.value("num_attention_heads", c.num_attention_heads);
  c.intermediate_size = j.value("intermediate_size", c.intermediate_size);
  c.max_position_embeddings = j.value("max_position_embeddings", c.max_position_embeddings);
  c.type_vocab_size = j.value("type_vocab_size", c.type_vocab_size);
  c.layer_norm_eps = j.value("layer_norm_eps", c.layer_norm_eps);
  c.hidden_dropout_prob = j.value("hidden_dropout_prob", c.hidden_dropout_prob);
  c.attention_probs_dropout_prob =
      j.value("attention_probs_dropout_prob", c.attention_probs_dropout_prob);
  const std::string act = j.value("hidden_act", std::string("gelu"));
  if (act != "gelu") throw ValidationError("unsupported hidden_act '" + act + "'");
  c.validate();
  return c;
}

nlohmann::json BertConfig::to_json() const {
  return {{"architectures", {"BertForSequenceClassification"}},
          {"model_type", "bert"},
          {"vocab_size", vocab_size},
          {"hidden_size", hidden_size},
          {"num_hidden_layers", num_hidden_layers},
          {"num_attention_heads", num_attention_heads},
          {"intermediate_size", intermediate_size},
          {"max_position_embeddings", max_position_embeddings},
          {"type_vocab_size", type_vocab_size},
          {"layer_norm_eps", layer_norm_eps},
          {"hidden_dropout_prob", hidden_dropout_prob},
          {"attention_probs_dropout_prob", attention_probs_dropout_prob},
          {"hidden_act", "gelu"},
          {"num_labels", 2},
          {"id2label", {{"0", "noHate"}, {"1", "Hate"}}}};
}

void BertConfig::validate() const {
  if (vocab_size < 1 || hidden_size < 1 || num_hidden_layers < 0 ||
      num_attention_heads < 1 || intermediate_size < 1 || max_position_embeddings < 2 ||
      type_vocab_size < 1) {
    throw ValidationError("BERT config: sizes must be positive");
  }
  if (hidden_size % num_attention_heads != 0) {
    throw ValidationError("BERT config: hidden_size not divisible by attention heads");
  }
}

LayerNorm::LayerNorm(const std::string& name, Eigen::Index dim, double epsilon)
    : gamma(name + ".weight", dim, 1), beta(name + ".bias", dim, 1), eps(epsilon) {
  gamma.value.setOnes();
}

nn::Matrix LayerNorm::forward(const nn::Matrix& x, Cache* cache) const {
  const Eigen::Index n = x.rows();
  nn::Matrix normalized(n, x.cols());
  nn::Vector inv_std(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double mean = x.col(j).mean();
    const double var = (x.col(j).array() - mean).square().mean();
    inv_std(j) = 1.0 / std::sqrt(var + eps);
    normalized.col(j) = (x.col(j).array() - mean) * inv_std(j);
  }
  nn::Matrix y = (normalized.array().colwise() * gamma.value.col(0).array()).matrix();
  y.colwise() += beta.value.col(0);
  if (cache != nullptr) {
    cache->normalized = std::move(normalized);
    cache->inv_std = std::move(inv_std);
  }
  return y;
}

nn::Matrix LayerNorm::backward(const Cache& cache, const nn::Matrix& dy) {
  gamma.grad.col(0) += dy.cwiseProduct(cache.normalized).rowwise().sum();
  beta.grad.col(0) += dy.rowwise().sum();
  const nn::Matrix dnorm = (dy.array().colwise() * gamma.value.col(0).array()).matrix();
  nn::Matrix dx(dy.rows(), dy.cols());
  const double n = static_cast<double>(dy.rows());
  for (Eigen::Index j = 0; j < dy.cols(); ++j) {
    const double mean_d = dnorm.col(j).sum() / n;
    const double mean_dx = dnorm.col(j).dot(cache.normalized.col(j)) / n;
    dx.col(j) = cache.inv_std(j) *
                (dnorm.col(j).array() - mean_d - cache.normalized.col(j).array() * mean_dx)
                    .matrix();
  }
  return dx;
}

struct TransformerClassifier::LayerCache {
  nn::Matrix input;
  nn::Matrix q, k, v;
  std::vector<nn::Matrix> probs;
  std::vector<nn::Matrix> prob_masks;
  nn::Matrix context;
  nn::Matrix attention_mask;
  LayerNorm::Cache norm1;
  nn::Matrix x1;
  nn::Matrix inter_pre;
  nn::Matrix inter_act;
  nn::Matrix output_mask;
  LayerNorm::Cache norm2;
};

struct TransformerClassifier::ForwardCache {
  LayerNorm::Cache embedding_norm;
  nn::Matrix embedding_mask;
  std::vector<LayerCache> layers;
  nn::Matrix first_token;
  nn::Matrix pooled;
  nn::Matrix head_mask;
  nn::Matrix head_in;
};

TransformerClassifier::TransformerClassifier(const TransformerConfig& cfg,
                                             const fs::path& dir, std::uint64_t seed)
    : cfg_(cfg) {
  if (cfg_.dropout < 0.0 || cfg_.dropout >= 1.0) {
    throw ValidationError("transformer: dropout must be in [0, 1)");
  }
  const fs::path config_path = dir / "config.json";
  const fs::path vocab_path = dir / "vocab.txt";
  fs::path weights_path = dir / "model.safetensors";
  if (!fs::exists(config_path) || !fs::exists(vocab_path) || !fs::exists(weights_path)) {
    throw ValidationError("transformer checkpoint " + dir.string() +
                          " needs config.json, vocab.txt and model.safetensors");
  }
  const auto config_json = nlohmann::json::parse(read_file(config_path), nullptr, false);
  if (config_json.is_discarded()) throw ValidationError(config_path.string() + ": bad JSON");
  bert_ = BertConfig::from_json(config_json);
  tokenizer_ = WordPieceTokenizer::load(vocab_path, read_lowercase_flag(dir));
  if (static_cast<int>(tokenizer_.vocab().size()) != bert_.vocab_size) {
    throw ValidationError("transformer checkpoint: vocab.txt has " +
                          std::to_string(tokenizer_.vocab().size()) + " entries, config says " +
                          std::to_string(bert_.vocab_size));
  }
  if (!covers_english_and_german(tokenizer_)) {
    throw ValidationError("transformer checkpoint " + dir.string() +
                          " is not multilingual (vocabulary lacks English or German coverage)");
  }
  if (cfg_.max_subword_len < 2 || cfg_.max_subword_len > bert_.max_position_embeddings) {
    throw ValidationError("transformer: max_subword_len must be in [2, " +
                          std::to_string(bert_.max_position_embeddings) + "]");
  }

  const Eigen::Index h = bert_.hidden_size;
  word_embeddings_ = nn::Parameter("embeddings.word_embeddings.weight", bert_.vocab_size, h);
  position_embeddings_ =
      nn::Parameter("embeddings.position_embeddings.weight", bert_.max_position_embeddings, h);
  type_embeddings_ = nn::Parameter("embeddings.token_type_embeddings.weight", bert_.type_vocab_size, h);
  embedding_norm_ = LayerNorm("embeddings.LayerNorm", h, bert_.layer_norm_eps);
  for (int i = 0; i < bert_.num_hidden_layers; ++i) {
    const std::string p = "encoder.layer." + std::to_string(i) + ".";
    EncoderLayer layer{
        nn::Linear(p + "attention.self.query", h, h),
        nn::Linear(p + "attention.self.key", h, h),
        nn::Linear(p + "attention.self.value", h, h),
        nn::Linear(p + "attention.output.dense", h, h),
        LayerNorm(p + "attention.output.LayerNorm", h, bert_.layer_norm_eps),
        nn::Linear(p + "intermediate.dense", h, bert_.intermediate_size),
        nn::Linear(p + "output.dense", bert_.intermediate_size, h),
        LayerNorm(p + "output.LayerNorm", h, bert_.layer_norm_eps)};
    layers_.push_back(std::move(layer));
  }
  pooler_ = nn::Linear("pooler.dense", h, h);
  classifier_ = nn::Linear("classifier", h, 2);

  const TensorMap tensors = read_safetensors(weights_path);
  for (auto* param : parameters()) {
    if (param->name.starts_with("classifier.") || param->name.starts_with("pooler.")) continue;
    assign(*param, tensors, param->name);
  }
  Rng rng(seed);
  if (find_tensor(tensors, "pooler.dense.weight") != nullptr) {
    assign(pooler_.weight, tensors, "pooler.dense.weight");
    assign(pooler_.bias, tensors, "pooler.dense.bias");
  } else {
    nn::normal_init(pooler_.weight.value, rng, 0.02);
  }
  if (tensors.contains("classifier.weight")) {
    assign(classifier_.weight, tensors, "classifier.weight");
    assign(classifier_.bias, tensors, "classifier.bias");
  } else {
    nn::normal_init(classifier_.weight.value, rng, 0.02);
    classifier_.bias.value.setZero();
  }
}

Eigen::Index TransformerClassifier::head_parameter_count() const {
  return classifier_.weight.value.size() + classifier_.bias.value.size();
}

ModelInput TransformerClassifier::encode(std::string_view text) const {
  ModelInput input;
  input.ids = tokenizer_.encode(text, cfg_.max_subword_len);
  input.length = static_cast<int>(input.ids.size());
  return input;
}

nn::Vector TransformerClassifier::run(const ModelInput& input, Rng* rng,
                                      ForwardCache* cache) const {
  const Eigen::Index h = bert_.hidden_size;
  const Eigen::Index steps = static_cast<Eigen::Index>(input.ids.size());
  const int heads = bert_.num_attention_heads;
  const Eigen::Index head_dim = h / heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(head_dim));
  if (steps < 1 || steps > bert_.max_position_embeddings) {
    throw ValidationError("transformer: input length out of range");
  }

  nn::Matrix x(h, steps);
  for (Eigen::Index t = 0; t < steps; ++t) {
    const int id = input.ids[static_cast<std::size_t>(t)];
    if (id < 0 || id >= bert_.vocab_size) throw ValidationError("transformer: token id out of range");
    x.col(t) = word_embeddings_.value.row(id).transpose() +
               position_embeddings_.value.row(t).transpose() +
               type_embeddings_.value.row(0).transpose();
  }
  x = embedding_norm_.forward(x, cache ? &cache->embedding_norm : nullptr);
  {
    nn::Matrix mask = nn::dropout_mask(h, steps, bert_.hidden_dropout_prob, rng);
    x = x.cwiseProduct(mask);
    if (cache) cache->embedding_mask = std::move(mask);
  }
  if (cache) cache->layers.resize(layers_.size());

  for (std::size_t li = 0; li < layers_.size(); ++li) {
    const EncoderLayer& layer = layers_[li];
    LayerCache* lc = cache ? &cache->layers[li] : nullptr;
    const nn::Matrix q = layer.query.forward(x);
    const nn::Matrix k = layer.key.forward(x);
    const nn::Matrix v = layer.value.forward(x);
    nn::Matrix context(h, steps);
    if (lc) {
      lc->probs.resize(static_cast<std::size_t>(heads));
      lc->prob_masks.resize(static_cast<std::size_t>(heads));
    }
    for (int hd = 0; hd < heads; ++hd) {
      const Eigen::Index off = hd * head_dim;
      nn::Matrix scores = q.middleRows(off, head_dim).transpose() * k.middleRows(off, head_dim) * inv_sqrt;
      row_softmax(scores);
      nn::Matrix mask = nn::dropout_mask(steps, steps, bert_.attention_probs_dropout_prob, rng);
      context.middleRows(off, head_dim) = v.middleRows(off, head_dim) * scores.cwiseProduct(mask).transpose();
      if (lc) {
        lc->probs[static_cast<std::size_t>(hd)] = std::move(scores);
        lc->prob_masks[static_cast<std::size_t>(hd)] = std::move(mask);
      }
    }
    nn::Matrix attn_mask = nn::dropout_mask(h, steps, bert_.hidden_dropout_prob, rng);
    const nn::Matrix attended = layer.attention_output.forward(context).cwiseProduct(attn_mask);
    nn::Matrix x1 = layer.attention_norm.forward(x + attended, lc ? &lc->norm1 : nullptr);
    nn::Matrix inter_pre = layer.intermediate.forward(x1);
    nn::Matrix inter_act = inter_pre.unaryExpr([](double z) { return gelu(z); });
    nn::Matrix out_mask = nn::dropout_mask(h, steps, bert_.hidden_dropout_prob, rng);
    const nn::Matrix out = layer.output.forward(inter_act).cwiseProduct(out_mask);
    nn::Matrix next = layer.output_norm.forward(x1 + out, lc ? &lc->norm2 : nullptr);
    if (lc) {
      lc->input = std::move(x);
      lc->q = q;
      lc->k = k;
      lc->v = v;
      lc->context = std::move(context);
      lc->attention_mask = std::move(attn_mask);
      lc->x1 = std::move(x1);
      lc->inter_pre = std::move(inter_pre);
      lc->inter_act = std::move(inter_act);
      lc->output_mask = std::move(out_mask);
    }
    x = std::move(next);
  }

  nn::Matrix first = x.col(0);
  nn::Matrix pooled = pooler_.forward(first).array().tanh().matrix();
  nn::Matrix head_mask = nn::dropout_mask(h, 1, cfg_.dropout, rng);
  nn::Matrix head_in = pooled.cwiseProduct(head_mask);
  nn::Vector out = classifier_.forward(head_in).col(0);
  if (cache) {
    cache->first_token = std::move(first);
    cache->pooled = std::move(pooled);
    cache->head_mask = std::move(head_mask);
    cache->head_in = std::move(head_in);
  }
  return out;
}

nn::Vector TransformerClassifier::logits(const ModelInput& input) const {
  return run(input, nullptr, nullptr);
}

Probabilities TransformerClassifier::forward(const ModelInput& input) const {
  const nn::Vector p = nn::softmax(run(input, nullptr, nullptr));
  return {p(0), p(1)};
}

double TransformerClassifier::accumulate_gradient(const ModelInput& input, Label gold,
                                                  double scale, Rng* rng) {
  ForwardCache cache;
  const nn::Vector p = nn::softmax(run(input, rng, &cache));
  const auto g = static_cast<Eigen::Index>(index_of(gold));
  const double loss = -std::log(std::max(p(g), 1e-300));

  const Eigen::Index h = bert_.hidden_size;
  const Eigen::Index steps = static_cast<Eigen::Index>(input.ids.size());
  const int heads = bert_.num_attention_heads;
  const Eigen::Index head_dim = h / heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(head_dim));

  nn::Matrix dlogits = p;
  dlogits(g, 0) -= 1.0;
  dlogits *= scale;
  nn::Matrix dpooled = classifier_.backward(cache.head_in, dlogits).cwiseProduct(cache.head_mask);
  dpooled = dpooled.cwiseProduct((1.0 - cache.pooled.array().square()).matrix());
  const nn::Matrix dfirst = pooler_.backward(cache.first_token, dpooled);

  nn::Matrix dx = nn::Matrix::Zero(h, steps);
  dx.col(0) = dfirst.col(0);

  for (std::size_t li = layers_.size(); li-- > 0;) {
    EncoderLayer& layer = layers_[li];
    const LayerCache& lc = cache.layers[li];

    const nn::Matrix dsum2 = layer.output_norm.backward(lc.norm2, dx);
    nn::Matrix dx1 = dsum2;
    const nn::Matrix dout = dsum2.cwiseProduct(lc.output_mask);
    nn::Matrix dinter = layer.output.backward(lc.inter_act, dout);
    dinter = dinter.cwiseProduct(lc.inter_pre.unaryExpr([](double z) { return gelu_grad(z); }));
    dx1 += layer.intermediate.backward(lc.x1, dinter);

    const nn::Matrix dsum1 = layer.attention_norm.backward(lc.norm1, dx1);
    nn::Matrix dinput = dsum1;
    const nn::Matrix dattended = dsum1.cwiseProduct(lc.attention_mask);
    const nn::Matrix dcontext = layer.attention_output.backward(lc.context, dattended);

    nn::Matrix dq(h, steps), dk(h, steps), dv(h, steps);
    for (int hd = 0; hd < heads; ++hd) {
      const Eigen::Index off = hd * head_dim;
      const nn::Matrix& probs = lc.probs[static_cast<std::size_t>(hd)];
      const nn::Matrix& mask = lc.prob_masks[static_cast<std::size_t>(hd)];
      const nn::Matrix dropped = probs.cwiseProduct(mask);
      const auto dctx = dcontext.middleRows(off, head_dim);
      dv.middleRows(off, head_dim) = dctx * dropped;
      const nn::Matrix dprobs = (dctx.transpose() * lc.v.middleRows(off, head_dim)).cwiseProduct(mask);
      const nn::Vector row_dot = dprobs.cwiseProduct(probs).rowwise().sum();
      const nn::Matrix dscores =
          (probs.array() * (dprobs.array().colwise() - row_dot.array())).matrix() * inv_sqrt;
      dq.middleRows(off, head_dim) = lc.k.middleRows(off, head_dim) * dscores.transpose();
      dk.middleRows(off, head_dim) = lc.q.middleRows(off, head_dim) * dscores;
    }
    dinput += layer.query.backward(lc.input, dq);
    dinput += layer.key.backward(lc.input, dk);
    dinput += layer.value.backward(lc.input, dv);
    dx = std::move(dinput);
  }

  dx = dx.cwiseProduct(cache.embedding_mask);
  const nn::Matrix demb = embedding_norm_.backward(cache.embedding_norm, dx);
  for (Eigen::Index t = 0; t < steps; ++t) {
    const int id = input.ids[static_cast<std::size_t>(t)];
    word_embeddings_.grad.row(id) += demb.col(t).transpose();
    position_embeddings_.grad.row(t) += demb.col(t).transpose();
    type_embeddings_.grad.row(0) += demb.col(t).transpose();
  }
  return loss;
}

nn::ParameterList TransformerClassifier::parameters() {
  nn::ParameterList out{&word_embeddings_, &position_embeddings_, &type_embeddings_};
  embedding_norm_.collect(out);
  for (auto& layer : layers_) {
    layer.query.collect(out);
    layer.key.collect(out);
    layer.value.collect(out);
    layer.attention_output.collect(out);
    layer.attention_norm.collect(out);
    layer.intermediate.collect(out);
    layer.output.collect(out);
    layer.output_norm.collect(out);
  }
  pooler_.collect(out);
  classifier_.collect(out);
  return out;
}

std::unique_ptr<Classifier> TransformerClassifier::clone() const {
  return std::make_unique<TransformerClassifier>(*this);
}

nlohmann::json TransformerClassifier::config_json() const {
  return {{"model_identifier", cfg_.model_identifier},
          {"dropout", cfg_.dropout},
          {"max_subword_len", cfg_.max_subword_len},
          {"bert", bert_.to_json()}};
}

TensorMap TransformerClassifier::export_tensors() const {
  TensorMap tensors;
  auto* self = const_cast<TransformerClassifier*>(this);
  for (const auto* param : self->parameters()) {
    const std::string name =
        param->name.starts_with("classifier.") ? param->name : "bert." + param->name;
    tensors.emplace(name, to_tensor(param->value));
  }
  return tensors;
}

void TransformerClassifier::save_checkpoint(const fs::path& dir) const {
  fs::create_directories(dir);
  write_file(dir / "config.json", bert_.to_json().dump(2) + "\n");
  write_file(dir / "tokenizer_config.json",
             nlohmann::json{{"do_lower_case", tokenizer_.lowercase()},
                            {"tokenizer_class", "BertTokenizer"}}
                     .dump(2) +
                 "\n");
  std::string vocab;
  for (const auto& token : tokenizer_.vocab()) {
    vocab += token;
    vocab.push_back('\n');
  }
  write_file(dir / "vocab.txt", vocab);
  write_safetensors(dir / "model.safetensors", export_tensors(), StoreType::F64);
}

fs::path resolve_checkpoint(const std::string& identifier) {
  if (identifier.empty()) throw ValidationError("transformer: empty model identifier");
  if (fs::is_directory(identifier)) return identifier;
  if (const char* registry = std::getenv("HSD_MODEL_REGISTRY")) {
    const fs::path candidate = fs::path(registry) / identifier;
    if (fs::is_directory(candidate)) return candidate;
  }
  throw ValidationError("transformer checkpoint '" + identifier +
                        "' not found on disk or under $HSD_MODEL_REGISTRY");
}

bool covers_english_and_german(const WordPieceTokenizer& tokenizer) {
  bool english = false;
  for (const char* word : {"the", "and", "is"}) english = english || tokenizer.contains(word);
  bool umlaut_a = false, umlaut_o = false, umlaut_u = false, sharp_s = false;
  for (const auto& token : tokenizer.vocab()) {
    if (token.find('\xC3') == std::string::npos) continue;
    const std::string lower = utf8::to_lower(token);
    umlaut_a = umlaut_a || lower.find("\xC3\xA4") != std::string::npos;
    umlaut_o = umlaut_o || lower.find("\xC3\xB6") != std::string::npos;
    umlaut_u = umlaut_u || lower.find("\xC3\xBC") != std::string::npos;
    sharp_s = sharp_s || lower.find("\xC3\x9F") != std::string::npos;
  }
  return english && umlaut_a && umlaut_o && umlaut_u && sharp_s;
}

void write_random_bert_checkpoint(const fs::path& dir, BertConfig config,
                                  const std::vector<std::string>& vocab, bool lowercase,
                                  std::uint64_t seed) {
  config.vocab_size = static_cast<int>(vocab.size());
  config.validate();
  Rng rng(seed);
  TensorMap tensors;
  auto normal = [&](const std::string& name, Eigen::Index rows, Eigen::Index cols) {
    nn::Matrix m(rows, cols);
    nn::normal_init(m, rng, 0.02);
    tensors.emplace("bert." + name, to_tensor(m));
  };
  auto constant = [&](const std::string& name, Eigen::Index rows, double value) {
    tensors.emplace("bert." + name, to_tensor(nn::Matrix::Constant(rows, 1, value)));
  };
  const Eigen::Index h = config.hidden_size;
  normal("embeddings.word_embeddings.weight", config.vocab_size, h);
  normal("embeddings.position_embeddings.weight", config.max_position_embeddings, h);
  normal("embeddings.token_type_embeddings.weight", config.type_vocab_size, h);
  constant("embeddings.LayerNorm.weight", h, 1.0);
  constant("embeddings.LayerNorm.bias", h, 0.0);
  for (int i = 0; i < config.num_hidden_layers; ++i) {
    const std::string p = "encoder.layer." + std::to_string(i) + ".";
    for (const char* name : {"attention.self.query", "attention.self.key",
                             "attention.self.value", "attention.output.dense"}) {
      normal(p + name + ".weight", h, h);
      constant(p + name + ".bias", h, 0.0);
    }
    constant(p + "attention.output.LayerNorm.weight", h, 1.0);
    constant(p + "attention.output.LayerNorm.bias", h, 0.0);
    normal(p + "intermediate.dense.weight", config.intermediate_size, h);
    constant(p + "intermediate.dense.bias", config.intermediate_size, 0.0);
    normal(p + "output.dense.weight", h, config.intermediate_size);
    constant(p + "output.dense.bias", h, 0.0);
    constant(p + "output.LayerNorm.weight", h, 1.0);
    constant(p + "output.LayerNorm.bias", h, 0.0);
  }
  normal("pooler.dense.weight", h, h);
  constant("pooler.dense.bias", h, 0.0);

  fs::create_directories(dir);
  write_file(dir / "config.json", config.to_json().dump(2) + "\n");
  write_file(dir / "tokenizer_config.json",
             nlohmann::json{{"do_lower_case", lowercase}, {"tokenizer_class", "BertTokenizer"}}
                     .dump(2) +
                 "\n");
  std::string text;
  for (const auto& token : vocab) {
    text += token;
    text.push_back('\n');
  }
  write_file(dir / "vocab.txt", text);
  write_safetensors(dir / "model.safetensors", tensors, StoreType::F32);
}

}  // namespace hsd::models
