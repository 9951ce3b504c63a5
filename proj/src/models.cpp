#include "hsd/models.hpp"

#include <cmath>

#include "hsd/bilstm_cnn.hpp"
#include "hsd/cnn.hpp"
#include "hsd/errors.hpp"
#include "hsd/hashing.hpp"
#include "hsd/safetensors.hpp"
#include "hsd/transformer.hpp"

namespace hsd::models {
namespace {

namespace fs = std::filesystem;

constexpr int kFormatVersion = 1;

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> optional_double(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

Tensor param_tensor(const nn::Parameter& p) {
  Tensor t;
  t.shape = {p.value.rows(), p.value.cols()};
  const RowMatrix row_major = p.value;
  t.data.assign(row_major.data(), row_major.data() + row_major.size());
  return t;
}

void restore_parameters(Classifier& net, const TensorMap& tensors) {
  for (auto* p : net.parameters()) {
    const auto it = tensors.find(p->name);
    if (it == tensors.end()) throw ValidationError("checkpoint lacks parameter " + p->name);
    const Tensor& t = it->second;
    if (t.shape.size() != 2 || t.shape[0] != p->value.rows() || t.shape[1] != p->value.cols()) {
      throw ValidationError("checkpoint parameter " + p->name + " has the wrong shape");
    }
    p->value = Eigen::Map<const RowMatrix>(t.data.data(), t.shape[0], t.shape[1]);
    p->zero_grad();
  }
}

std::shared_ptr<const EmbeddingTable> manifest_embeddings(const nlohmann::json& manifest,
                                                          const LoadOptions& options) {
  if (options.embeddings) return options.embeddings;
  const auto& emb = manifest.at("embeddings");
  const fs::path path = emb.at("path").get<std::string>();
  if (!fs::exists(path)) {
    throw ValidationError("embedding file " + path.string() +
                          " recorded in the checkpoint does not exist");
  }
  const std::string expected = emb.at("sha256").get<std::string>();
  const std::string actual = sha256_file(path);
  if (actual != expected) {
    throw ValidationError("embedding file " + path.string() + " changed since the checkpoint was saved");
  }
  auto table = std::make_shared<EmbeddingTable>(
      load_embeddings(path, emb.at("vocab_size").get<std::size_t>()));
  return table;
}

CnnConfig cnn_config_from_json(const nlohmann::json& j) {
  CnnConfig c;
  c.filter_sizes = j.at("filter_sizes").get<std::vector<int>>();
  c.filters_per_size = j.at("filters_per_size").get<int>();
  c.dense_units = j.at("dense_units").get<int>();
  c.dropout = j.at("dropout").get<double>();
  c.frozen_embeddings = j.at("frozen_embeddings").get<bool>();
  c.max_len = j.at("max_len").get<int>();
  return c;
}

BiLstmConfig bilstm_config_from_json(const nlohmann::json& j) {
  BiLstmConfig c;
  c.recurrent_units = j.at("recurrent_units").get<int>();
  c.conv_feature_maps = j.at("conv_feature_maps").get<int>();
  c.kernel_sizes = j.at("kernel_sizes").get<std::vector<int>>();
  c.dense_units = j.at("dense_units").get<int>();
  c.dropout = j.at("dropout").get<double>();
  c.max_len = j.at("max_len").get<int>();
  return c;
}

}  // namespace

std::string_view to_string(Architecture arch) {
  switch (arch) {
    case Architecture::Cnn: return "cnn";
    case Architecture::BiLstmCnn: return "bilstm";
    case Architecture::Transformer: return "transformer";
  }
  return "?";
}

std::optional<Architecture> parse_architecture(std::string_view text) {
  if (text == "cnn") return Architecture::Cnn;
  if (text == "bilstm" || text == "bilstm_cnn" || text == "bilstm-cnn") return Architecture::BiLstmCnn;
  if (text == "transformer" || text == "mbert") return Architecture::Transformer;
  return std::nullopt;
}

void TrainingHyperparams::validate() const {
  auto bad = [](const std::string& what) { throw ValidationError("hyperparameters: " + what); };
  if (!std::isfinite(weight_no_hate) || !std::isfinite(weight_hate) || weight_no_hate < 0.0 ||
      weight_hate < 0.0) {
    bad("class weights must be finite and non-negative");
  }
  if (weight_no_hate + weight_hate <= 0.0) bad("at least one class weight must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) bad("dropout must be in [0, 1)");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) bad("learning_rate must be positive");
  if (batch_size < 1) bad("batch_size must be positive");
  if (epochs < 0) bad("epochs must be non-negative");
}

nlohmann::json to_json(const TrainingHyperparams& hp) {
  return {{"class_weight_noHate", hp.weight_no_hate},
          {"class_weight_Hate", hp.weight_hate},
          {"dropout", hp.dropout},
          {"learning_rate", hp.learning_rate},
          {"batch_size", hp.batch_size},
          {"epochs", hp.epochs},
          {"seed", hp.seed}};
}

TrainingHyperparams hyperparams_from_json(const nlohmann::json& j) {
  TrainingHyperparams hp;
  hp.weight_no_hate = j.at("class_weight_noHate").get<double>();
  hp.weight_hate = j.at("class_weight_Hate").get<double>();
  hp.dropout = j.at("dropout").get<double>();
  hp.learning_rate = j.at("learning_rate").get<double>();
  hp.batch_size = j.at("batch_size").get<int>();
  hp.epochs = j.at("epochs").get<int>();
  hp.seed = j.at("seed").get<std::uint64_t>();
  return hp;
}

nlohmann::json to_json(const StageRecord& r) {
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : r.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"mean_loss", e.mean_loss},
                      {"dev_macro_f1", optional_json(e.dev_macro_f1)}});
  }
  return {{"stage", r.stage},
          {"dataset", r.dataset},
          {"examples", r.examples},
          {"hyperparams", to_json(r.hyperparams)},
          {"epochs", epochs},
          {"best_epoch", r.best_epoch ? nlohmann::json(*r.best_epoch) : nlohmann::json(nullptr)},
          {"dev_macro_f1", optional_json(r.dev_macro_f1)}};
}

StageRecord stage_from_json(const nlohmann::json& j) {
  StageRecord r;
  r.stage = j.at("stage").get<std::string>();
  r.dataset = j.at("dataset").get<std::string>();
  r.examples = j.at("examples").get<std::size_t>();
  r.hyperparams = hyperparams_from_json(j.at("hyperparams"));
  for (const auto& e : j.at("epochs")) {
    r.epochs.push_back({e.at("epoch").get<int>(), e.at("mean_loss").get<double>(),
                        optional_double(e, "dev_macro_f1")});
  }
  if (j.contains("best_epoch") && !j["best_epoch"].is_null()) r.best_epoch = j["best_epoch"].get<int>();
  r.dev_macro_f1 = optional_double(j, "dev_macro_f1");
  return r;
}

TrainedModel::TrainedModel(std::unique_ptr<Classifier> net, std::uint64_t init_seed)
    : net_(std::move(net)), init_seed_(init_seed) {}

TrainedModel::TrainedModel(const TrainedModel& other)
    : net_(other.net_ ? other.net_->clone() : nullptr),
      init_seed_(other.init_seed_),
      history_(other.history_) {}

TrainedModel& TrainedModel::operator=(const TrainedModel& other) {
  if (this != &other) {
    net_ = other.net_ ? other.net_->clone() : nullptr;
    init_seed_ = other.init_seed_;
    history_ = other.history_;
  }
  return *this;
}

void TrainedModel::bind_embeddings(std::shared_ptr<const EmbeddingTable> table) {
  if (auto* cnn = dynamic_cast<CnnClassifier*>(net_.get())) {
    cnn->set_table(std::move(table));
  } else if (auto* bilstm = dynamic_cast<BiLstmCnnClassifier*>(net_.get())) {
    bilstm->set_table(std::move(table));
  } else {
    throw ValidationError("bind_embeddings: architecture does not use word embeddings");
  }
}

std::shared_ptr<const EmbeddingTable> TrainedModel::embeddings() const {
  if (const auto* cnn = dynamic_cast<const CnnClassifier*>(net_.get())) return cnn->table();
  if (const auto* bilstm = dynamic_cast<const BiLstmCnnClassifier*>(net_.get())) {
    return bilstm->table();
  }
  return nullptr;
}

TrainedModel build_cnn(const CnnConfig& cfg, std::shared_ptr<const EmbeddingTable> table,
                       std::uint64_t seed) {
  return TrainedModel(std::make_unique<CnnClassifier>(cfg, std::move(table), seed), seed);
}

TrainedModel build_bilstm_cnn(const BiLstmConfig& cfg,
                              std::shared_ptr<const EmbeddingTable> table,
                              std::uint64_t seed) {
  return TrainedModel(std::make_unique<BiLstmCnnClassifier>(cfg, std::move(table), seed), seed);
}

TrainedModel build_transformer_classifier(const TransformerConfig& cfg, std::uint64_t seed) {
  const fs::path dir = resolve_checkpoint(cfg.model_identifier);
  return TrainedModel(std::make_unique<TransformerClassifier>(cfg, dir, seed), seed);
}

void save_model(const TrainedModel& model, const fs::path& dir) {
  if (!model.valid()) throw ValidationError("save_model: empty model");
  fs::create_directories(dir);
  nlohmann::json history = nlohmann::json::array();
  for (const auto& stage : model.history()) history.push_back(to_json(stage));
  nlohmann::json manifest{{"format_version", kFormatVersion},
                          {"architecture", to_string(model.architecture())},
                          {"config", model.net().config_json()},
                          {"init_seed", model.init_seed()},
                          {"history", history}};
  if (const auto* transformer = dynamic_cast<const TransformerClassifier*>(&model.net())) {
    transformer->save_checkpoint(dir / "encoder");
  } else {
    const auto table = model.embeddings();
    manifest["embeddings"] = {{"path", table->source_path},
                              {"sha256", table->source_sha256},
                              {"vocab_size", table->vocab_size()},
                              {"dimension", table->dimension()}};
    TensorMap tensors;
    for (const auto* p : const_cast<Classifier&>(model.net()).parameters()) {
      if (!tensors.emplace(p->name, param_tensor(*p)).second) {
        throw RuntimeFailure("save_model: duplicate parameter name " + p->name);
      }
    }
    write_safetensors(dir / "parameters.safetensors", tensors, StoreType::F64);
  }
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

TrainedModel load_model(const fs::path& dir, const LoadOptions& options) {
  const fs::path manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path)) {
    throw ValidationError("no checkpoint manifest at " + manifest_path.string());
  }
  const auto manifest = nlohmann::json::parse(read_file(manifest_path), nullptr, false);
  if (manifest.is_discarded()) throw ValidationError(manifest_path.string() + ": bad JSON");
  try {
    const auto arch = parse_architecture(manifest.at("architecture").get<std::string>());
    if (!arch) throw ValidationError("unknown architecture in " + manifest_path.string());
    const auto seed = manifest.at("init_seed").get<std::uint64_t>();
    const auto& cfg = manifest.at("config");
    TrainedModel model;
    switch (*arch) {
      case Architecture::Cnn:
        model = build_cnn(cnn_config_from_json(cfg), manifest_embeddings(manifest, options), seed);
        break;
      case Architecture::BiLstmCnn:
        model = build_bilstm_cnn(bilstm_config_from_json(cfg),
                                 manifest_embeddings(manifest, options), seed);
        break;
      case Architecture::Transformer: {
        TransformerConfig tc;
        tc.model_identifier = cfg.at("model_identifier").get<std::string>();
        tc.dropout = cfg.at("dropout").get<double>();
        tc.max_subword_len = cfg.at("max_subword_len").get<int>();
        model = TrainedModel(std::make_unique<TransformerClassifier>(tc, dir / "encoder", seed), seed);
        break;
      }
    }
    if (*arch != Architecture::Transformer) {
      restore_parameters(model.net(), read_safetensors(dir / "parameters.safetensors"));
    }
    for (const auto& stage : manifest.at("history")) model.add_stage(stage_from_json(stage));
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(manifest_path.string() + ": " + e.what());
  }
}

}  // namespace hsd::models
