#include "hsd/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <set>
#include <sstream>

#include "hsd/errors.hpp"
#include "hsd/hashing.hpp"
#include "hsd/rng.hpp"
#include "hsd/transformer.hpp"

namespace hsd::config {
namespace {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;
using models::Architecture;

constexpr std::array<Architecture, 3> kArchitectures{
    Architecture::Cnn, Architecture::BiLstmCnn, Architecture::Transformer};

const std::set<std::string> kHyperparamKeys{"weight_noHate", "weight_Hate", "dropout",
                                            "learning_rate", "batch_size", "epochs"};

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError("config " + where + ": " + what);
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& where, const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) fail(where, "'" + text + "' is not a valid number");
  return value;
}

std::vector<int> parse_int_list(const std::string& where, const std::string& text) {
  std::vector<int> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_number<int>(where, item));
  if (out.empty()) fail(where, "empty list");
  return out;
}

corpus::SplitCounts parse_counts(const std::string& where, const std::string& text) {
  const auto parts = split(text, '/');
  if (parts.size() != 2) fail(where, "expected noHate/Hate counts, got '" + text + "'");
  return {parse_number<std::size_t>(where, parts[0]), parse_number<std::size_t>(where, parts[1])};
}

sampling::SamplingSpec parse_sampling(const std::string& where, const std::string& text) {
  try {
    return sampling::parse_spec(text);
  } catch (const ValidationError& e) {
    fail(where, e.what());
  }
}

std::string section_name(Architecture arch) { return std::string(models::to_string(arch)); }

class Reader {
 public:
  Reader(const pt::ptree& tree, fs::path base) : tree_(tree), base_(std::move(base)) {}

  const pt::ptree* section(const std::string& name) const {
    const auto it = tree_.find(name);
    return it == tree_.not_found() ? nullptr : &it->second;
  }

  std::optional<std::string> get(const std::string& sec, const std::string& key) const {
    const pt::ptree* node = sec.empty() ? &tree_ : section(sec);
    if (node == nullptr) return std::nullopt;
    const auto it = node->find(key);
    if (it == node->not_found()) return std::nullopt;
    return trim(it->second.data());
  }

  std::optional<fs::path> path(const std::string& sec, const std::string& key) const {
    const auto value = get(sec, key);
    if (!value || value->empty()) return std::nullopt;
    fs::path p = *value;
    if (p.is_relative()) p = base_ / p;
    p = p.lexically_normal();
    if (!fs::exists(p)) fail(sec + "." + key, "path " + p.string() + " does not exist");
    return p;
  }

  const fs::path& base() const { return base_; }

 private:
  const pt::ptree& tree_;
  fs::path base_;
};

void check_keys(const pt::ptree& tree) {
  const std::set<std::string> top{"stage", "seed", "out", "architectures"};
  std::map<std::string, std::set<std::string>> sections{
      {"data", {"germeval_train", "germeval_test", "stormfront_csv", "forum_dump", "en_test",
                "en_dev", "en_train", "train_limit"}},
      {"embeddings", {"en", "de", "max_vocab"}},
      {"sampling", {"train", "sweep", "languages"}},
      {"bootstrap", {"target", "rounds"}}};
  std::set<std::string> cnn{"filter_sizes", "filters_per_size", "dense_units", "max_len"};
  std::set<std::string> bilstm{"recurrent_units", "conv_feature_maps", "kernel_sizes",
                               "dense_units", "max_len"};
  std::set<std::string> transformer{"model", "max_subword_len"};
  for (auto* s : {&cnn, &bilstm, &transformer}) s->insert(kHyperparamKeys.begin(), kHyperparamKeys.end());
  sections["cnn"] = cnn;
  sections["bilstm"] = bilstm;
  sections["transformer"] = transformer;
  for (Architecture a : kArchitectures) sections[section_name(a) + "_finetune"] = kHyperparamKeys;

  for (const auto& [key, node] : tree) {
    if (node.empty()) {
      if (!top.contains(key)) fail(key, "unknown top-level key");
      continue;
    }
    const auto it = sections.find(key);
    if (it == sections.end()) fail("[" + key + "]", "unknown section");
    for (const auto& [sub, leaf] : node) {
      if (!it->second.contains(sub)) fail("[" + key + "]", "unknown key '" + sub + "'");
    }
  }
}

void read_hyperparams(const Reader& r, const std::string& sec, models::TrainingHyperparams& hp) {
  auto where = [&](const char* key) { return "[" + sec + "] " + key; };
  if (auto v = r.get(sec, "weight_noHate")) hp.weight_no_hate = parse_number<double>(where("weight_noHate"), *v);
  if (auto v = r.get(sec, "weight_Hate")) hp.weight_hate = parse_number<double>(where("weight_Hate"), *v);
  if (auto v = r.get(sec, "dropout")) hp.dropout = parse_number<double>(where("dropout"), *v);
  if (auto v = r.get(sec, "learning_rate")) hp.learning_rate = parse_number<double>(where("learning_rate"), *v);
  if (auto v = r.get(sec, "batch_size")) hp.batch_size = parse_number<int>(where("batch_size"), *v);
  if (auto v = r.get(sec, "epochs")) hp.epochs = parse_number<int>(where("epochs"), *v);
  try {
    hp.validate();
  } catch (const ValidationError& e) {
    fail("[" + sec + "]", e.what());
  }
}

std::string canonical_listing(const pt::ptree& tree) {
  std::map<std::string, std::string> flat;
  for (const auto& [key, node] : tree) {
    if (node.empty()) {
      if (key != "seed" && key != "out") flat[key] = trim(node.data());
      continue;
    }
    for (const auto& [sub, leaf] : node) flat[key + "." + sub] = trim(leaf.data());
  }
  std::string out;
  for (const auto& [k, v] : flat) out += k + "=" + v + "\n";
  return out;
}

}  // namespace

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Crosslingual: return "crosslingual";
    case Stage::Bootstrap: return "bootstrap";
    case Stage::ImbalanceSweep: return "imbalance_sweep";
  }
  return "?";
}

bool ExperimentConfig::uses(Architecture arch) const {
  return std::find(architectures.begin(), architectures.end(), arch) != architectures.end();
}

models::TrainingHyperparams default_hyperparams(Architecture arch, std::string_view stage) {
  models::TrainingHyperparams hp;
  auto set = [&](double w0, double w1, double dropout, double lr, int batch, int epochs) {
    hp.weight_no_hate = w0;
    hp.weight_hate = w1;
    hp.dropout = dropout;
    hp.learning_rate = lr;
    hp.batch_size = batch;
    hp.epochs = epochs;
  };
  if (stage == "train") {
    switch (arch) {
      case Architecture::Cnn: set(0.6, 0.4, 0.7, 1e-4, 50, 1); break;
      case Architecture::BiLstmCnn: set(0.5, 0.5, 0.2, 3e-3, 40, 30); break;
      case Architecture::Transformer: set(1, 1, 0.2, 1e-5, 5, 10); break;
    }
  } else if (stage == "rel") {
    switch (arch) {
      case Architecture::Cnn: set(0.01, 0.99, 0.2, 1e-6, 30, 1); break;
      case Architecture::BiLstmCnn: set(0.1, 0.9, 0.7, 1e-6, 50, 2); break;
      case Architecture::Transformer: set(1, 1, 0.5, 1e-5, 10, 10); break;
    }
  } else if (stage == "new") {
    switch (arch) {
      case Architecture::Cnn: set(0.01, 0.99, 0.9, 1e-4, 2, 1); break;
      case Architecture::BiLstmCnn: set(0.1, 0.9, 0.9, 1e-7, 20, 1); break;
      case Architecture::Transformer: set(1, 1, 0.6, 1e-7, 1, 5); break;
    }
  } else {
    throw ValidationError("unknown hyperparameter stage '" + std::string(stage) + "'");
  }
  return hp;
}

ExperimentConfig load_config(const fs::path& path, std::optional<std::uint64_t> seed_override) {
  if (!fs::exists(path)) throw ValidationError("config file " + path.string() + " does not exist");
  auto cfg = parse_config(read_file(path), fs::absolute(path).parent_path(), seed_override);
  cfg.source = path;
  return cfg;
}

ExperimentConfig parse_config(const std::string& content, const fs::path& base_dir,
                              std::optional<std::uint64_t> seed_override) {
  pt::ptree tree;
  try {
    std::istringstream in(content);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  check_keys(tree);
  const Reader r(tree, base_dir);
  ExperimentConfig cfg;

  const std::string stage = r.get("", "stage").value_or("crosslingual");
  if (stage == "crosslingual") cfg.stage = Stage::Crosslingual;
  else if (stage == "bootstrap") cfg.stage = Stage::Bootstrap;
  else if (stage == "imbalance_sweep" || stage == "sweep") cfg.stage = Stage::ImbalanceSweep;
  else fail("stage", "unknown stage '" + stage + "'");

  if (auto v = r.get("", "seed")) cfg.seed = parse_number<std::uint64_t>("seed", *v);
  if (seed_override) cfg.seed = *seed_override;
  if (auto v = r.get("", "out")) cfg.out = fs::path(*v).is_relative() ? base_dir / *v : fs::path(*v);
  if (auto v = r.get("", "architectures")) {
    cfg.architectures.clear();
    for (const auto& name : split(*v, ',')) {
      const auto arch = models::parse_architecture(name);
      if (!arch) fail("architectures", "unknown architecture '" + name + "'");
      if (!cfg.uses(*arch)) cfg.architectures.push_back(*arch);
    }
    if (cfg.architectures.empty()) fail("architectures", "empty list");
  }

  if (auto p = r.path("data", "germeval_train")) cfg.data.germeval_train = *p;
  if (auto p = r.path("data", "germeval_test")) cfg.data.germeval_test = *p;
  if (auto p = r.path("data", "stormfront_csv")) cfg.data.stormfront_csv = *p;
  if (auto p = r.path("data", "forum_dump")) cfg.data.forum_dump = *p;
  if (auto v = r.get("data", "en_test")) cfg.data.english_counts.test = parse_counts("[data] en_test", *v);
  if (auto v = r.get("data", "en_dev")) cfg.data.english_counts.dev = parse_counts("[data] en_dev", *v);
  if (auto v = r.get("data", "en_train")) {
    if (*v == "rest") cfg.data.english_counts.train.reset();
    else cfg.data.english_counts.train = parse_counts("[data] en_train", *v);
  }
  if (auto v = r.get("data", "train_limit")) cfg.data.train_limit = parse_number<std::size_t>("[data] train_limit", *v);

  if (auto p = r.path("embeddings", "en")) cfg.embeddings.en = *p;
  if (auto p = r.path("embeddings", "de")) cfg.embeddings.de = *p;
  if (auto v = r.get("embeddings", "max_vocab")) {
    cfg.embeddings.max_vocab = parse_number<std::size_t>("[embeddings] max_vocab", *v);
  }

  if (auto v = r.get("sampling", "train")) cfg.train_sampling = parse_sampling("[sampling] train", *v);
  if (auto v = r.get("sampling", "sweep")) {
    for (const auto& spec : split(*v, ';')) cfg.sweep.push_back(parse_sampling("[sampling] sweep", spec));
  }
  if (auto v = r.get("sampling", "languages")) {
    cfg.sweep_languages.clear();
    for (auto lang : split(*v, ',')) {
      for (auto& c : lang) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      if (lang != "DE" && lang != "EN") fail("[sampling] languages", "unknown language '" + lang + "'");
      cfg.sweep_languages.push_back(lang);
    }
  }

  if (auto v = r.get("bootstrap", "target")) {
    if (*v == "de_train") cfg.bootstrap.target = BootstrapTarget::GermanTrain;
    else if (*v == "forum") cfg.bootstrap.target = BootstrapTarget::Forum;
    else fail("[bootstrap] target", "expected de_train or forum");
  }
  if (auto v = r.get("bootstrap", "rounds")) cfg.bootstrap.rounds = parse_number<int>("[bootstrap] rounds", *v);
  if (cfg.bootstrap.rounds < 1) fail("[bootstrap] rounds", "must be at least 1");

  if (auto v = r.get("cnn", "filter_sizes")) cfg.cnn.filter_sizes = parse_int_list("[cnn] filter_sizes", *v);
  if (auto v = r.get("cnn", "filters_per_size")) cfg.cnn.filters_per_size = parse_number<int>("[cnn] filters_per_size", *v);
  if (auto v = r.get("cnn", "dense_units")) cfg.cnn.dense_units = parse_number<int>("[cnn] dense_units", *v);
  if (auto v = r.get("cnn", "max_len")) cfg.cnn.max_len = parse_number<int>("[cnn] max_len", *v);
  if (auto v = r.get("bilstm", "recurrent_units")) cfg.bilstm.recurrent_units = parse_number<int>("[bilstm] recurrent_units", *v);
  if (auto v = r.get("bilstm", "conv_feature_maps")) cfg.bilstm.conv_feature_maps = parse_number<int>("[bilstm] conv_feature_maps", *v);
  if (auto v = r.get("bilstm", "kernel_sizes")) cfg.bilstm.kernel_sizes = parse_int_list("[bilstm] kernel_sizes", *v);
  if (auto v = r.get("bilstm", "dense_units")) cfg.bilstm.dense_units = parse_number<int>("[bilstm] dense_units", *v);
  if (auto v = r.get("bilstm", "max_len")) cfg.bilstm.max_len = parse_number<int>("[bilstm] max_len", *v);
  if (auto v = r.get("transformer", "model")) {
    const fs::path local = base_dir / *v;
    cfg.transformer.model_identifier = fs::is_directory(local) ? local.lexically_normal().string() : *v;
  }
  if (auto v = r.get("transformer", "max_subword_len")) {
    cfg.transformer.max_subword_len = parse_number<int>("[transformer] max_subword_len", *v);
  }

  const std::string finetune_stage =
      cfg.bootstrap.target == BootstrapTarget::Forum ? "new" : "rel";
  for (std::size_t i = 0; i < kArchitectures.size(); ++i) {
    const Architecture arch = kArchitectures[i];
    auto train = default_hyperparams(arch, "train");
    auto tune = default_hyperparams(arch, finetune_stage);
    read_hyperparams(r, section_name(arch), train);
    read_hyperparams(r, section_name(arch) + "_finetune", tune);
    train.seed = Rng::mix(cfg.seed, 100 + i);
    tune.seed = Rng::mix(cfg.seed, 200 + i);
    cfg.train_hp[arch] = train;
    cfg.finetune_hp[arch] = tune;
  }
  cfg.cnn.dropout = cfg.train_hp[Architecture::Cnn].dropout;
  cfg.bilstm.dropout = cfg.train_hp[Architecture::BiLstmCnn].dropout;
  cfg.transformer.dropout = cfg.train_hp[Architecture::Transformer].dropout;
  cfg.train_sampling.seed = Rng::mix(cfg.seed, 300);
  for (std::size_t i = 0; i < cfg.sweep.size(); ++i) cfg.sweep[i].seed = Rng::mix(cfg.seed, 400 + i);

  // Inputs each stage needs.
  auto require = [&](const fs::path& p, const std::string& key) {
    if (p.empty()) fail(key, "required for stage " + std::string(to_string(cfg.stage)));
  };
  const bool needs_vectors = cfg.uses(Architecture::Cnn) || cfg.uses(Architecture::BiLstmCnn);
  const bool german = cfg.stage != Stage::ImbalanceSweep ||
                      std::ranges::count(cfg.sweep_languages, "DE") > 0;
  const bool english = cfg.stage != Stage::ImbalanceSweep ||
                       std::ranges::count(cfg.sweep_languages, "EN") > 0;
  if (german) {
    require(cfg.data.germeval_train, "[data] germeval_train");
    require(cfg.data.germeval_test, "[data] germeval_test");
    if (needs_vectors) require(cfg.embeddings.de, "[embeddings] de");
  }
  if (english) {
    require(cfg.data.stormfront_csv, "[data] stormfront_csv");
    if (needs_vectors) require(cfg.embeddings.en, "[embeddings] en");
  }
  if (cfg.stage == Stage::Bootstrap && cfg.bootstrap.target == BootstrapTarget::Forum) {
    require(cfg.data.forum_dump, "[data] forum_dump");
  }
  if (cfg.stage == Stage::ImbalanceSweep && cfg.sweep.empty()) fail("[sampling] sweep", "no sampling specs");
  if (cfg.uses(Architecture::Transformer)) {
    if (cfg.transformer.model_identifier.empty()) fail("[transformer] model", "missing");
    models::resolve_checkpoint(cfg.transformer.model_identifier);
  }

  cfg.hash = sha256_hex(canonical_listing(tree));
  return cfg;
}

}  // namespace hsd::config
