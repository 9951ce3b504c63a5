#include "hsd/experiments.hpp"

#include <algorithm>
#include <functional>
#include <iostream>

#include "hsd/bilstm_cnn.hpp"
#include "hsd/cnn.hpp"
#include "hsd/corpus.hpp"
#include "hsd/errors.hpp"
#include "hsd/forum_text.hpp"
#include "hsd/hashing.hpp"
#include "hsd/sampling.hpp"
#include "hsd/training.hpp"
#include "hsd/transformer.hpp"

namespace hsd::experiments {
namespace {

namespace fs = std::filesystem;
using config::ExperimentConfig;
using models::Architecture;
using models::TrainedModel;
using Table = std::shared_ptr<const EmbeddingTable>;

constexpr std::array<Architecture, 3> kEnsembleOrder{
    Architecture::Cnn, Architecture::BiLstmCnn, Architecture::Transformer};

// Bumped whenever a change alters trained parameters for the same inputs.
constexpr int kCacheVersion = 1;

void log(const std::string& message) { std::cerr << "[hsd] " << message << "\n"; }

std::size_t arch_index(Architecture arch) {
  return static_cast<std::size_t>(std::find(kEnsembleOrder.begin(), kEnsembleOrder.end(), arch) -
                                  kEnsembleOrder.begin());
}

void write_dataset(const fs::path& path, const Dataset& ds, const ExperimentConfig& cfg,
                   const std::string& producer, const nlohmann::json& extra = nlohmann::json::object()) {
  fs::create_directories(path.parent_path());
  const std::string content = format_tsv(ds);
  write_file(path, content);
  std::size_t no_hate = 0, hate = 0;
  for (const auto& ex : ds) {
    if (ex.label) (*ex.label == Label::Hate ? hate : no_hate) += 1;
  }
  nlohmann::json meta{{"dataset", ds.name},
                      {"producer", producer},
                      {"config_hash", cfg.hash},
                      {"seed", cfg.seed},
                      {"examples", ds.size()},
                      {"noHate", no_hate},
                      {"Hate", hate},
                      {"unlabeled", ds.size() - no_hate - hate},
                      {"sha256", sha256_hex(content)}};
  meta.update(extra);
  write_file(path.string() + ".meta.json", meta.dump(2) + "\n");
}

void write_report(const fs::path& path, evaluation::EvalReport report,
                  const ExperimentConfig& cfg, const std::string& stage,
                  const std::string& train_dataset) {
  report.stage = stage;
  report.metadata["config_hash"] = cfg.hash;
  report.metadata["seed"] = std::to_string(cfg.seed);
  report.metadata["train_dataset"] = train_dataset;
  fs::create_directories(path.parent_path());
  write_file(path, evaluation::to_json(report).dump(2) + "\n");
}

evaluation::EvalReport evaluate_on(const TrainedModel& model, const Dataset& test,
                                   const Table& table) {
  if (table && model.embeddings() && model.embeddings() != table) {
    TrainedModel probe = model;
    probe.bind_embeddings(table);
    return training::evaluate(probe, test);
  }
  return training::evaluate(model, test);
}

struct Tables {
  Table en, de;
  const Table& of(const std::string& lang) const { return lang == "EN" ? en : de; }
};

Tables load_tables(const ExperimentConfig& cfg) {
  Tables t;
  if (!cfg.uses(Architecture::Cnn) && !cfg.uses(Architecture::BiLstmCnn)) return t;
  if (!cfg.embeddings.en.empty()) {
    log("loading " + cfg.embeddings.en.string());
    t.en = std::make_shared<EmbeddingTable>(load_embeddings(cfg.embeddings.en, cfg.embeddings.max_vocab));
  }
  if (!cfg.embeddings.de.empty()) {
    log("loading " + cfg.embeddings.de.string());
    t.de = std::make_shared<EmbeddingTable>(load_embeddings(cfg.embeddings.de, cfg.embeddings.max_vocab));
  }
  if (t.en && t.de && t.en->dimension() != t.de->dimension()) {
    throw ValidationError("English and German embeddings differ in dimension (" +
                          std::to_string(t.en->dimension()) + " vs " +
                          std::to_string(t.de->dimension()) + ")");
  }
  return t;
}

std::string checkpoint_fingerprint(const ExperimentConfig& cfg) {
  if (!cfg.uses(Architecture::Transformer)) return "";
  const fs::path dir = models::resolve_checkpoint(cfg.transformer.model_identifier);
  std::string out;
  for (const char* name : {"config.json", "vocab.txt", "model.safetensors"}) {
    out += sha256_file(dir / name);
  }
  return out;
}

TrainedModel build(Architecture arch, const ExperimentConfig& cfg, const Table& table) {
  const std::uint64_t seed = Rng::mix(cfg.seed, 500 + arch_index(arch));
  switch (arch) {
    case Architecture::Cnn:
      return models::build_cnn(cfg.cnn, table, seed);
    case Architecture::BiLstmCnn:
      return models::build_bilstm_cnn(cfg.bilstm, table, seed);
    case Architecture::Transformer:
      return models::build_transformer_classifier(cfg.transformer, seed);
  }
  throw ValidationError("unknown architecture");
}

// Loads the checkpoint in `dir` when its recorded key matches, otherwise
// produces, saves and returns a fresh model.
TrainedModel cached(const fs::path& dir, const std::string& key, const Table& table,
                    const ExperimentConfig& cfg, const std::function<TrainedModel()>& produce) {
  const fs::path run = dir / "run.json";
  if (fs::exists(run)) {
    const auto j = nlohmann::json::parse(read_file(run), nullptr, false);
    if (!j.is_discarded() && j.value("cache_key", "") == key) {
      log("reusing checkpoint " + dir.string());
      models::LoadOptions options;
      options.embeddings = table;
      return models::load_model(dir, options);
    }
  }
  TrainedModel model = produce();
  fs::remove_all(dir);
  models::save_model(model, dir);
  write_file(run, nlohmann::json{{"cache_key", key}, {"config_hash", cfg.hash}, {"seed", cfg.seed}}
                      .dump(2) + "\n");
  return model;
}

std::string training_key(Architecture arch, const TrainedModel& untrained,
                         const models::TrainingHyperparams& hp, const Dataset& train,
                         const Dataset* dev, const Tables& tables, const std::string& fingerprint,
                         const std::string& parent) {
  nlohmann::json j{{"version", kCacheVersion},
                   {"architecture", models::to_string(arch)},
                   {"config", untrained.net().config_json()},
                   {"init_seed", untrained.init_seed()},
                   {"hyperparams", models::to_json(hp)},
                   {"train", sha256_hex(format_tsv(train))},
                   {"dev", dev ? sha256_hex(format_tsv(*dev)) : ""},
                   {"parent", parent}};
  if (arch == Architecture::Transformer) {
    j["checkpoint"] = fingerprint;
  } else {
    j["embeddings"] = {tables.en ? tables.en->source_sha256 : "",
                       tables.de ? tables.de->source_sha256 : ""};
  }
  return sha256_hex(j.dump());
}

Dataset limit(const Dataset& ds, std::size_t cap, std::uint64_t seed) {
  if (cap == 0 || ds.size() <= cap) return ds;
  std::vector<std::size_t> order(ds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(std::span(order));
  order.resize(cap);
  std::sort(order.begin(), order.end());
  Dataset out{ds.name + "-n" + std::to_string(cap), {}};
  for (std::size_t i : order) out.examples.push_back(ds[i]);
  return out;
}

Dataset checked_resample(const Dataset& base, const sampling::SamplingSpec& spec,
                         const std::string& language) {
  const ClassCounts expected = sampling::target_counts(class_counts(base), spec);
  Dataset out = sampling::resample(base, spec);
  out.name = sampling::sampled_name(language, spec);
  if (class_counts(out) != expected) {
    throw RuntimeFailure("sampled " + out.name + " does not match its spec");
  }
  return out;
}

std::string file_name(std::string name) {
  std::replace(name.begin(), name.end(), '*', '+');
  std::replace(name.begin(), name.end(), '/', '_');
  return name;
}

std::string comparison_tables(const fs::path& stage_dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(stage_dir)) {
    const auto& p = entry.path();
    if (p.extension() == ".json" && p.filename() != "audit.json") files.push_back(p);
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) return "";
  std::vector<evaluation::EvalReport> reports;
  std::vector<std::string> stems;
  for (const auto& f : files) {
    const auto j = nlohmann::json::parse(read_file(f), nullptr, false);
    if (j.is_discarded()) throw ValidationError(f.string() + ": bad JSON");
    reports.push_back(evaluation::report_from_json(j));
    stems.push_back(f.stem().string());
  }

  std::string text, csv;
  const bool paired = std::any_of(stems.begin(), stems.end(),
                                  [](const std::string& s) { return s.find("before-") != std::string::npos; });
  if (paired) {
    // Before/after per model: rows "<n>-before-<arch>" and "<n>-after-<arch>".
    std::map<std::string, std::array<std::optional<std::size_t>, 2>> pairs;
    for (std::size_t i = 0; i < stems.size(); ++i) {
      const auto b = stems[i].find("before-");
      const auto a = stems[i].find("after-");
      if (b != std::string::npos) pairs[stems[i].substr(b + 7)][0] = i;
      if (a != std::string::npos) pairs[stems[i].substr(a + 6)][1] = i;
    }
    bool header = true;
    for (const auto& [arch, idx] : pairs) {
      if (!idx[0] || !idx[1]) continue;
      const std::vector<evaluation::EvalReport> pair{reports[*idx[0]], reports[*idx[1]]};
      const auto cmp = evaluation::compare(pair, 0);
      text += evaluation::format_text(cmp) + "\n";
      std::string block = evaluation::format_csv(cmp);
      if (!header) block.erase(0, block.find('\n') + 1);
      header = false;
      csv += block;
    }
  } else {
    const auto cmp = evaluation::compare(reports, 0);
    text = evaluation::format_text(cmp);
    csv = evaluation::format_csv(cmp);
  }
  write_file(stage_dir / "comparison.txt", text);
  write_file(stage_dir / "comparison.csv", csv);
  return text;
}

}  // namespace

fs::path output_dir(const ExperimentConfig& cfg, const std::optional<fs::path>& out_override) {
  if (out_override) return *out_override;
  if (!cfg.out.empty()) return cfg.out;
  throw ValidationError("no output directory: pass --out or set `out` in the config");
}

Prepared prepare(const ExperimentConfig& cfg, const fs::path& out) {
  Prepared p;
  const fs::path data_dir = out / "data";
  if (!cfg.data.germeval_train.empty()) {
    auto official = corpus::relabel_germeval(corpus::read_germeval(cfg.data.germeval_train), "germeval-train");
    auto split = corpus::split_german(official);
    p.de_train = std::move(split.train);
    p.de_dev = std::move(split.dev);
    write_dataset(data_dir / "DE-TRAIN.tsv", p.de_train, cfg, "prepare");
    write_dataset(data_dir / "DE-DEV.tsv", p.de_dev, cfg, "prepare");
  }
  if (!cfg.data.germeval_test.empty()) {
    p.de_test = corpus::relabel_germeval(corpus::read_germeval(cfg.data.germeval_test), "DE-TEST");
    write_dataset(data_dir / "DE-TEST.tsv", p.de_test, cfg, "prepare");
  }
  if (!cfg.data.stormfront_csv.empty()) {
    const auto full = corpus::relabel_stormfront(corpus::read_stormfront(cfg.data.stormfront_csv));
    auto split = corpus::split_english(full, cfg.data.english_counts, Rng::mix(cfg.seed, 1));
    p.en_train = std::move(split.train);
    p.en_dev = std::move(split.dev);
    p.en_test = std::move(split.test);
    p.en_excluded = std::move(split.excluded);
    write_dataset(data_dir / "EN-TRAIN.tsv", p.en_train, cfg, "prepare");
    write_dataset(data_dir / "EN-DEV.tsv", p.en_dev, cfg, "prepare");
    write_dataset(data_dir / "EN-TEST.tsv", p.en_test, cfg, "prepare");
    write_dataset(data_dir / "EN-EXCLUDED.tsv", p.en_excluded, cfg, "prepare");
  }
  return p;
}

std::vector<Dataset> sample(const ExperimentConfig& cfg, const Prepared& data, const fs::path& out) {
  std::vector<Dataset> produced;
  const fs::path dir = out / "data" / "sampled";
  auto emit = [&](const Dataset& base, const sampling::SamplingSpec& spec, const std::string& lang) {
    if (base.empty()) throw ValidationError(lang + "-TRAIN is not available for sampling");
    Dataset ds = checked_resample(base, spec, lang);
    write_dataset(dir / (file_name(ds.name) + ".tsv"), ds, cfg, "sample",
                  {{"spec", sampling::format_spec(spec)}, {"source", base.name}});
    produced.push_back(std::move(ds));
  };
  if (!data.en_train.empty()) emit(data.en_train, cfg.train_sampling, "EN");
  for (const auto& lang : cfg.sweep_languages) {
    for (const auto& spec : cfg.sweep) emit(lang == "EN" ? data.en_train : data.de_train, spec, lang);
  }
  return produced;
}

Dataset crosslingual_training_set(const ExperimentConfig& cfg, const Prepared& data) {
  if (data.en_train.empty()) throw ValidationError("EN-TRAIN is empty");
  return limit(checked_resample(data.en_train, cfg.train_sampling, "EN"), cfg.data.train_limit,
               Rng::mix(cfg.seed, 600));
}

namespace {

std::map<Architecture, TrainedModel> train_crosslingual_with(const ExperimentConfig& cfg,
                                                             const Prepared& data,
                                                             const fs::path& out,
                                                             const Tables& tables) {
  const Dataset train = crosslingual_training_set(cfg, data);
  if (data.de_dev.empty()) throw ValidationError("DE-DEV is empty");
  const std::string fingerprint = checkpoint_fingerprint(cfg);
  std::map<Architecture, TrainedModel> result;
  for (Architecture arch : cfg.architectures) {
    const bool vectors = arch != Architecture::Transformer;
    TrainedModel untrained = build(arch, cfg, vectors ? tables.en : nullptr);
    const auto& hp = cfg.train_hp.at(arch);
    const std::string key =
        training_key(arch, untrained, hp, train, &data.de_dev, tables, fingerprint, "");
    const fs::path dir = out / "models" / "crosslingual" / std::string(models::to_string(arch));
    log("training " + std::string(models::to_string(arch)) + " on " + train.name + " (" +
        std::to_string(train.size()) + " examples)");
    TrainedModel model = cached(dir, key, vectors ? tables.en : nullptr, cfg, [&] {
      training::TrainOptions options;
      options.dev_embeddings = tables.de;
      return training::train(untrained, train, hp, data.de_dev, options);
    });
    if (vectors) model.bind_embeddings(tables.de);
    result.emplace(arch, std::move(model));
  }
  return result;
}

}  // namespace

std::map<Architecture, TrainedModel> train_crosslingual(const ExperimentConfig& cfg,
                                                        const Prepared& data, const fs::path& out) {
  return train_crosslingual_with(cfg, data, out, load_tables(cfg));
}

std::vector<evaluation::EvalReport> run_crosslingual(const ExperimentConfig& cfg, const fs::path& out) {
  const Prepared data = prepare(cfg, out);
  const auto trained = train_crosslingual(cfg, data, out);
  const std::string train_name = crosslingual_training_set(cfg, data).name;
  const fs::path dir = out / "reports" / "crosslingual";
  fs::create_directories(dir);

  const auto gold = data.de_test.labels();
  evaluation::EvalReport baseline =
      evaluation::metrics(evaluation::confusion(gold, std::vector<Label>(gold.size(), Label::NoHate)));
  baseline.model = "all-noHate";
  baseline.dataset = data.de_test.name;
  write_report(dir / "0-all-noHate.json", baseline, cfg, "crosslingual", "-");

  std::vector<evaluation::EvalReport> reports;
  for (Architecture arch : cfg.architectures) {
    auto report = evaluate_on(trained.at(arch), data.de_test, nullptr);
    write_report(dir / (std::to_string(1 + arch_index(arch)) + "-" +
                        std::string(models::to_string(arch)) + ".json"),
                 report, cfg, "crosslingual", train_name);
    report.stage = "crosslingual";
    reports.push_back(std::move(report));
  }
  comparison_tables(dir);
  return reports;
}

BootstrapResult run_bootstrap(const ExperimentConfig& cfg, const fs::path& out) {
  for (Architecture arch : kEnsembleOrder) {
    if (!cfg.uses(arch)) {
      throw ValidationError("bootstrap needs all three architectures (cnn, bilstm, transformer)");
    }
  }
  const Prepared data = prepare(cfg, out);
  const Tables tables = load_tables(cfg);
  auto trained = train_crosslingual_with(cfg, data, out, tables);

  Dataset unlabeled;
  std::string target_name;
  if (cfg.bootstrap.target == config::BootstrapTarget::GermanTrain) {
    unlabeled = data.de_train;
    target_name = "DE-REL";
  } else {
    std::vector<corpus::DroppedLine> dropped;
    unlabeled = corpus::preprocess_forum_text(corpus::read_forum_dump(cfg.data.forum_dump), {}, &dropped);
    unlabeled.name = "DE-NEW-raw";
    target_name = "DE-NEW";
    write_dataset(out / "data" / "DE-NEW-raw.tsv", unlabeled, cfg, "preprocess_forum_text",
                  {{"dropped_lines", dropped.size()}});
  }

  bootstrap::Ensemble ensemble;
  for (std::size_t m = 0; m < bootstrap::kMembers; ++m) ensemble.members[m] = trained.at(kEnsembleOrder[m]);

  const fs::path report_dir = out / "reports" / "bootstrap";
  fs::create_directories(report_dir);
  BootstrapResult result;
  result.unlabeled_size = unlabeled.size();
  for (std::size_t m = 0; m < bootstrap::kMembers; ++m) {
    auto r = evaluate_on(ensemble.members[m], data.de_test, nullptr);
    const std::string arch(models::to_string(kEnsembleOrder[m]));
    write_report(report_dir / (std::to_string(m + 1) + "-before-" + arch + ".json"), r, cfg,
                 "before", crosslingual_training_set(cfg, data).name);
    r.stage = "before";
    result.before.push_back(std::move(r));
  }

  // Cache key over the whole round: members, unlabeled data and settings.
  nlohmann::json key_json{{"version", kCacheVersion}, {"unlabeled", sha256_hex(format_tsv(unlabeled))},
                          {"dev", sha256_hex(format_tsv(data.de_dev))}, {"rounds", cfg.bootstrap.rounds}};
  for (std::size_t m = 0; m < bootstrap::kMembers; ++m) {
    const Architecture arch = kEnsembleOrder[m];
    const auto run = nlohmann::json::parse(
        read_file(out / "models" / "crosslingual" / std::string(models::to_string(arch)) / "run.json"));
    key_json["members"].push_back(run.at("cache_key"));
    key_json["hyperparams"].push_back(models::to_json(cfg.finetune_hp.at(arch)));
  }
  const std::string round_key = sha256_hex(key_json.dump());
  const fs::path round_dir = out / "models" / "bootstrap";

  bool reuse = true;
  for (Architecture arch : kEnsembleOrder) {
    const fs::path run = round_dir / std::string(models::to_string(arch)) / "run.json";
    if (!fs::exists(run)) {
      reuse = false;
      continue;
    }
    const auto j = nlohmann::json::parse(read_file(run), nullptr, false);
    reuse = reuse && !j.is_discarded() && j.value("cache_key", "") == round_key;
  }

  bootstrap::BootstrappedDataset labeled;
  bootstrap::Ensemble tuned;
  if (reuse) {
    log("reusing fine-tuned ensemble in " + round_dir.string());
    labeled = bootstrap::ensemble_label(ensemble, unlabeled);
    for (std::size_t m = 0; m < bootstrap::kMembers; ++m) {
      models::LoadOptions options;
      options.embeddings = kEnsembleOrder[m] == Architecture::Transformer ? nullptr : tables.de;
      tuned.members[m] = models::load_model(round_dir / std::string(models::to_string(kEnsembleOrder[m])), options);
    }
  } else {
    log("bootstrapping " + std::to_string(unlabeled.size()) + " examples");
    tuned = bootstrap::bootstrap_round(ensemble, unlabeled, cfg.finetune_hp, cfg.bootstrap.rounds,
                                       &data.de_dev, &labeled);
    if (unlabeled.empty()) labeled = bootstrap::ensemble_label(ensemble, unlabeled);
    for (std::size_t m = 0; m < bootstrap::kMembers; ++m) {
      const fs::path dir = round_dir / std::string(models::to_string(kEnsembleOrder[m]));
      fs::remove_all(dir);
      models::save_model(tuned.members[m], dir);
      write_file(dir / "run.json", nlohmann::json{{"cache_key", round_key}, {"config_hash", cfg.hash},
                                                  {"seed", cfg.seed}}.dump(2) + "\n");
    }
  }

  labeled.data.name = target_name;
  bootstrap::write_bootstrapped(out / "data" / (target_name + ".tsv"), labeled);
  write_dataset(out / "data" / (target_name + ".tsv"), labeled.data, cfg, "ensemble_label",
                {{"dropped", labeled.dropped.size()}, {"ensemble", labeled.provenance}});
  result.labeled = class_counts(labeled.data);
  result.dropped = labeled.dropped.size();

  for (std::size_t m = 0; m < bootstrap::kMembers; ++m) {
    auto r = evaluate_on(tuned.members[m], data.de_test, nullptr);
    const std::string arch(models::to_string(kEnsembleOrder[m]));
    write_report(report_dir / (std::to_string(m + 4) + "-after-" + arch + ".json"), r, cfg,
                 "after", target_name);
    r.stage = "after";
    result.after.push_back(std::move(r));
  }

  nlohmann::json audit{{"config_hash", cfg.hash},
                       {"seed", cfg.seed},
                       {"dataset", target_name},
                       {"unlabeled", result.unlabeled_size},
                       {"labeled", labeled.data.size()},
                       {"dropped", result.dropped},
                       {"noHate", result.labeled.no_hate},
                       {"Hate", result.labeled.hate}};
  if (labeled.has_gold() && !labeled.data.empty()) {
    result.audit = bootstrap::audit_against_gold(labeled, labeled.gold_dataset());
    auto r = evaluation::metrics(*result.audit);
    r.model = "ensemble";
    r.dataset = target_name;
    r.stage = "audit";
    audit["audit"] = evaluation::to_json(r);
  }
  write_file(report_dir / "audit.json", audit.dump(2) + "\n");
  comparison_tables(report_dir);
  return result;
}

std::vector<evaluation::EvalReport> run_imbalance_sweep(const ExperimentConfig& cfg, const fs::path& out) {
  const Prepared data = prepare(cfg, out);
  const Tables tables = load_tables(cfg);
  const std::string fingerprint = checkpoint_fingerprint(cfg);
  const fs::path report_dir = out / "reports" / "sweep";
  fs::create_directories(report_dir);
  std::vector<evaluation::EvalReport> reports;
  std::size_t cell = 0;
  for (const auto& lang : cfg.sweep_languages) {
    const bool en = lang == "EN";
    const Dataset& base = en ? data.en_train : data.de_train;
    const Dataset& dev = en ? data.en_dev : data.de_dev;
    const Dataset& test = en ? data.en_test : data.de_test;
    for (const auto& spec : cfg.sweep) {
      const Dataset sampled = checked_resample(base, spec, lang);
      write_dataset(out / "data" / "sampled" / (file_name(sampled.name) + ".tsv"), sampled, cfg,
                    "sample", {{"spec", sampling::format_spec(spec)}, {"source", base.name}});
      const Dataset train = limit(sampled, cfg.data.train_limit, Rng::mix(cfg.seed, 700 + cell));
      for (Architecture arch : cfg.architectures) {
        const bool vectors = arch != Architecture::Transformer;
        const Table table = vectors ? tables.of(lang) : nullptr;
        TrainedModel untrained = build(arch, cfg, table);
        const auto& hp = cfg.train_hp.at(arch);
        const std::string key =
            training_key(arch, untrained, hp, train, &dev, tables, fingerprint, lang);
        const std::string name = std::string(models::to_string(arch)) + "-" + file_name(sampled.name);
        log("sweep cell " + name);
        TrainedModel model = cached(out / "models" / "sweep" / name, key, table, cfg,
                                    [&] { return training::train(untrained, train, hp, dev); });
        auto r = evaluate_on(model, test, table);
        char prefix[16];
        std::snprintf(prefix, sizeof prefix, "%03zu-", ++cell);
        write_report(report_dir / (prefix + name + ".json"), r, cfg, "sweep", sampled.name);
        r.stage = "sweep";
        r.metadata["train_dataset"] = sampled.name;
        reports.push_back(std::move(r));
      }
    }
  }
  comparison_tables(report_dir);
  return reports;
}

std::string report(const fs::path& out) {
  const fs::path root = out / "reports";
  if (!fs::is_directory(root)) throw ValidationError("no reports under " + root.string());
  std::vector<fs::path> stages;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) stages.push_back(entry.path());
  }
  std::sort(stages.begin(), stages.end());
  std::string text;
  for (const auto& dir : stages) {
    const std::string table = comparison_tables(dir);
    if (!table.empty()) text += "== " + dir.filename().string() + " ==\n" + table + "\n";
  }
  return text;
}

}  // namespace hsd::experiments
