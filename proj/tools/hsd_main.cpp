// hsd: command-line driver for the cross-lingual hate-speech pipeline.
//
// Exit codes: 0 success, 2 validation error (bad flags, config or input
// data), 1 runtime failure.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "hsd/config.hpp"
#include "hsd/embeddings.hpp"
#include "hsd/errors.hpp"
#include "hsd/experiments.hpp"
#include "hsd/models.hpp"
#include "hsd/sampling.hpp"
#include "hsd/tokenize.hpp"
#include "hsd/training.hpp"

namespace fs = std::filesystem;
using namespace hsd;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, Common& c, bool config_required = true) {
  auto* opt = cmd->add_option("--config", c.config, "Experiment config (INI)");
  if (config_required) opt->required();
  cmd->add_option("--seed", c.seed, "Global seed (overrides the config)");
  cmd->add_option("--out", c.out, "Output directory (overrides the config)");
}

config::ExperimentConfig load(const Common& c) { return config::load_config(c.config, c.seed); }

fs::path out_dir(const config::ExperimentConfig& cfg, const Common& c) {
  return experiments::output_dir(cfg, c.out ? std::optional<fs::path>(*c.out) : std::nullopt);
}

void print_counts(const Dataset& ds) {
  if (ds.empty() && ds.name.empty()) return;
  std::size_t no_hate = 0, hate = 0;
  for (const auto& ex : ds) {
    if (ex.label) (*ex.label == Label::Hate ? hate : no_hate) += 1;
  }
  std::printf("%-16s %7zu %7zu\n", ds.name.c_str(), no_hate, hate);
}

void print_report_row(const evaluation::EvalReport& r) {
  std::printf("%-12s %-8s acc %s  Hate P/R/F1 %s/%s/%s  macro-F1 %s\n", r.model.c_str(),
              r.stage.c_str(), evaluation::format_fixed(r.accuracy).c_str(),
              evaluation::format_fixed(r.of(Label::Hate).precision).c_str(),
              evaluation::format_fixed(r.of(Label::Hate).recall).c_str(),
              evaluation::format_fixed(r.of(Label::Hate).f1).c_str(),
              evaluation::format_fixed(r.macro.f1).c_str());
}

int run(int argc, char** argv) {
  CLI::App app{"Cross-lingual hate-speech detection pipeline"};
  app.require_subcommand(1);

  Common prep_opts, sample_opts, train_opts, boot_opts, eval_opts, sweep_opts, report_opts;

  auto* prepare = app.add_subcommand("prepare", "Relabel the source corpora and write the splits");
  add_common(prepare, prep_opts);

  auto* sample = app.add_subcommand("sample", "Write class-ratio resampled training sets");
  add_common(sample, sample_opts, false);
  std::string sample_input, sample_spec, sample_language = "DE";
  sample->add_option("--input", sample_input, "Canonical TSV to resample (instead of --config)");
  sample->add_option("--spec", sample_spec, "Sampling spec, e.g. \"ratio=7:1 mode=oversample seed=1\"");
  sample->add_option("--language", sample_language, "Language tag used in the output name");

  auto* train = app.add_subcommand("train", "Train the configured architectures on the English set");
  add_common(train, train_opts);

  auto* boot = app.add_subcommand("bootstrap", "Ensemble-label German data and fine-tune");
  add_common(boot, boot_opts);

  auto* evaluate = app.add_subcommand("evaluate", "Cross-lingual evaluation on DE-TEST");
  add_common(evaluate, eval_opts, false);
  std::string eval_model, eval_data, eval_emb;
  evaluate->add_option("--model", eval_model, "Checkpoint directory (instead of --config)");
  evaluate->add_option("--data", eval_data, "Labeled canonical TSV to evaluate on");
  evaluate->add_option("--emb", eval_emb, "Embedding file to bind (CNN/BiLSTM)");

  auto* sweep = app.add_subcommand("sweep", "Monolingual class-imbalance sweep");
  add_common(sweep, sweep_opts);

  auto* report = app.add_subcommand("report", "Build comparison tables from saved reports");
  add_common(report, report_opts, false);

  auto* encode = app.add_subcommand("encode", "Tokenize and encode text against an embedding file");
  std::string enc_emb;
  int enc_max_len = 64;
  std::optional<std::string> enc_text;
  encode->add_option("--emb", enc_emb, "Word-vector file")->required();
  encode->add_option("--max-len", enc_max_len, "Sequence length")->check(CLI::PositiveNumber);
  encode->add_option("--text", enc_text, "Text to encode (default: one text per stdin line)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (prepare->parsed()) {
    const auto cfg = load(prep_opts);
    const auto data = experiments::prepare(cfg, out_dir(cfg, prep_opts));
    std::printf("%-16s %7s %7s\n", "dataset", "noHate", "Hate");
    for (const Dataset* ds : {&data.en_train, &data.en_dev, &data.en_test, &data.en_excluded,
                              &data.de_train, &data.de_dev, &data.de_test}) {
      print_counts(*ds);
    }
  } else if (sample->parsed()) {
    if (!sample_input.empty()) {
      if (sample_spec.empty()) throw ValidationError("sample: --spec is required with --input");
      if (!sample_opts.out) throw ValidationError("sample: --out is required with --input");
      auto spec = sampling::parse_spec(sample_spec);
      if (sample_opts.seed) spec.seed = *sample_opts.seed;
      Dataset ds = sampling::resample(read_tsv(sample_input), spec);
      ds.name = sampling::sampled_name(sample_language, spec);
      fs::create_directories(*sample_opts.out);
      write_tsv(fs::path(*sample_opts.out) / (ds.name + ".tsv"), ds);
      print_counts(ds);
    } else {
      if (sample_opts.config.empty()) throw ValidationError("sample: pass --config or --input");
      const auto cfg = load(sample_opts);
      const fs::path out = out_dir(cfg, sample_opts);
      const auto data = experiments::prepare(cfg, out);
      for (const auto& ds : experiments::sample(cfg, data, out)) print_counts(ds);
    }
  } else if (train->parsed()) {
    const auto cfg = load(train_opts);
    const fs::path out = out_dir(cfg, train_opts);
    const auto data = experiments::prepare(cfg, out);
    for (const auto& [arch, model] : experiments::train_crosslingual(cfg, data, out)) {
      const auto& h = model.history();
      std::printf("%-12s best dev macro-F1 %s (epoch %d)\n", std::string(models::to_string(arch)).c_str(),
                  h.empty() || !h.back().dev_macro_f1 ? "n/a"
                      : evaluation::format_fixed(*h.back().dev_macro_f1).c_str(),
                  h.empty() || !h.back().best_epoch ? 0 : *h.back().best_epoch);
    }
  } else if (boot->parsed()) {
    const auto cfg = load(boot_opts);
    const auto result = experiments::run_bootstrap(cfg, out_dir(cfg, boot_opts));
    std::printf("labeled %zu of %zu (dropped %zu): noHate %zu / Hate %zu\n",
                result.labeled.total(), result.unlabeled_size, result.dropped,
                result.labeled.no_hate, result.labeled.hate);
    if (result.audit) {
      const auto& m = result.audit->cells;
      std::printf("audit (gold rows, ensemble columns): %llu %llu / %llu %llu\n",
                  static_cast<unsigned long long>(m[0][0]), static_cast<unsigned long long>(m[0][1]),
                  static_cast<unsigned long long>(m[1][0]), static_cast<unsigned long long>(m[1][1]));
    }
    for (const auto& r : result.before) print_report_row(r);
    for (const auto& r : result.after) print_report_row(r);
  } else if (evaluate->parsed()) {
    if (!eval_model.empty()) {
      if (eval_data.empty()) throw ValidationError("evaluate: --data is required with --model");
      models::LoadOptions options;
      if (!eval_emb.empty()) options.embeddings = std::make_shared<EmbeddingTable>(load_embeddings(eval_emb));
      const auto model = models::load_model(eval_model, options);
      const auto report = training::evaluate(model, read_tsv(eval_data));
      std::cout << evaluation::to_json(report).dump(2) << "\n";
    } else {
      if (eval_opts.config.empty()) throw ValidationError("evaluate: pass --config or --model");
      const auto cfg = load(eval_opts);
      for (const auto& r : experiments::run_crosslingual(cfg, out_dir(cfg, eval_opts))) print_report_row(r);
    }
  } else if (sweep->parsed()) {
    const auto cfg = load(sweep_opts);
    for (const auto& r : experiments::run_imbalance_sweep(cfg, out_dir(cfg, sweep_opts))) {
      std::printf("%-14s ", r.metadata.at("train_dataset").c_str());
      print_report_row(r);
    }
  } else if (report->parsed()) {
    fs::path out;
    if (report_opts.out) {
      out = *report_opts.out;
    } else if (!report_opts.config.empty()) {
      out = out_dir(load(report_opts), report_opts);
    } else {
      throw ValidationError("report: pass --out or --config");
    }
    std::cout << experiments::report(out);
  } else if (encode->parsed()) {
    const auto table = load_embeddings(enc_emb);
    auto emit = [&](const std::string& text) {
      const auto tokens = tokenize(text);
      const auto encoded = hsd::encode(tokens, table, enc_max_len);
      std::string line;
      for (std::size_t i = 0; i < tokens.size(); ++i) line += (i ? " " : "") + tokens[i];
      line += "\t";
      for (std::size_t i = 0; i < encoded.indices.size(); ++i) {
        line += (i ? " " : "") + std::to_string(encoded.indices[i]);
      }
      line += "\t" + std::to_string(encoded.true_length);
      std::cout << line << "\n";
    };
    if (enc_text) {
      emit(*enc_text);
    } else {
      for (std::string line; std::getline(std::cin, line);) emit(line);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const RuntimeFailure& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 1;
  }
}
