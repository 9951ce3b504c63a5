// Acceptance checks. Prints one line per criterion:
//   criterion <n>: PASS|FAIL|SKIP - <detail>
// Exit status is 1 when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>

#include "hsd/bootstrap.hpp"
#include "hsd/config.hpp"
#include "hsd/corpus.hpp"
#include "hsd/errors.hpp"
#include "hsd/evaluation.hpp"
#include "hsd/experiments.hpp"
#include "hsd/sampling.hpp"
#include "hsd/training.hpp"
#include "stub_classifier.hpp"
#include "support.hpp"

using namespace hsd;
namespace fs = std::filesystem;
using models::Architecture;

namespace {

// Tolerances.
constexpr double kTimeLimitSeconds = 5.0;
constexpr double kGradRelError = 1e-3;
constexpr std::size_t kGradMinParams = 20;
constexpr double kSoftmaxTolerance = 1e-6;
constexpr double kMemorizeAccuracy = 0.95;
constexpr int kMemorizeEpochs = 200;
constexpr int kMemorizeEpochsTransformer = 20;

struct Outcome {
  enum Kind { Pass, Fail, Skip } kind;
  std::string detail;
};

Outcome pass(std::string d) { return {Outcome::Pass, std::move(d)}; }
Outcome fail(std::string d) { return {Outcome::Fail, std::move(d)}; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string counts(const ClassCounts& c) {
  return std::to_string(c.no_hate) + "/" + std::to_string(c.hate);
}

std::string fixed(double v) { return evaluation::format_fixed(v); }

struct Fixtures {
  test::TempDir dir{"acceptance"};
  test::World world = test::write_world(dir.path());
};

Fixtures& fixtures() {
  static Fixtures f;
  return f;
}

config::ExperimentConfig german_only() {
  config::ExperimentConfig cfg;
  cfg.data.germeval_train = fixtures().world.germeval.train;
  cfg.data.germeval_test = fixtures().world.germeval.test;
  return cfg;
}

Outcome criterion1() {
  test::TempDir out("acc1");
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = experiments::prepare(german_only(), out.path());
  const double secs = seconds_since(t0);
  const auto tr = class_counts(p.de_train), dv = class_counts(p.de_dev), te = class_counts(p.de_test);
  const std::string detail = "DE-TRAIN " + counts(tr) + ", DE-DEV " + counts(dv) + ", DE-TEST " + counts(te) +
                             " in " + std::to_string(secs) + " s";
  const bool ok = tr == ClassCounts{3345, 855} && dv == ClassCounts{642, 167} && te == ClassCounts{2759, 773} &&
                  secs < kTimeLimitSeconds;
  return ok ? pass(detail) : fail(detail);
}

Outcome criterion2() {
  test::TempDir out("acc2");
  auto cfg = config::load_config(fixtures().world.write_config("acc2.ini", "crosslingual"));
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = experiments::prepare(cfg, out.path());
  struct Row {
    const Dataset* base;
    const char* lang;
    sampling::SamplingSpec spec;
    ClassCounts want;
  };
  using sampling::Mode;
  const std::vector<Row> rows{
      {&p.en_train, "EN", {{2, 1}, Mode::Undersample, 1}, {2562, 1281}},
      {&p.en_train, "EN", {{1, 1}, Mode::Undersample, 2}, {1281, 1281}},
      {&p.en_train, "EN", {{1, 1}, Mode::Oversample, 3}, {9018, 9018}},
      {&p.de_train, "DE", {{7, 1}, Mode::Oversample, 4}, {5985, 855}},
      {&p.de_train, "DE", {{2, 1}, Mode::Undersample, 5}, {1710, 855}},
      {&p.de_train, "DE", {{1, 1}, Mode::Undersample, 6}, {855, 855}},
      {&p.de_train, "DE", {{1, 1}, Mode::Oversample, 7}, {3345, 3345}},
  };
  bool ok = true;
  std::string detail;
  for (const auto& r : rows) {
    const auto got = class_counts(sampling::resample(*r.base, r.spec));
    ok = ok && got == r.want;
    detail += sampling::sampled_name(r.lang, r.spec) + " " + counts(got) + "; ";
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < kTimeLimitSeconds;
  detail += std::to_string(secs) + " s";
  return ok ? pass(detail) : fail(detail);
}

Outcome criterion3() {
  test::TempDir out("acc3");
  const auto p = experiments::prepare(german_only(), out.path());
  const auto gold = p.de_test.labels();
  const std::vector<Label> pred(gold.size(), Label::NoHate);
  const auto r = evaluation::metrics(evaluation::confusion(gold, pred));
  const auto& n = r.of(Label::NoHate);
  const auto& h = r.of(Label::Hate);
  const std::string detail = "noHate P/R/F1 " + fixed(n.precision) + "/" + fixed(n.recall) + "/" + fixed(n.f1) +
                             ", Hate " + fixed(h.precision) + "/" + fixed(h.recall) + "/" + fixed(h.f1) +
                             ", macro-F1 " + fixed(r.macro.f1);
  const bool ok = fixed(n.precision) == "78.11" && fixed(n.recall) == "100.00" && fixed(n.f1) == "87.71" &&
                  fixed(h.precision) == "0.00" && fixed(h.recall) == "0.00" && fixed(h.f1) == "0.00" &&
                  fixed(r.macro.f1) == "43.86";
  return ok ? pass(detail) : fail(detail);
}

Outcome criterion4() {
  // Gold/ensemble pairs with the reference audit counts, shuffled.
  const std::array<std::array<std::size_t, 2>, 2> cells{{{2688, 42}, {573, 34}}};
  std::vector<std::pair<Label, Label>> pairs;
  for (Label g : {Label::NoHate, Label::Hate}) {
    for (Label e : {Label::NoHate, Label::Hate}) {
      for (std::size_t k = 0; k < cells[index_of(g)][index_of(e)]; ++k) pairs.emplace_back(g, e);
    }
  }
  Rng rng(4);
  rng.shuffle(std::span(pairs));
  bootstrap::BootstrappedDataset boot;
  Dataset gold{"DE-TRAIN", {}};
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::string id = "de-" + std::to_string(i);
    boot.data.examples.push_back({id, "text", pairs[i].second, "DE-REL"});
    gold.examples.push_back({id, "text", pairs[i].first, "DE-TRAIN"});
  }
  const auto m = bootstrap::audit_against_gold(boot, gold);
  const auto r = evaluation::metrics(m);
  const std::string detail =
      "matrix (" + std::to_string(m.cells[0][0]) + ", " + std::to_string(m.cells[0][1]) + " / " +
      std::to_string(m.cells[1][0]) + ", " + std::to_string(m.cells[1][1]) + "), Hate P " +
      fixed(r.of(Label::Hate).precision) + " R " + fixed(r.of(Label::Hate).recall);
  const bool ok = m.cells[0][0] == 2688 && m.cells[0][1] == 42 && m.cells[1][0] == 573 && m.cells[1][1] == 34 &&
                  fixed(r.of(Label::Hate).precision) == "44.74" && fixed(r.of(Label::Hate).recall) == "5.60";
  return ok ? pass(detail) : fail(detail);
}

Outcome criterion5() {
  bootstrap::Ensemble e;
  const std::array<Architecture, 3> archs{Architecture::Cnn, Architecture::BiLstmCnn, Architecture::Transformer};
  for (std::size_t m = 0; m < 3; ++m) {
    e.members[m] = models::TrainedModel(std::make_unique<test::StubClassifier>(archs[m], m), m);
  }
  Dataset ds{"patterns", {}};
  for (int mask = 0; mask < 8; ++mask) {
    std::string text;
    for (int m = 0; m < 3; ++m) text += (mask >> m) & 1 ? '1' : '0';
    ds.examples.push_back({"p" + std::to_string(mask), text, std::nullopt, "patterns"});
  }
  const auto boot = bootstrap::ensemble_label(e, ds);
  bool ok = boot.votes.size() == 8;
  int ties = 0;
  for (int mask = 0; mask < 8 && ok; ++mask) {
    const int hate = __builtin_popcount(static_cast<unsigned>(mask));
    if (2 * hate == 3) ++ties;
    const Label want = hate >= 2 ? Label::Hate : Label::NoHate;
    ok = ok && boot.votes[static_cast<std::size_t>(mask)].label == want &&
         bootstrap::majority(boot.votes[static_cast<std::size_t>(mask)].votes) == want &&
         boot.data[static_cast<std::size_t>(mask)].label == want;
  }
  ok = ok && ties == 0;
  const std::string detail = "8/8 patterns resolve to the strict majority, " + std::to_string(ties) + " ties";
  return ok ? pass(detail) : fail(detail);
}

Outcome criterion6() {
  test::TempDir dir("acc6");
  const auto emb = test::write_embedding_fixture(dir.path());
  const auto batch = test::toy_set(synth::Language::English, 21, 2);
  models::TrainingHyperparams hp;
  hp.weight_no_hate = 0.3;
  hp.weight_hate = 0.7;
  hp.dropout = 0.0;

  bool ok = true;
  std::string detail;
  auto check = [&](models::TrainedModel model, const char* name, std::uint64_t seed) {
    auto& net = model.net();
    net.set_dropout(0.0);
    std::vector<models::ModelInput> inputs;
    for (const auto& ex : batch) inputs.push_back(net.encode(ex.text));
    const auto r = test::gradient_check(net, inputs, batch.labels(), hp, 20, 20, seed);
    ok = ok && r.nontrivial >= kGradMinParams && r.max_rel_error <= kGradRelError;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s max rel err %.2e over %zu params (%zu non-zero); ", name,
                  r.max_rel_error, r.checked, r.nontrivial);
    detail += buf;
  };
  check(models::build_cnn({}, emb.en_table, 1), "CNN", 61);
  check(models::build_bilstm_cnn({}, emb.en_table, 2), "BiLSTM", 62);

  // Softmax normalization on every architecture.
  models::TransformerConfig tcfg;
  tcfg.model_identifier = fixtures().world.bert.string();
  tcfg.max_subword_len = 32;
  const std::vector<models::TrainedModel> nets{models::build_cnn({}, emb.en_table, 3),
                                               models::build_bilstm_cnn({}, emb.en_table, 4),
                                               models::build_transformer_classifier(tcfg, 5)};
  const auto texts = test::toy_set(synth::Language::German, 22, 50);
  double worst = 0.0;
  for (const auto& m : nets) {
    for (const auto& p : training::predict(m, texts)) worst = std::max(worst, std::abs(p.probs[0] + p.probs[1] - 1.0));
    const auto empty = m.net().forward(m.net().encode(""));
    worst = std::max(worst, std::abs(empty[0] + empty[1] - 1.0));
  }
  ok = ok && worst <= kSoftmaxTolerance;
  char buf[96];
  std::snprintf(buf, sizeof buf, "softmax max |sum - 1| %.1e over 3 architectures", worst);
  detail += buf;
  return ok ? pass(detail) : fail(detail);
}

Outcome criterion7() {
  test::TempDir dir("acc7");
  const auto emb = test::write_embedding_fixture(dir.path());
  const auto toy = test::toy_set(synth::Language::English, 71);
  models::TransformerConfig tcfg;
  tcfg.model_identifier = fixtures().world.bert.string();
  tcfg.max_subword_len = 32;

  bool ok = toy.size() == 32 && class_counts(toy) == ClassCounts{16, 16};
  std::string detail;
  auto run = [&](models::TrainedModel model, const char* name, int epochs, double lr) {
    models::TrainingHyperparams hp;
    hp.epochs = epochs;
    hp.learning_rate = lr;
    hp.batch_size = 8;
    hp.dropout = 0.0;
    hp.seed = 7;
    const auto trained = training::train(model, toy, hp, toy);
    const double acc = training::training_accuracy(trained, toy);
    ok = ok && acc >= kMemorizeAccuracy;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s %.3f (best epoch %d of %d); ", name, acc,
                  trained.history().back().best_epoch.value_or(0), epochs);
    detail += buf;
  };
  run(models::build_cnn({}, emb.en_table, 1), "CNN", kMemorizeEpochs, 1e-3);
  run(models::build_bilstm_cnn({}, emb.en_table, 2), "BiLSTM", kMemorizeEpochs, 1e-3);
  run(models::build_transformer_classifier(tcfg, 3), "transformer", kMemorizeEpochsTransformer, 1e-3);
  detail += "transformer is a 2-layer random-init multilingual checkpoint";
  return ok ? pass(detail) : fail(detail);
}

Outcome real_data_only(const char* what, const char* env) {
  return {Outcome::Skip, std::string(what) +
                             " needs the real corpora, embeddings and a pretrained multilingual checkpoint; "
                             "run acceptance_realdata with " + env + " set"};
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const char* sub : {"data", "reports"}) {
    if (!fs::exists(root / sub)) continue;
    for (const auto& e : fs::recursive_directory_iterator(root / sub)) {
      if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = read_file(e.path());
    }
  }
  return out;
}

Outcome criterion10() {
  const auto& w = fixtures().world;
  const auto cross = config::load_config(w.write_config("acc10-cross.ini", "crosslingual"));
  const auto sweep = config::load_config(w.write_config(
      "acc10-sweep.ini", "imbalance_sweep",
      "[sampling]\nsweep = ratio=7:1 mode=oversample; ratio=1:1 mode=undersample\nlanguages = DE, EN\n"));
  test::TempDir a("acc10-a"), b("acc10-b");
  for (const auto* dir : {&a, &b}) {
    experiments::sample(sweep, experiments::prepare(sweep, dir->path()), dir->path());
    experiments::run_crosslingual(cross, dir->path());
  }
  const auto sa = snapshot(a.path()), sb = snapshot(b.path());
  std::size_t reports = 0;
  for (const auto& [k, v] : sa) reports += k.starts_with("reports/");
  const bool ok = sa == sb && reports > 0;
  const std::string detail = std::to_string(sa.size()) + " dataset/report files (" + std::to_string(reports) +
                             " reports) byte-identical across two runs";
  return ok ? pass(detail) : fail(detail);
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, criterion1},
      {2, criterion2},
      {3, criterion3},
      {4, criterion4},
      {5, criterion5},
      {6, criterion6},
      {7, criterion7},
      {8, [] { return real_data_only("cross-lingual zero-shot sanity", "HSD_REALDATA_CONFIG"); }},
      {9, [] { return real_data_only("bootstrap skew property", "HSD_REALDATA_BOOTSTRAP_CONFIG"); }},
      {10, criterion10},
  };
  int failures = 0;
  for (const auto& [n, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const char* tag = o.kind == Outcome::Pass ? "PASS" : o.kind == Outcome::Fail ? "FAIL" : "SKIP";
    std::printf("criterion %d: %s - %s\n", n, tag, o.detail.c_str());
    std::fflush(stdout);
    failures += o.kind == Outcome::Fail;
  }
  return failures == 0 ? 0 : 1;
}
