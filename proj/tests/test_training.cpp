#include <doctest.h>

#include <limits>

#include "hsd/errors.hpp"
#include "hsd/training.hpp"
#include "stub_classifier.hpp"
#include "support.hpp"

using namespace hsd;
namespace fs = std::filesystem;
using namespace hsd::training;
using models::TrainingHyperparams;

namespace {

TrainingHyperparams quick(int epochs, double lr = 1e-2) {
  TrainingHyperparams hp;
  hp.epochs = epochs;
  hp.learning_rate = lr;
  hp.batch_size = 8;
  hp.dropout = 0.0;
  hp.seed = 5;
  return hp;
}

models::BiLstmConfig small_lstm() {
  models::BiLstmConfig c;
  c.recurrent_units = 8;
  c.conv_feature_maps = 8;
  c.dense_units = 8;
  return c;
}

}  // namespace

TEST_CASE("argmax") {
  CHECK(argmax({0.8, 0.2}) == Label::NoHate);
  CHECK(argmax({0.2, 0.8}) == Label::Hate);
  CHECK(argmax({0.5, 0.5}) == Label::NoHate);
}

TEST_CASE("predict") {
  test::TempDir dir("train-predict");
  const auto emb = test::write_embedding_fixture(dir.path());
  const auto model = models::build_cnn({}, emb.en_table, 1);
  const auto data = test::toy_set(synth::Language::English, 3);
  const auto a = predict(model, data);
  const auto b = predict(model, data);
  REQUIRE(a.size() == data.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].ok());
    CHECK(a[i].probs == b[i].probs);
    CHECK(a[i].probs[0] + a[i].probs[1] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(a[i].label == argmax(a[i].probs));
  }
}

TEST_CASE("predict keeps going past encoding failures") {
  models::TrainedModel stub(std::make_unique<test::StubClassifier>(models::Architecture::Cnn, 0), 0);
  Dataset ds{"d", {{"a", "1", Label::Hate, "d"}, {"b", "x", Label::Hate, "d"}, {"c", "0", Label::NoHate, "d"}}};
  const auto p = predict(stub, ds);
  REQUIRE(p.size() == 3);
  CHECK(p[0].label == Label::Hate);
  CHECK_FALSE(p[1].ok());
  CHECK_FALSE(p[1].error.empty());
  CHECK(p[2].label == Label::NoHate);
  CHECK(evaluate(stub, ds).matrix.total() == 2);
}

TEST_CASE("epochs = 0 leaves the model unchanged") {
  test::TempDir dir("train-zero");
  const auto emb = test::write_embedding_fixture(dir.path());
  const auto model = models::build_cnn({}, emb.en_table, 2);
  const auto data = test::toy_set(synth::Language::English, 4);
  const auto before = predict(model, data);
  for (const auto& out : {train(model, data, quick(0), data), fine_tune(model, data, quick(0))}) {
    const auto after = predict(out, data);
    for (std::size_t i = 0; i < data.size(); ++i) CHECK(after[i].probs == before[i].probs);
    CHECK(out.history().empty());
  }
}

TEST_CASE("train preconditions") {
  test::TempDir dir("train-pre");
  const auto emb = test::write_embedding_fixture(dir.path());
  const auto model = models::build_cnn({}, emb.en_table, 2);
  const auto data = test::toy_set(synth::Language::English, 4);
  CHECK_THROWS_AS(train(model, data, quick(1), Dataset{}), ValidationError);
  auto unlabeled = data;
  unlabeled.examples[3].label.reset();
  CHECK_THROWS_AS(train(model, unlabeled, quick(1), data), ValidationError);
  auto bad = quick(1);
  bad.learning_rate = 0;
  CHECK_THROWS_AS(train(model, data, bad, data), ValidationError);
}

TEST_CASE("non-finite loss aborts with diagnostics") {
  models::TrainedModel stub(std::make_unique<test::StubClassifier>(
                                models::Architecture::Cnn, 0, std::numeric_limits<double>::quiet_NaN()),
                            0);
  Dataset ds{"d", {{"a", "1", Label::Hate, "d"}, {"b", "0", Label::NoHate, "d"}}};
  CHECK_THROWS_WITH_AS(train(stub, ds, quick(2), ds), doctest::Contains("non-finite loss at epoch 1"),
                       RuntimeFailure);
}

TEST_CASE("history and best epoch") {
  test::TempDir dir("train-hist");
  const auto emb = test::write_embedding_fixture(dir.path());
  const auto data = test::toy_set(synth::Language::English, 6);
  const auto dev = test::toy_set(synth::Language::German, 7);
  TrainOptions opts;
  opts.dev_embeddings = emb.de_table;
  const auto out = train(models::build_cnn({}, emb.en_table, 3), data, quick(4), dev, opts);
  REQUIRE(out.history().size() == 1);
  const auto& h = out.history()[0];
  CHECK(h.stage == "train");
  CHECK(h.epochs.size() == 4);
  REQUIRE(h.best_epoch.has_value());
  REQUIRE(h.dev_macro_f1.has_value());
  for (const auto& e : h.epochs) CHECK(*e.dev_macro_f1 <= *h.dev_macro_f1);
  CHECK(*h.epochs[static_cast<std::size_t>(*h.best_epoch - 1)].dev_macro_f1 == *h.dev_macro_f1);
  // The returned model is the best-epoch state, still bound to the English table.
  CHECK(out.embeddings() == emb.en_table);
  auto probe = out;
  probe.bind_embeddings(emb.de_table);
  CHECK(evaluate(probe, dev).macro.f1 == doctest::Approx(*h.dev_macro_f1).epsilon(1e-12));

  const auto tuned = fine_tune(out, data, quick(1));
  REQUIRE(tuned.history().size() == 2);
  CHECK(tuned.history()[1].stage == "fine_tune");
}

TEST_CASE("training is seed-deterministic") {
  test::TempDir dir("train-det");
  const auto emb = test::write_embedding_fixture(dir.path());
  const auto data = test::toy_set(synth::Language::English, 6);
  auto hp = quick(3);
  hp.dropout = 0.5;
  const auto model = models::build_bilstm_cnn(small_lstm(), emb.en_table, 4);
  const auto a = train(model, data, hp, data);
  const auto b = train(model, data, hp, data);
  const auto pa = predict(a, data);
  const auto pb = predict(b, data);
  for (std::size_t i = 0; i < data.size(); ++i) CHECK(pa[i].probs == pb[i].probs);
}

TEST_CASE("frozen embeddings stay bit-identical") {
  test::TempDir dir("train-frozen");
  const auto emb = test::write_embedding_fixture(dir.path());
  const auto snapshot = emb.en_table->matrix();
  const auto data = test::toy_set(synth::Language::English, 6);
  const auto cnn = train(models::build_cnn({}, emb.en_table, 1), data, quick(3), data);
  const auto lstm = train(models::build_bilstm_cnn(small_lstm(), emb.en_table, 1), data, quick(3), data);
  const auto reread = load_embeddings(emb.en);
  for (const auto* m : {&cnn, &lstm}) {
    REQUIRE(m->embeddings());
    CHECK(m->embeddings()->matrix() == snapshot);
    CHECK(m->embeddings()->matrix() == reread.matrix());
  }
}

TEST_CASE("class weights steer the decision") {
  test::TempDir dir("train-weights");
  const auto emb = test::write_embedding_fixture(dir.path());
  const auto data = test::toy_set(synth::Language::English, 9);
  const auto model = models::build_cnn({}, emb.en_table, 6);

  auto hate_only = quick(5);
  hate_only.weight_no_hate = 0.0;
  hate_only.weight_hate = 1.0;
  const auto h = fine_tune(model, data, hate_only);
  const auto ph = predict(h, data);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].label == Label::Hate) CHECK(ph[i].label == Label::Hate);
  }

  auto no_hate_only = quick(5);
  no_hate_only.weight_no_hate = 1.0;
  no_hate_only.weight_hate = 0.0;
  const auto n = fine_tune(model, data, no_hate_only);
  const auto pn = predict(n, data);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].label == Label::NoHate) CHECK(pn[i].label == Label::NoHate);
  }
}

TEST_CASE("transformer ignores class weights") {
  test::TempDir dir("train-bert");
  models::TransformerConfig cfg;
  cfg.model_identifier = test::write_tiny_bert(dir.path()).string();
  cfg.max_subword_len = 32;
  const auto model = models::build_transformer_classifier(cfg, 1);
  const auto data = test::toy_set(synth::Language::German, 2, 4);
  auto a = quick(1, 1e-3);
  auto b = a;
  b.weight_no_hate = 0.01;
  b.weight_hate = 0.99;
  const auto ma = fine_tune(model, data, a);
  const auto mb = fine_tune(model, data, b);
  const auto pa = predict(ma, data);
  const auto pb = predict(mb, data);
  for (std::size_t i = 0; i < data.size(); ++i) CHECK(pa[i].probs == pb[i].probs);
}
