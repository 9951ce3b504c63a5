#include <doctest.h>

#include "hsd/bootstrap.hpp"
#include "hsd/errors.hpp"
#include "hsd/hashing.hpp"
#include "hsd/training.hpp"
#include "stub_classifier.hpp"
#include "support.hpp"

using namespace hsd;
namespace fs = std::filesystem;
using namespace hsd::bootstrap;
using models::Architecture;

namespace {

constexpr std::array<Architecture, 3> kArchs{Architecture::Cnn, Architecture::BiLstmCnn,
                                             Architecture::Transformer};

Ensemble stub_ensemble() {
  Ensemble e;
  for (std::size_t m = 0; m < kMembers; ++m) {
    e.members[m] = models::TrainedModel(std::make_unique<test::StubClassifier>(kArchs[m], m), m);
  }
  return e;
}

// One example per vote pattern; text encodes the three votes.
Dataset pattern_set() {
  Dataset ds{"patterns", {}};
  for (int mask = 0; mask < 8; ++mask) {
    std::string text;
    for (int m = 0; m < 3; ++m) text += (mask >> m) & 1 ? '1' : '0';
    ds.examples.push_back({"p" + std::to_string(mask), text, Label::NoHate, "patterns"});
  }
  return ds;
}

HyperparamMap stub_hyperparams() {
  HyperparamMap hp;
  for (auto a : kArchs) {
    hp[a].epochs = 1;
    hp[a].dropout = 0.0;
  }
  return hp;
}

}  // namespace

TEST_CASE("majority over all eight vote patterns") {
  for (int mask = 0; mask < 8; ++mask) {
    Votes v{};
    int hate = 0;
    for (std::size_t m = 0; m < kMembers; ++m) {
      v[m] = (mask >> m) & 1 ? Label::Hate : Label::NoHate;
      hate += (mask >> m) & 1;
    }
    CHECK(2 * hate != static_cast<int>(kMembers));
    CHECK(majority(v) == (hate >= 2 ? Label::Hate : Label::NoHate));
  }
  CHECK(majority({Label::Hate, Label::Hate, Label::NoHate}) == Label::Hate);
  CHECK(majority({Label::NoHate, Label::NoHate, Label::NoHate}) == Label::NoHate);
}

TEST_CASE("ensemble_label over vote patterns") {
  auto ds = pattern_set();
  ds.examples[5].label = Label::Hate;
  const auto boot = ensemble_label(stub_ensemble(), ds);
  REQUIRE(boot.data.size() == 8);
  CHECK(boot.dropped.empty());
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(boot.data[i].text == ds[i].text);
    CHECK(boot.votes[i].id == ds[i].id);
    CHECK(boot.votes[i].label == majority(boot.votes[i].votes));
    CHECK(boot.data[i].label == boot.votes[i].label);
  }
  CHECK(class_counts(boot.data) == ClassCounts{4, 4});
  CHECK(boot.shadow_gold[5] == Label::Hate);
  CHECK(boot.has_gold());
  CHECK(boot.provenance.at("Hate") == 4);
}

TEST_CASE("members that cannot read an example drop it") {
  Dataset ds{"d", {{"a", "111", std::nullopt, "d"}, {"b", "1x1", std::nullopt, "d"}, {"c", "0", std::nullopt, "d"}}};
  const auto boot = ensemble_label(stub_ensemble(), ds);
  CHECK(boot.data.size() == 1);
  REQUIRE(boot.dropped.size() == 2);
  CHECK(boot.dropped[0].id == "b");
  CHECK(boot.dropped[0].reason.find("member 1") != std::string::npos);
  CHECK(boot.data.size() + boot.dropped.size() == ds.size());
  CHECK_FALSE(boot.has_gold());
}

TEST_CASE("identical members reproduce predict") {
  test::TempDir dir("boot-same");
  const auto emb = test::write_embedding_fixture(dir.path());
  const auto model = models::build_cnn({}, emb.de_table, 5);
  Ensemble e{{model, model, model}};
  const auto data = test::toy_set(synth::Language::German, 8);
  const auto boot = ensemble_label(e, data);
  const auto pred = training::predict(model, data);
  for (std::size_t i = 0; i < data.size(); ++i) CHECK(boot.data[i].label == pred[i].label);
}

TEST_CASE("audit against gold") {
  auto ds = pattern_set();
  for (std::size_t i = 0; i < ds.size(); ++i) ds.examples[i].label = i % 2 ? Label::Hate : Label::NoHate;
  const auto boot = ensemble_label(stub_ensemble(), ds);
  const auto m = audit_against_gold(boot, ds);
  CHECK(m.total() == 8);
  // Gold = vote of member 0, ensemble = majority.
  CHECK(m.at(Label::NoHate, Label::NoHate) == 3);
  CHECK(m.at(Label::NoHate, Label::Hate) == 1);
  CHECK(m.at(Label::Hate, Label::NoHate) == 1);
  CHECK(m.at(Label::Hate, Label::Hate) == 3);

  const auto self = audit_against_gold(boot, boot.data);
  CHECK(self.at(Label::NoHate, Label::Hate) == 0);
  CHECK(self.at(Label::Hate, Label::NoHate) == 0);

  Dataset partial{"g", {ds.examples.begin(), ds.examples.begin() + 6}};
  CHECK_THROWS_WITH_AS(audit_against_gold(boot, partial), doctest::Contains("p6, p7"), ValidationError);
}

TEST_CASE("votes sidecar round trip") {
  test::TempDir dir("boot-votes");
  const auto boot = ensemble_label(stub_ensemble(), pattern_set());
  write_bootstrapped(dir / "DE-REL.tsv", boot);
  const auto back = parse_votes(read_file(dir / "DE-REL.votes.tsv"));
  REQUIRE(back.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(back[i].id == boot.votes[i].id);
    CHECK(back[i].votes == boot.votes[i].votes);
    CHECK(back[i].label == majority(back[i].votes));
  }
  CHECK(read_file(dir / "DE-REL.votes.tsv").starts_with("p0\tnoHate\tnoHate\tnoHate\tnoHate\n"));
  CHECK(format_tsv(read_tsv(dir / "DE-REL.tsv")) == format_tsv(boot.data));
  CHECK_THROWS_AS(parse_votes("a\tHate\tHate\n"), ValidationError);
}

TEST_CASE("bootstrap_round") {
  const auto e = stub_ensemble();
  SUBCASE("empty unlabeled set returns the members unchanged") {
    const auto out = bootstrap_round(e, Dataset{"empty", {}}, stub_hyperparams());
    for (std::size_t m = 0; m < kMembers; ++m) CHECK(out.members[m].history().empty());
  }
  SUBCASE("missing hyperparameters") {
    auto hp = stub_hyperparams();
    hp.erase(Architecture::Transformer);
    CHECK_THROWS_AS(bootstrap_round(e, pattern_set(), hp), ValidationError);
  }
  SUBCASE("members fine-tune on the ensemble labels, original untouched") {
    BootstrappedDataset first;
    const auto out = bootstrap_round(e, pattern_set(), stub_hyperparams(), 1, nullptr, &first);
    CHECK(first.data.size() == 8);
    for (std::size_t m = 0; m < kMembers; ++m) {
      REQUIRE(out.members[m].history().size() == 1);
      CHECK(out.members[m].history()[0].stage == "fine_tune");
      CHECK(out.members[m].history()[0].dataset == "patterns-ENS");
      CHECK(e.members[m].history().empty());
    }
  }
}

TEST_CASE("bootstrap_round is deterministic on real members") {
  test::TempDir dir("boot-real");
  const auto emb = test::write_embedding_fixture(dir.path());
  const auto bert = test::write_tiny_bert(dir.path());
  models::BiLstmConfig lstm;
  lstm.recurrent_units = 8;
  lstm.conv_feature_maps = 8;
  lstm.dense_units = 8;
  models::TransformerConfig tcfg;
  tcfg.model_identifier = bert.string();
  tcfg.max_subword_len = 32;
  Ensemble e{{models::build_cnn({}, emb.de_table, 1), models::build_bilstm_cnn(lstm, emb.de_table, 2),
              models::build_transformer_classifier(tcfg, 3)}};
  auto unlabeled = test::toy_set(synth::Language::German, 12, 6);
  for (auto& ex : unlabeled.examples) ex.label.reset();
  HyperparamMap hp;
  for (auto a : kArchs) {
    hp[a].epochs = 2;
    hp[a].batch_size = 4;
    hp[a].learning_rate = 1e-3;
    hp[a].seed = 77;
  }
  const auto a = bootstrap_round(e, unlabeled, hp);
  const auto b = bootstrap_round(e, unlabeled, hp);
  for (std::size_t m = 0; m < kMembers; ++m) {
    save_model(a.members[m], dir / ("a" + std::to_string(m)));
    save_model(b.members[m], dir / ("b" + std::to_string(m)));
    const std::string file = m == 2 ? "encoder/model.safetensors" : "parameters.safetensors";
    CHECK(sha256_file(dir / ("a" + std::to_string(m)) / file) ==
          sha256_file(dir / ("b" + std::to_string(m)) / file));
    CHECK(read_file(dir / ("a" + std::to_string(m)) / "manifest.json") ==
          read_file(dir / ("b" + std::to_string(m)) / "manifest.json"));
  }
}
