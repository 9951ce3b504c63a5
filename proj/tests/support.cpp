#include "support.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <unistd.h>

namespace hsd::test {

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("hsd-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

GermevalFixture write_germeval_fixture(const fs::path& dir, std::uint64_t seed) {
  const auto& lex = synth::default_lexicon();
  GermevalFixture f{dir / "germeval2018.training.txt", dir / "germeval2018.test.txt"};
  // Train 3321/1022/595/71; the final 809 lines: 535 OTHER, 167 ABUSE,
  // 95 INSULT, 12 PROFANITY.
  synth::write_germeval_file(f.train, lex, {3321, 1022, 595, 71}, {535, 167, 95, 12}, seed);
  synth::write_germeval_file(f.test, lex, {2330, 773, 381, 48}, {}, seed + 1);
  return f;
}

fs::path write_stormfront_fixture(const fs::path& dir, std::uint64_t seed) {
  synth::write_stormfront_dump(dir / "stormfront", synth::default_lexicon(), {9488, 1196, 168, 92}, seed);
  return dir / "stormfront" / "annotations_metadata.csv";
}

EmbeddingFixture write_embedding_fixture(const fs::path& dir, int dimension, std::uint64_t seed) {
  EmbeddingFixture f{dir / "vectors.en.vec", dir / "vectors.de.vec", nullptr, nullptr};
  synth::write_aligned_embeddings(synth::default_lexicon(), f.en, f.de, dimension, seed);
  f.en_table = std::make_shared<EmbeddingTable>(load_embeddings(f.en));
  f.de_table = std::make_shared<EmbeddingTable>(load_embeddings(f.de));
  return f;
}

models::BertConfig tiny_bert_config() {
  models::BertConfig c;
  c.hidden_size = 32;
  c.num_hidden_layers = 2;
  c.num_attention_heads = 4;
  c.intermediate_size = 64;
  c.max_position_embeddings = 64;
  c.type_vocab_size = 2;
  c.layer_norm_eps = 1e-12;
  c.hidden_dropout_prob = 0.1;
  c.attention_probs_dropout_prob = 0.1;
  return c;
}

fs::path write_tiny_bert(const fs::path& dir, std::uint64_t seed) {
  const fs::path out = dir / "tiny-multilingual-bert";
  models::write_random_bert_checkpoint(out, tiny_bert_config(),
                                       synth::bert_vocabulary(synth::default_lexicon()), true, seed);
  return out;
}

World write_world(const fs::path& dir, std::uint64_t seed) {
  World w;
  w.root = dir;
  w.germeval = write_germeval_fixture(dir, seed);
  w.stormfront_csv = write_stormfront_fixture(dir, seed);
  const auto emb = write_embedding_fixture(dir, 24, seed + 4);
  w.en_vec = emb.en;
  w.de_vec = emb.de;
  w.bert = write_tiny_bert(dir, seed + 2);
  w.forum = dir / "forum.jsonl";
  synth::write_forum_dump(w.forum, synth::default_lexicon(), 300, 0.05, seed + 3);
  return w;
}

std::string World::config(const std::string& stage, const std::string& extra) const {
  std::string c = "stage = " + stage + "\nseed = 13\nout = out\n"
                  "architectures = cnn, bilstm, transformer\n\n"
                  "[data]\n"
                  "germeval_train = " + germeval.train.string() + "\n"
                  "germeval_test = " + germeval.test.string() + "\n"
                  "stormfront_csv = " + stormfront_csv.string() + "\n"
                  "forum_dump = " + forum.string() + "\n"
                  "train_limit = 300\n\n"
                  "[embeddings]\n"
                  "en = " + en_vec.string() + "\n"
                  "de = " + de_vec.string() + "\n\n"
                  "[cnn]\nfilters_per_size = 8\nepochs = 2\nlearning_rate = 0.001\n\n"
                  "[bilstm]\nrecurrent_units = 8\nconv_feature_maps = 8\ndense_units = 8\nepochs = 2\n\n"
                  "[transformer]\nmodel = " + bert.string() + "\nmax_subword_len = 32\nepochs = 1\nbatch_size = 16\nlearning_rate = 0.001\n\n"
                  "[transformer_finetune]\nepochs = 1\nbatch_size = 32\n";
  return c + extra;
}

fs::path World::write_config(const std::string& name, const std::string& stage,
                             const std::string& extra) const {
  const fs::path p = root / name;
  write_file(p, config(stage, extra));
  return p;
}

GradCheck gradient_check(models::Classifier& net, const std::vector<models::ModelInput>& inputs,
                         const std::vector<Label>& gold, const models::TrainingHyperparams& hp,
                         std::size_t random, std::size_t nonzero, std::uint64_t seed,
                         double step, double floor) {
  training::batch_gradient(net, inputs, gold, hp, nullptr);
  const auto params = net.parameters();

  struct Entry {
    nn::Parameter* p;
    Eigen::Index i;
  };
  std::vector<Entry> all;
  for (auto* p : params) {
    for (Eigen::Index i = 0; i < p->value.size(); ++i) all.push_back({p, i});
  }
  Rng rng(seed);
  std::vector<Entry> picked;
  for (std::size_t k = 0; k < random && !all.empty(); ++k) picked.push_back(all[rng.below(all.size())]);
  std::vector<Entry> live;
  for (const auto& e : all) {
    if (std::abs(e.p->grad(e.i)) > 1e-7) live.push_back(e);
  }
  for (std::size_t k = 0; k < nonzero && !live.empty(); ++k) picked.push_back(live[rng.below(live.size())]);

  GradCheck out;
  for (const auto& e : picked) {
    const double analytic = e.p->grad(e.i);
    const double saved = e.p->value(e.i);
    e.p->value(e.i) = saved + step;
    const double up = training::batch_loss(net, inputs, gold, hp);
    e.p->value(e.i) = saved - step;
    const double down = training::batch_loss(net, inputs, gold, hp);
    e.p->value(e.i) = saved;
    const double numeric = (up - down) / (2 * step);
    const double rel =
        std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
    ++out.checked;
    if (std::abs(analytic) > 1e-7) ++out.nontrivial;
    if (rel > out.max_rel_error) {
      out.max_rel_error = rel;
      out.worst = e.p->name + "[" + std::to_string(e.i) + "] analytic " + std::to_string(analytic) +
                  " numeric " + std::to_string(numeric);
    }
  }
  return out;
}

Dataset toy_set(synth::Language lang, std::uint64_t seed, std::size_t per_class) {
  return synth::toy_corpus(synth::default_lexicon(), lang, per_class, per_class, seed, "toy");
}

}  // namespace hsd::test
