#include "hsd/bootstrap.hpp"

#include <sstream>
#include <unordered_map>

#include "hsd/errors.hpp"
#include "hsd/training.hpp"

namespace hsd::bootstrap {

Label majority(const Votes& votes) {
  int hate = 0;
  for (Label v : votes) hate += v == Label::Hate ? 1 : 0;
  return 2 * hate > static_cast<int>(kMembers) ? Label::Hate : Label::NoHate;
}

bool BootstrappedDataset::has_gold() const {
  for (const auto& g : shadow_gold) {
    if (g) return true;
  }
  return false;
}

Dataset BootstrappedDataset::gold_dataset() const {
  Dataset out{data.name + "-gold", data.examples};
  for (std::size_t i = 0; i < out.examples.size(); ++i) out.examples[i].label = shadow_gold[i];
  return out;
}

BootstrappedDataset ensemble_label(const Ensemble& ensemble, const Dataset& unlabeled) {
  std::array<std::vector<training::Prediction>, kMembers> predictions;
  nlohmann::json members = nlohmann::json::array();
  for (std::size_t m = 0; m < kMembers; ++m) {
    const auto& member = ensemble.members[m];
    if (!member.valid()) throw ValidationError("ensemble member " + std::to_string(m) + " is empty");
    predictions[m] = training::predict(member, unlabeled);
    members.push_back({{"architecture", models::to_string(member.architecture())},
                       {"init_seed", member.init_seed()},
                       {"stages", member.history().size()}});
  }

  BootstrappedDataset out;
  out.data.name = unlabeled.name + "-ENS";
  for (std::size_t i = 0; i < unlabeled.size(); ++i) {
    const Example& ex = unlabeled[i];
    VoteRecord record{ex.id, {}, Label::NoHate};
    std::string failure;
    for (std::size_t m = 0; m < kMembers; ++m) {
      const auto& p = predictions[m][i];
      if (!p.ok()) {
        failure = "member " + std::to_string(m) + ": " + p.error;
        break;
      }
      record.votes[m] = *p.label;
    }
    if (!failure.empty()) {
      out.dropped.push_back({ex.id, failure});
      continue;
    }
    record.label = majority(record.votes);
    Example labeled = ex;
    labeled.label = record.label;
    out.data.examples.push_back(std::move(labeled));
    out.shadow_gold.push_back(ex.label);
    out.votes.push_back(std::move(record));
  }
  const ClassCounts counts = class_counts(out.data);
  out.provenance = {{"source", unlabeled.name},
                    {"members", members},
                    {"labeled", out.data.size()},
                    {"dropped", out.dropped.size()},
                    {"noHate", counts.no_hate},
                    {"Hate", counts.hate}};
  return out;
}

evaluation::ConfusionMatrix audit_against_gold(const BootstrappedDataset& boot,
                                               const Dataset& gold) {
  std::unordered_map<std::string, Label> by_id;
  for (const auto& ex : gold) {
    if (ex.label) by_id.emplace(ex.id, *ex.label);
  }
  std::vector<std::string> missing;
  std::vector<Label> g, p;
  for (const auto& ex : boot.data) {
    const auto it = by_id.find(ex.id);
    if (it == by_id.end()) {
      missing.push_back(ex.id);
      continue;
    }
    g.push_back(it->second);
    p.push_back(*ex.label);
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) list += (i ? ", " : "") + missing[i];
    if (missing.size() > 20) list += ", ... (" + std::to_string(missing.size()) + " total)";
    throw ValidationError("audit: ids without gold labels: " + list);
  }
  return evaluation::confusion(g, p);
}

Ensemble bootstrap_round(const Ensemble& ensemble, const Dataset& unlabeled,
                         const HyperparamMap& hyperparams, int rounds, const Dataset* dev,
                         BootstrappedDataset* first_labeling) {
  if (rounds < 1) throw ValidationError("bootstrap: rounds must be at least 1");
  for (const auto& member : ensemble.members) {
    if (!member.valid()) throw ValidationError("bootstrap: empty ensemble member");
    if (!hyperparams.contains(member.architecture())) {
      throw ValidationError(std::string("bootstrap: no fine-tuning hyperparameters for ") +
                            std::string(models::to_string(member.architecture())));
    }
  }
  Ensemble current = ensemble;
  if (unlabeled.empty()) return current;
  for (int round = 0; round < rounds; ++round) {
    BootstrappedDataset labeled = ensemble_label(current, unlabeled);
    if (round == 0 && first_labeling != nullptr) *first_labeling = labeled;
    if (labeled.data.empty()) break;
    Ensemble next;
    for (std::size_t m = 0; m < kMembers; ++m) {
      const auto& member = current.members[m];
      next.members[m] = training::fine_tune(member, labeled.data,
                                            hyperparams.at(member.architecture()), dev);
    }
    current = std::move(next);
  }
  return current;
}

std::string format_votes(const BootstrappedDataset& boot) {
  std::string out;
  for (const auto& r : boot.votes) {
    out += escape_field(r.id);
    for (Label v : r.votes) {
      out += '\t';
      out += to_string(v);
    }
    out += '\t';
    out += to_string(r.label);
    out += '\n';
  }
  return out;
}

std::vector<VoteRecord> parse_votes(std::string_view content) {
  std::vector<VoteRecord> out;
  std::size_t line_no = 0;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != kMembers + 2) {
      throw ValidationError("votes line " + std::to_string(line_no) + ": expected 5 fields");
    }
    VoteRecord r;
    r.id = unescape_field(fields[0]);
    for (std::size_t m = 0; m <= kMembers; ++m) {
      const auto label = parse_label(fields[m + 1]);
      if (!label) throw ValidationError("votes line " + std::to_string(line_no) + ": bad label");
      if (m < kMembers) r.votes[m] = *label; else r.label = *label;
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_bootstrapped(const std::filesystem::path& tsv, const BootstrappedDataset& boot) {
  write_tsv(tsv, boot.data);
  std::filesystem::path votes = tsv;
  votes.replace_extension(".votes.tsv");
  write_file(votes, format_votes(boot));
}

}  // namespace hsd::bootstrap
