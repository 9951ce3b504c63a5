#include "hsd/training.hpp"

#include <cmath>
#include <numeric>

#include "hsd/errors.hpp"

namespace hsd::training {
namespace {

using models::Classifier;
using models::ModelInput;
using models::TrainedModel;
using models::TrainingHyperparams;

double effective_weight(const Classifier& net, const TrainingHyperparams& hp, Label label) {
  return net.uses_class_weights() ? hp.weight(label) : 1.0;
}

TrainedModel run_stages(const TrainedModel& model, const Dataset& data,
                        const TrainingHyperparams& hp, const Dataset* dev,
                        const TrainOptions& options, const std::string& stage) {
  hp.validate();
  if (!model.valid()) throw ValidationError(stage + ": empty model");
  if (hp.epochs == 0) return model;
  if (data.empty()) throw ValidationError(stage + ": empty training set '" + data.name + "'");

  std::vector<ModelInput> inputs;
  std::vector<Label> gold;
  inputs.reserve(data.size());
  gold.reserve(data.size());
  for (const auto& ex : data) {
    if (!ex.label) throw ValidationError(stage + ": example " + ex.id + " is unlabeled");
    try {
      inputs.push_back(model.net().encode(ex.text));
    } catch (const ValidationError& e) {
      throw ValidationError(stage + ": cannot encode example " + ex.id + ": " + e.what());
    }
    gold.push_back(*ex.label);
  }

  TrainedModel current = model;
  Classifier& net = current.net();
  net.set_dropout(hp.dropout);
  const auto params = net.parameters();
  nn::Adam optimizer(hp.learning_rate);
  Rng order_rng(Rng::mix(hp.seed, 1));
  Rng dropout_rng(Rng::mix(hp.seed, 2));

  models::StageRecord record;
  record.stage = stage;
  record.dataset = data.name;
  record.examples = data.size();
  record.hyperparams = hp;

  std::unique_ptr<Classifier> best;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch = static_cast<std::size_t>(hp.batch_size);

  for (int epoch = 1; epoch <= hp.epochs; ++epoch) {
    order_rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    std::size_t batches = 0;
    std::vector<ModelInput> batch_inputs;
    std::vector<Label> batch_gold;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t stop = std::min(order.size(), start + batch);
      batch_inputs.clear();
      batch_gold.clear();
      for (std::size_t i = start; i < stop; ++i) {
        batch_inputs.push_back(inputs[order[i]]);
        batch_gold.push_back(gold[order[i]]);
      }
      const double loss = batch_gradient(net, batch_inputs, batch_gold, hp, &dropout_rng);
      if (!std::isfinite(loss)) {
        throw RuntimeFailure(stage + ": non-finite loss at epoch " + std::to_string(epoch) +
                             ", batch " + std::to_string(start / batch) + " (first example " +
                             data[order[start]].id + ", learning rate " +
                             std::to_string(hp.learning_rate) + ")");
      }
      optimizer.step(params);
      for (const auto* p : params) {
        if (!p->value.allFinite()) {
          throw RuntimeFailure(stage + ": parameter " + p->name + " became non-finite at epoch " +
                               std::to_string(epoch));
        }
      }
      loss_sum += loss;
      ++batches;
    }
    models::EpochRecord er{epoch, loss_sum / static_cast<double>(batches), std::nullopt};
    if (dev != nullptr) {
      if (options.dev_embeddings && current.embeddings()) {
        TrainedModel probe = current;
        probe.bind_embeddings(options.dev_embeddings);
        er.dev_macro_f1 = evaluate(probe, *dev).macro.f1;
      } else {
        er.dev_macro_f1 = evaluate(current, *dev).macro.f1;
      }
      if (!record.dev_macro_f1 || *er.dev_macro_f1 > *record.dev_macro_f1) {
        record.dev_macro_f1 = er.dev_macro_f1;
        record.best_epoch = epoch;
        best = net.clone();
      }
    }
    record.epochs.push_back(er);
  }

  if (dev == nullptr) record.best_epoch = hp.epochs;
  TrainedModel result(best ? std::move(best) : net.clone(), model.init_seed());
  for (const auto& s : model.history()) result.add_stage(s);
  result.add_stage(std::move(record));
  return result;
}

}  // namespace

Label argmax(const models::Probabilities& probs) {
  return probs[1] > probs[0] ? Label::Hate : Label::NoHate;
}

std::vector<Prediction> predict(const TrainedModel& model, const Dataset& data) {
  std::vector<Prediction> out;
  out.reserve(data.size());
  for (const auto& ex : data) {
    Prediction p;
    try {
      p.probs = model.net().forward(model.net().encode(ex.text));
      p.label = argmax(p.probs);
    } catch (const ValidationError& e) {
      p.error = e.what();
    }
    out.push_back(std::move(p));
  }
  return out;
}

evaluation::EvalReport evaluate(const TrainedModel& model, const Dataset& data) {
  const auto predictions = predict(model, data);
  std::vector<Label> gold, pred;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!data[i].label) throw ValidationError("evaluate: example " + data[i].id + " is unlabeled");
    if (!predictions[i].ok()) continue;
    gold.push_back(*data[i].label);
    pred.push_back(*predictions[i].label);
  }
  if (gold.empty()) throw ValidationError("evaluate: no example of '" + data.name + "' could be predicted");
  auto report = evaluation::metrics(evaluation::confusion(gold, pred));
  report.model = std::string(models::to_string(model.architecture()));
  report.dataset = data.name;
  return report;
}

double batch_gradient(Classifier& net, std::span<const ModelInput> inputs,
                      std::span<const Label> gold, const TrainingHyperparams& hp, Rng* rng) {
  double weight_sum = 0.0;
  for (Label g : gold) weight_sum += effective_weight(net, hp, g);
  for (auto* p : net.parameters()) p->zero_grad();
  if (weight_sum <= 0.0) return 0.0;
  double loss = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const double w = effective_weight(net, hp, gold[i]);
    if (w == 0.0) continue;
    loss += w * net.accumulate_gradient(inputs[i], gold[i], w / weight_sum, rng);
  }
  return loss / weight_sum;
}

double batch_loss(const Classifier& net, std::span<const ModelInput> inputs,
                  std::span<const Label> gold, const TrainingHyperparams& hp) {
  double weight_sum = 0.0, loss = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const double w = effective_weight(net, hp, gold[i]);
    if (w == 0.0) continue;
    const auto p = net.forward(inputs[i]);
    loss += -w * std::log(std::max(p[index_of(gold[i])], 1e-300));
    weight_sum += w;
  }
  return weight_sum > 0.0 ? loss / weight_sum : 0.0;
}

TrainedModel train(const TrainedModel& model, const Dataset& data,
                   const TrainingHyperparams& hp, const Dataset& dev,
                   const TrainOptions& options) {
  if (dev.empty()) throw ValidationError("train: dev set is empty");
  return run_stages(model, data, hp, &dev, options, "train");
}

TrainedModel fine_tune(const TrainedModel& model, const Dataset& data,
                       const TrainingHyperparams& hp, const Dataset* dev,
                       const TrainOptions& options) {
  if (dev != nullptr && dev->empty()) dev = nullptr;
  return run_stages(model, data, hp, dev, options, "fine_tune");
}

double training_accuracy(const TrainedModel& model, const Dataset& data) {
  return evaluate(model, data).accuracy / 100.0;
}

}  // namespace hsd::training
