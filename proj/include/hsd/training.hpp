#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsd/dataset.hpp"
#include "hsd/evaluation.hpp"
#include "hsd/models.hpp"

namespace hsd::training {

struct Prediction {
  std::optional<Label> label;
  models::Probabilities probs{0.0, 0.0};
  std::string error;  // set when the example could not be encoded

  bool ok() const { return label.has_value(); }
};

// Argmax; an exact tie resolves to noHate.
Label argmax(const models::Probabilities& probs);

// Inference mode; one entry per input example, in order.
std::vector<Prediction> predict(const models::TrainedModel& model, const Dataset& data);

// Report over the examples that were predicted; throws ValidationError
// when `data` has unlabeled examples or nothing could be predicted.
evaluation::EvalReport evaluate(const models::TrainedModel& model, const Dataset& data);

// Class-weighted mean loss over a batch, normalised by the sum of the
// batch's weights. Gradients of that loss are added into the parameters'
// grad buffers (which are zeroed first). Dropout draws from `rng`; pass
// null for a deterministic pass. Returns 0 without touching gradients when
// every weight in the batch is zero.
double batch_gradient(models::Classifier& net, std::span<const models::ModelInput> inputs,
                      std::span<const Label> gold, const models::TrainingHyperparams& hp,
                      Rng* rng);

// Same loss without dropout or gradients.
double batch_loss(const models::Classifier& net, std::span<const models::ModelInput> inputs,
                  std::span<const Label> gold, const models::TrainingHyperparams& hp);

struct TrainOptions {
  // Embedding table bound while scoring the dev set, for dev data in a
  // different language of the same aligned space. Ignored by the
  // transformer.
  std::shared_ptr<const EmbeddingTable> dev_embeddings;
};

// Adam on the weighted loss with epoch-shuffled mini-batches seeded by
// hp.seed. Dev macro-F1 is recorded after every epoch and the parameters
// of the best dev epoch (earliest on ties) are returned. epochs = 0 returns
// the input unchanged. A non-finite loss throws RuntimeFailure.
models::TrainedModel train(const models::TrainedModel& model, const Dataset& data,
                           const models::TrainingHyperparams& hp, const Dataset& dev,
                           const TrainOptions& options = {});

// As train, starting from the given state and recorded as a fine-tuning
// stage. Without a dev set the final epoch's parameters are kept.
models::TrainedModel fine_tune(const models::TrainedModel& model, const Dataset& data,
                               const models::TrainingHyperparams& hp,
                               const Dataset* dev = nullptr,
                               const TrainOptions& options = {});

double training_accuracy(const models::TrainedModel& model, const Dataset& data);

}  // namespace hsd::training
