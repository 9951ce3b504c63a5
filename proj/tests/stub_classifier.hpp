#pragma once

#include <string>

#include "hsd/errors.hpp"
#include "hsd/models.hpp"

namespace hsd::test {

// Votes from the text: character `slot` is '1' for Hate, '0' for noHate,
// and 'x' makes encoding fail. One trainable bias keeps fine_tune happy.
class StubClassifier final : public models::Classifier {
 public:
  StubClassifier(models::Architecture arch, std::size_t slot, double loss = 0.0)
      : arch_(arch), slot_(slot), loss_(loss), bias_("stub.bias", 2, 1) {}
  models::Architecture architecture() const override { return arch_; }
  models::ModelInput encode(std::string_view text) const override {
    if (slot_ >= text.size() || text[slot_] == 'x') throw ValidationError("stub cannot read input");
    return {{text[slot_] == '1' ? 1 : 0}, 1};
  }
  models::Probabilities forward(const models::ModelInput& input) const override {
    return input.ids[0] == 1 ? models::Probabilities{0.1, 0.9} : models::Probabilities{0.9, 0.1};
  }
  double accumulate_gradient(const models::ModelInput&, Label, double, Rng*) override { return loss_; }
  nn::ParameterList parameters() override { return {&bias_}; }
  std::unique_ptr<models::Classifier> clone() const override { return std::make_unique<StubClassifier>(*this); }
  double dropout() const override { return 0.0; }
  void set_dropout(double) override {}
  nlohmann::json config_json() const override { return {{"slot", slot_}}; }

 private:
  models::Architecture arch_;
  std::size_t slot_;
  double loss_;
  nn::Parameter bias_;
};

}  // namespace hsd::test
