#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "hsd/dataset.hpp"

namespace hsd::sampling {

enum class Mode { Oversample, Undersample };

// Target class ratio, stated noHate:Hate.
struct Ratio {
  std::uint32_t no_hate = 1;
  std::uint32_t hate = 1;

  bool operator==(const Ratio&) const = default;
};

struct SamplingSpec {
  Ratio ratio;
  Mode mode = Mode::Oversample;
  std::uint64_t seed = 0;

  bool operator==(const SamplingSpec&) const = default;
};

std::string_view to_string(Mode mode);

// Parses "ratio=7:1 mode=undersample seed=N"; `seed` is optional.
SamplingSpec parse_spec(std::string_view text);
std::string format_spec(const SamplingSpec& spec);

// "DE-OS[7:1]" / "EN-US[2:1]" style name for a sampled dataset.
std::string sampled_name(std::string_view language, const SamplingSpec& spec);

// Class counts the resampled dataset will have. One class is held fixed and
// the other is set to round(fixed * own_component / other_component).
ClassCounts target_counts(const ClassCounts& counts, const SamplingSpec& spec);

// Oversampling duplicates examples of the under-represented class (uniform,
// with replacement); undersampling removes examples of the over-represented
// class (uniform, without replacement). Survivors keep their order,
// duplicates are appended, and the result is shuffled with the spec's seed.
// Duplicates keep the id of the example they copy.
Dataset resample(const Dataset& dataset, const SamplingSpec& spec);

}  // namespace hsd::sampling
