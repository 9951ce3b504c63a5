#include "hsd/sampling.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "hsd/errors.hpp"
#include "hsd/rng.hpp"

namespace hsd::sampling {
namespace {

std::uint64_t parse_uint(std::string_view text, std::string_view what) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError("sampling spec: invalid " + std::string(what) + " '" +
                          std::string(text) + "'");
  }
  return value;
}

// floor(value * num / den): the adjusted class never overshoots the ratio.
std::size_t scaled_floor(std::size_t value, std::uint64_t num, std::uint64_t den) {
  return static_cast<std::size_t>(value * num / den);
}

}  // namespace

std::string_view to_string(Mode mode) {
  return mode == Mode::Oversample ? "oversample" : "undersample";
}

SamplingSpec parse_spec(std::string_view text) {
  SamplingSpec spec;
  bool have_ratio = false;
  bool have_mode = false;
  std::istringstream in{std::string(text)};
  std::string item;
  while (in >> item) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("sampling spec: expected key=value, got '" + item + "'");
    }
    const std::string_view key(item.data(), eq);
    const std::string_view value(item.data() + eq + 1, item.size() - eq - 1);
    if (key == "ratio") {
      const auto colon = value.find(':');
      if (colon == std::string_view::npos) {
        throw ValidationError("sampling spec: ratio must look like 7:1");
      }
      const auto a = parse_uint(value.substr(0, colon), "ratio");
      const auto b = parse_uint(value.substr(colon + 1), "ratio");
      if (a < 1 || b < 1 || a > 1000000 || b > 1000000) {
        throw ValidationError("sampling spec: ratio components must be in [1, 1e6]");
      }
      spec.ratio = {static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
      have_ratio = true;
    } else if (key == "mode") {
      if (value == "oversample" || value == "os" || value == "OS") {
        spec.mode = Mode::Oversample;
      } else if (value == "undersample" || value == "us" || value == "US") {
        spec.mode = Mode::Undersample;
      } else {
        throw ValidationError("sampling spec: unknown mode '" + std::string(value) + "'");
      }
      have_mode = true;
    } else if (key == "seed") {
      spec.seed = parse_uint(value, "seed");
    } else {
      throw ValidationError("sampling spec: unknown key '" + std::string(key) + "'");
    }
  }
  if (!have_ratio || !have_mode) {
    throw ValidationError("sampling spec: both ratio= and mode= are required");
  }
  return spec;
}

std::string format_spec(const SamplingSpec& spec) {
  return "ratio=" + std::to_string(spec.ratio.no_hate) + ":" +
         std::to_string(spec.ratio.hate) + " mode=" + std::string(to_string(spec.mode)) +
         " seed=" + std::to_string(spec.seed);
}

std::string sampled_name(std::string_view language, const SamplingSpec& spec) {
  return std::string(language) + (spec.mode == Mode::Oversample ? "-OS[" : "-US[") +
         std::to_string(spec.ratio.no_hate) + ":" + std::to_string(spec.ratio.hate) + "]";
}

ClassCounts target_counts(const ClassCounts& counts, const SamplingSpec& spec) {
  if (counts.no_hate == 0 || counts.hate == 0) {
    throw ValidationError("resample: dataset needs at least one example of each class");
  }
  if (spec.ratio.no_hate < 1 || spec.ratio.hate < 1) {
    throw ValidationError("resample: ratio components must be >= 1");
  }
  const std::uint64_t a = spec.ratio.no_hate;
  const std::uint64_t b = spec.ratio.hate;
  // Compare noHate/Hate against a/b without division.
  const auto lhs = static_cast<std::uint64_t>(counts.no_hate) * b;
  const auto rhs = static_cast<std::uint64_t>(counts.hate) * a;
  ClassCounts target = counts;
  if (lhs == rhs) return target;
  const bool hate_deficient = lhs > rhs;
  if (spec.mode == Mode::Oversample) {
    if (hate_deficient) {
      target.hate = scaled_floor(counts.no_hate, b, a);
    } else {
      target.no_hate = scaled_floor(counts.hate, a, b);
    }
  } else {
    if (hate_deficient) {
      target.no_hate = scaled_floor(counts.hate, a, b);
    } else {
      target.hate = scaled_floor(counts.no_hate, b, a);
    }
    if (target.no_hate < 1 || target.hate < 1) {
      throw ValidationError("resample: undersampling to " +
                            std::to_string(a) + ":" + std::to_string(b) +
                            " would leave a class empty");
    }
  }
  const bool grows = target.no_hate > counts.no_hate || target.hate > counts.hate;
  const bool shrinks = target.no_hate < counts.no_hate || target.hate < counts.hate;
  if ((spec.mode == Mode::Oversample && shrinks) ||
      (spec.mode == Mode::Undersample && grows)) {
    throw ValidationError("resample: target ratio needs both growth and shrinkage");
  }
  return target;
}

Dataset resample(const Dataset& dataset, const SamplingSpec& spec) {
  const ClassCounts counts = class_counts(dataset);
  const ClassCounts target = target_counts(counts, spec);

  std::vector<std::size_t> by_class[kNumClasses];
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    by_class[index_of(*dataset.examples[i].label)].push_back(i);
  }

  Rng rng(spec.seed);
  std::vector<bool> keep(dataset.size(), true);
  std::vector<std::size_t> duplicates;
  for (Label label : {Label::NoHate, Label::Hate}) {
    const auto& members = by_class[index_of(label)];
    const std::size_t have = counts.of(label);
    const std::size_t want = target.of(label);
    if (want > have) {
      for (std::size_t k = 0; k < want - have; ++k) {
        duplicates.push_back(members[rng.below(members.size())]);
      }
    } else if (want < have) {
      // Partial Fisher-Yates: the first (have - want) picks are removed.
      std::vector<std::size_t> pool = members;
      for (std::size_t k = 0; k < have - want; ++k) {
        const std::size_t j = k + rng.below(pool.size() - k);
        std::swap(pool[k], pool[j]);
        keep[pool[k]] = false;
      }
    }
  }

  Dataset out;
  out.name = dataset.name;
  out.examples.reserve(target.total());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (keep[i]) out.examples.push_back(dataset.examples[i]);
  }
  for (std::size_t i : duplicates) out.examples.push_back(dataset.examples[i]);
  rng.shuffle(std::span<Example>(out.examples));
  return out;
}

}  // namespace hsd::sampling
