#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "hsd/dataset.hpp"

namespace hsd::evaluation {

// Gold rows x predicted columns, class order (noHate, Hate).
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, 2>, 2> cells{};

  std::uint64_t at(Label gold, Label pred) const { return cells[index_of(gold)][index_of(pred)]; }
  std::uint64_t& at(Label gold, Label pred) { return cells[index_of(gold)][index_of(pred)]; }
  std::uint64_t row_total(Label gold) const;
  std::uint64_t column_total(Label pred) const;
  std::uint64_t total() const;
  bool operator==(const ConfusionMatrix&) const = default;
};

// Throws ValidationError on a length mismatch or empty input.
ConfusionMatrix confusion(std::span<const Label> gold, std::span<const Label> pred);

// Percentages in [0, 100], full precision.
struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_undefined = false;  // empty predicted column
  bool recall_undefined = false;     // empty gold row
};

struct EvalReport {
  std::string model;
  std::string dataset;
  std::string stage;
  ConfusionMatrix matrix;
  double accuracy = 0.0;
  std::array<ClassMetrics, 2> per_class{};  // indexed by index_of(Label)
  ClassMetrics macro;
  // Free-form provenance (config hash, seed, ...), serialized verbatim.
  std::map<std::string, std::string> metadata;

  const ClassMetrics& of(Label label) const { return per_class[index_of(label)]; }
};

// Throws ValidationError when the matrix is empty.
EvalReport metrics(const ConfusionMatrix& matrix);

// Rounds half away from zero at `decimals` places. Presentation only.
double round_half_up(double value, int decimals = 2);
std::string format_fixed(double value, int decimals = 2);

// Metric values are written rounded to 2 decimals; the matrix is written
// exactly, so report_from_json recomputes full-precision values.
nlohmann::json to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

struct ComparisonRow {
  std::string model;
  std::string stage;
  std::string dataset;
  // accuracy, noHate P/R/F1, Hate P/R/F1, macro P/R/F1
  std::array<double, 10> values{};
  std::array<double, 10> deltas{};  // values minus the baseline row's values
};

struct Comparison {
  std::size_t baseline = 0;
  std::vector<ComparisonRow> rows;
};

inline constexpr std::array<const char*, 10> kComparisonColumns{
    "Acc",        "noHate P", "noHate R", "noHate F1", "Hate P",
    "Hate R",     "Hate F1",  "Macro P",  "Macro R",   "Macro F1"};

// Rows keep the input order; throws ValidationError when `reports` is empty
// or `baseline` is out of range.
Comparison compare(std::span<const EvalReport> reports, std::size_t baseline = 0);

std::string format_text(const Comparison& comparison);
std::string format_csv(const Comparison& comparison);

}  // namespace hsd::evaluation
