#include "hsd/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hsd/errors.hpp"

namespace hsd::evaluation {
namespace {

constexpr std::array<Label, 2> kLabels{Label::NoHate, Label::Hate};

double ratio(std::uint64_t num, std::uint64_t den, bool& undefined) {
  undefined = den == 0;
  return undefined ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

nlohmann::json class_json(const ClassMetrics& m) {
  nlohmann::json j{{"precision", round_half_up(m.precision)},
                   {"recall", round_half_up(m.recall)},
                   {"f1", round_half_up(m.f1)}};
  if (m.precision_undefined) j["precision_undefined"] = true;
  if (m.recall_undefined) j["recall_undefined"] = true;
  return j;
}

std::string pad(const std::string& s, std::size_t width, bool left) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return left ? s + fill : fill + s;
}

std::string signed_fixed(double v) {
  const double r = round_half_up(v);
  const std::string body = format_fixed(std::fabs(r));
  if (r > 0.0) return "+" + body;
  if (r < 0.0) return "-" + body;
  return "+0.00";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::uint64_t ConfusionMatrix::row_total(Label gold) const {
  const auto& row = cells[index_of(gold)];
  return row[0] + row[1];
}

std::uint64_t ConfusionMatrix::column_total(Label pred) const {
  return cells[0][index_of(pred)] + cells[1][index_of(pred)];
}

std::uint64_t ConfusionMatrix::total() const {
  return cells[0][0] + cells[0][1] + cells[1][0] + cells[1][1];
}

ConfusionMatrix confusion(std::span<const Label> gold, std::span<const Label> pred) {
  if (gold.size() != pred.size()) {
    throw ValidationError("confusion: " + std::to_string(gold.size()) + " gold labels vs " +
                          std::to_string(pred.size()) + " predictions");
  }
  if (gold.empty()) throw ValidationError("confusion: no examples");
  ConfusionMatrix m;
  for (std::size_t i = 0; i < gold.size(); ++i) ++m.at(gold[i], pred[i]);
  return m;
}

EvalReport metrics(const ConfusionMatrix& matrix) {
  const std::uint64_t total = matrix.total();
  if (total == 0) throw ValidationError("metrics: empty confusion matrix");
  EvalReport report;
  report.matrix = matrix;
  bool unused = false;
  report.accuracy = ratio(matrix.at(Label::NoHate, Label::NoHate) + matrix.at(Label::Hate, Label::Hate),
                          total, unused);
  for (Label c : kLabels) {
    ClassMetrics& m = report.per_class[index_of(c)];
    m.precision = ratio(matrix.at(c, c), matrix.column_total(c), m.precision_undefined);
    m.recall = ratio(matrix.at(c, c), matrix.row_total(c), m.recall_undefined);
    m.f1 = harmonic(m.precision, m.recall);
  }
  const auto& a = report.per_class[0];
  const auto& b = report.per_class[1];
  report.macro.precision = (a.precision + b.precision) / 2.0;
  report.macro.recall = (a.recall + b.recall) / 2.0;
  report.macro.f1 = (a.f1 + b.f1) / 2.0;
  return report;
}

double round_half_up(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  // The nudge absorbs binary representation error such as 0.125 -> 0.12499...
  const double scaled = std::fabs(value) * scale;
  const double rounded = std::floor(scaled + 0.5 + 1e-9 * std::max(1.0, scaled)) / scale;
  return std::copysign(rounded, value) + 0.0;
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, round_half_up(value, decimals));
  std::string s = buf;
  if (s.starts_with('-') && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json matrix = nlohmann::json::array();
  for (const auto& row : r.matrix.cells) matrix.push_back({row[0], row[1]});
  nlohmann::json macro{{"precision", round_half_up(r.macro.precision)},
                       {"recall", round_half_up(r.macro.recall)},
                       {"f1", round_half_up(r.macro.f1)}};
  return {{"model", r.model},
          {"dataset", r.dataset},
          {"stage", r.stage},
          {"metadata", r.metadata},
          {"examples", r.matrix.total()},
          {"confusion_matrix", {{"rows", "gold"}, {"columns", "predicted"},
                                {"labels", {"noHate", "Hate"}}, {"counts", matrix}}},
          {"accuracy", round_half_up(r.accuracy)},
          {"noHate", class_json(r.of(Label::NoHate))},
          {"Hate", class_json(r.of(Label::Hate))},
          {"macro", macro}};
}

EvalReport report_from_json(const nlohmann::json& j) {
  try {
    ConfusionMatrix m;
    const auto& counts = j.at("confusion_matrix").at("counts");
    for (std::size_t g = 0; g < 2; ++g) {
      for (std::size_t p = 0; p < 2; ++p) m.cells[g][p] = counts.at(g).at(p).get<std::uint64_t>();
    }
    EvalReport r = metrics(m);
    r.model = j.value("model", "");
    r.dataset = j.value("dataset", "");
    r.stage = j.value("stage", "");
    if (j.contains("metadata")) r.metadata = j["metadata"].get<std::map<std::string, std::string>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed evaluation report: ") + e.what());
  }
}

Comparison compare(std::span<const EvalReport> reports, std::size_t baseline) {
  if (reports.empty()) throw ValidationError("compare: no reports");
  if (baseline >= reports.size()) throw ValidationError("compare: baseline index out of range");
  Comparison out;
  out.baseline = baseline;
  for (const auto& r : reports) {
    ComparisonRow row{r.model, r.stage, r.dataset, {}, {}};
    const auto& n = r.of(Label::NoHate);
    const auto& h = r.of(Label::Hate);
    row.values = {r.accuracy, n.precision, n.recall, n.f1, h.precision,
                  h.recall,   h.f1,        r.macro.precision, r.macro.recall, r.macro.f1};
    out.rows.push_back(std::move(row));
  }
  const auto base = out.rows[baseline].values;
  for (auto& row : out.rows) {
    // Deltas are taken between the presented (rounded) values so a table
    // reader can re-derive them from the printed columns.
    for (std::size_t i = 0; i < row.values.size(); ++i) {
      row.deltas[i] = round_half_up(round_half_up(row.values[i]) - round_half_up(base[i]));
    }
  }
  return out;
}

std::string format_text(const Comparison& c) {
  std::size_t model_w = 5, stage_w = 5, data_w = 7;
  for (const auto& row : c.rows) {
    model_w = std::max(model_w, row.model.size());
    stage_w = std::max(stage_w, row.stage.size());
    data_w = std::max(data_w, row.dataset.size());
  }
  std::string out = pad("Model", model_w, true) + "  " + pad("Stage", stage_w, true) + "  " +
                    pad("Dataset", data_w, true);
  for (const char* col : kComparisonColumns) out += "  " + pad(col, 9, false);
  out += "  " + pad("dMacroF1", 9, false) + "\n";
  for (std::size_t i = 0; i < c.rows.size(); ++i) {
    const auto& row = c.rows[i];
    out += pad(row.model, model_w, true) + "  " + pad(row.stage, stage_w, true) + "  " +
           pad(row.dataset, data_w, true);
    for (double v : row.values) out += "  " + pad(format_fixed(v), 9, false);
    out += "  " + pad(i == c.baseline ? "base" : signed_fixed(row.deltas[9]), 9, false) + "\n";
  }
  return out;
}

std::string format_csv(const Comparison& c) {
  std::string out = "model,stage,dataset";
  for (const char* col : kComparisonColumns) out += std::string(",") + col;
  for (const char* col : kComparisonColumns) out += std::string(",delta ") + col;
  out += "\n";
  for (const auto& row : c.rows) {
    out += csv_field(row.model) + "," + csv_field(row.stage) + "," + csv_field(row.dataset);
    for (double v : row.values) out += "," + format_fixed(v);
    for (double d : row.deltas) out += "," + signed_fixed(d);
    out += "\n";
  }
  return out;
}

}  // namespace hsd::evaluation
