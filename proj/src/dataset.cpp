#include "hsd/dataset.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "hsd/errors.hpp"

namespace hsd {

std::string_view to_string(Label label) {
  return label == Label::Hate ? "Hate" : "noHate";
}

std::optional<Label> parse_label(std::string_view text) {
  if (text == "noHate") return Label::NoHate;
  if (text == "Hate") return Label::Hate;
  return std::nullopt;
}

std::size_t Dataset::labeled_count() const {
  std::size_t n = 0;
  for (const auto& ex : examples) n += ex.label.has_value() ? 1 : 0;
  return n;
}

std::vector<Label> Dataset::labels() const {
  std::vector<Label> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    if (!ex.label) {
      throw ValidationError("dataset '" + name + "': example '" + ex.id +
                            "' is unlabeled");
    }
    out.push_back(*ex.label);
  }
  return out;
}

std::vector<std::string> Dataset::ids() const {
  std::vector<std::string> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) out.push_back(ex.id);
  return out;
}

ClassCounts class_counts(const Dataset& dataset) {
  ClassCounts counts;
  for (const auto& ex : dataset.examples) {
    if (!ex.label) {
      throw ValidationError("class_counts: example '" + ex.id + "' in '" +
                            dataset.name + "' is unlabeled");
    }
    if (*ex.label == Label::Hate) {
      ++counts.hate;
    } else {
      ++counts.no_hate;
    }
  }
  return counts;
}

void require_unique_ids(const Dataset& dataset) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(dataset.size());
  for (const auto& ex : dataset.examples) {
    if (!seen.insert(ex.id).second) {
      throw ValidationError("dataset '" + dataset.name +
                            "': duplicate id '" + ex.id + "'");
    }
  }
}

std::string escape_field(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (char c : field) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string unescape_field(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (field[i] != '\\' || i + 1 == field.size()) {
      out.push_back(field[i]);
      continue;
    }
    switch (field[++i]) {
      case '\\': out.push_back('\\'); break;
      case 't': out.push_back('\t'); break;
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      default:
        out.push_back('\\');
        out.push_back(field[i]);
    }
  }
  return out;
}

std::string format_tsv(const Dataset& dataset) {
  std::string out;
  for (const auto& ex : dataset.examples) {
    out += escape_field(ex.id);
    out.push_back('\t');
    if (ex.label) out += to_string(*ex.label);
    out.push_back('\t');
    out += escape_field(ex.text);
    out.push_back('\n');
  }
  return out;
}

Dataset parse_tsv(std::string_view content, std::string name,
                  std::string_view origin) {
  Dataset dataset;
  dataset.name = std::move(name);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string_view::npos) eol = content.size();
    std::string_view line = content.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const std::size_t t1 = line.find('\t');
    const std::size_t t2 =
        t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos) {
      throw ValidationError(std::string(origin) + ":" +
                            std::to_string(line_no) +
                            ": expected id<TAB>label<TAB>text");
    }
    Example ex;
    ex.id = unescape_field(line.substr(0, t1));
    const std::string_view label = line.substr(t1 + 1, t2 - t1 - 1);
    if (!label.empty()) {
      ex.label = parse_label(label);
      if (!ex.label) {
        throw ValidationError(std::string(origin) + ":" +
                              std::to_string(line_no) + ": unknown label '" +
                              std::string(label) + "'");
      }
    }
    ex.text = unescape_field(line.substr(t2 + 1));
    ex.source = dataset.name;
    dataset.examples.push_back(std::move(ex));
  }
  return dataset;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeFailure("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw RuntimeFailure("write failed for " + path.string());
}

Dataset read_tsv(const std::filesystem::path& path) {
  return read_tsv(path, path.stem().string());
}

Dataset read_tsv(const std::filesystem::path& path, std::string name) {
  return parse_tsv(read_file(path), std::move(name), path.string());
}

void write_tsv(const std::filesystem::path& path, const Dataset& dataset) {
  write_file(path, format_tsv(dataset));
}

}  // namespace hsd
