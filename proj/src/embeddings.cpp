#include "hsd/embeddings.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "hsd/errors.hpp"
#include "hsd/hashing.hpp"

namespace hsd {
namespace {

const std::string kEmpty;
const std::string kUnkToken = "<unk>";

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r'; }

// Splits on runs of spaces/tabs without allocating.
template <typename Fn>
void for_each_field(std::string_view line, Fn&& fn) {
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && is_blank(line[pos])) ++pos;
    if (pos == line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && !is_blank(line[end])) ++end;
    fn(line.substr(pos, end - pos));
    pos = end;
  }
}

bool parse_double(std::string_view field, double& out) {
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size() && std::isfinite(out);
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::vector<std::string> tokens,
                               const RowMatrix& vectors,
                               std::vector<std::string> warnings)
    : tokens_(std::move(tokens)), warnings_(std::move(warnings)) {
  if (static_cast<std::size_t>(vectors.rows()) != tokens_.size()) {
    throw ValidationError("embedding table: token/vector count mismatch");
  }
  if (vectors.cols() < 1) {
    throw ValidationError("embedding table: dimension must be positive");
  }
  if (!vectors.allFinite()) {
    throw ValidationError("embedding table: non-finite component");
  }
  matrix_.resize(static_cast<Eigen::Index>(tokens_.size() + kReserved), vectors.cols());
  matrix_.row(kPad).setZero();
  if (tokens_.empty()) {
    matrix_.row(kUnk).setZero();
  } else {
    matrix_.row(kUnk) = vectors.colwise().mean();
  }
  matrix_.bottomRows(vectors.rows()) = vectors;
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<int>(i) + kReserved).second) {
      throw ValidationError("embedding table: duplicate token '" + tokens_[i] + "'");
    }
  }
}

int EmbeddingTable::index_of(std::string_view token) const {
  const auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

bool EmbeddingTable::contains(std::string_view token) const {
  return index_.find(token) != index_.end();
}

const std::string& EmbeddingTable::token_at(int index) const {
  if (index < kReserved || static_cast<std::size_t>(index - kReserved) >= tokens_.size()) {
    return kEmpty;
  }
  return tokens_[static_cast<std::size_t>(index - kReserved)];
}

EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               std::optional<std::size_t> max_vocab) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open embeddings " + path.string());

  std::vector<std::string> tokens;
  std::vector<double> values;
  std::vector<std::string> warnings;
  std::unordered_map<std::string, std::size_t> seen;
  int dim = -1;
  std::size_t line_no = 0;
  std::string line;
  std::vector<std::string_view> fields;

  while (std::getline(in, line)) {
    ++line_no;
    if (max_vocab && tokens.size() >= *max_vocab) break;
    fields.clear();
    for_each_field(line, [&](std::string_view f) { fields.push_back(f); });
    if (fields.empty()) continue;

    if (line_no == 1 && fields.size() == 2) {
      std::size_t count = 0;
      int header_dim = 0;
      const auto r1 = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), count);
      const auto r2 = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), header_dim);
      if (r1.ec == std::errc() && r2.ec == std::errc() &&
          r1.ptr == fields[0].data() + fields[0].size() &&
          r2.ptr == fields[1].data() + fields[1].size() && header_dim > 0) {
        dim = header_dim;
        const std::size_t expected = max_vocab ? std::min(*max_vocab, count) : count;
        tokens.reserve(expected);
        values.reserve(expected * static_cast<std::size_t>(dim));
        continue;
      }
    }

    const int line_dim = static_cast<int>(fields.size()) - 1;
    if (dim < 0) {
      if (line_dim < 1) {
        throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                              ": token without vector");
      }
      dim = line_dim;
    }
    if (line_dim != dim) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": expected " + std::to_string(dim) + " values, found " +
                            std::to_string(line_dim));
    }
    std::string token(fields[0]);
    if (const auto it = seen.find(token); it != seen.end()) {
      warnings.push_back(path.string() + ":" + std::to_string(line_no) +
                         ": duplicate token '" + token + "' ignored (first at line " +
                         std::to_string(it->second) + ")");
      continue;
    }
    const std::size_t base = values.size();
    values.resize(base + static_cast<std::size_t>(dim));
    for (int k = 0; k < dim; ++k) {
      if (!parse_double(fields[static_cast<std::size_t>(k) + 1], values[base + static_cast<std::size_t>(k)])) {
        throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                              ": bad value '" + std::string(fields[static_cast<std::size_t>(k) + 1]) + "'");
      }
    }
    seen.emplace(token, line_no);
    tokens.push_back(std::move(token));
  }
  if (dim < 0) throw ValidationError(path.string() + ": no vectors found");

  const Eigen::Map<const RowMatrix> vectors(values.data(),
                                            static_cast<Eigen::Index>(tokens.size()), dim);
  EmbeddingTable table(std::move(tokens), vectors, std::move(warnings));
  table.source_path = std::filesystem::absolute(path).string();
  table.source_sha256 = sha256_file(path);
  return table;
}

EncodedExample encode(std::span<const std::string> tokens,
                      const EmbeddingTable& table, int max_len) {
  if (max_len < 1) throw ValidationError("encode: max_len must be >= 1");
  EncodedExample out;
  out.indices.assign(static_cast<std::size_t>(max_len), EmbeddingTable::kPad);
  out.true_length = static_cast<int>(std::min<std::size_t>(tokens.size(), static_cast<std::size_t>(max_len)));
  for (int i = 0; i < out.true_length; ++i) {
    out.indices[static_cast<std::size_t>(i)] = table.index_of(tokens[static_cast<std::size_t>(i)]);
  }
  return out;
}

std::vector<std::string> decode(const EncodedExample& encoded,
                                const EmbeddingTable& table) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(encoded.true_length));
  for (int i = 0; i < encoded.true_length; ++i) {
    const int idx = encoded.indices[static_cast<std::size_t>(i)];
    out.push_back(idx == EmbeddingTable::kUnk ? kUnkToken : table.token_at(idx));
  }
  return out;
}

}  // namespace hsd
