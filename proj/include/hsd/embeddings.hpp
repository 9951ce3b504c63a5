#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hsd {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Word vectors for one language of an aligned cross-lingual space.
// Row 0 is PAD (zeros), row 1 is UNK (mean of the loaded vectors), and the
// vocabulary occupies rows 2.. in file order. Immutable once built.
class EmbeddingTable {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kReserved = 2;

  EmbeddingTable() = default;

  // `vectors` holds one row per token; PAD and UNK rows are added here.
  EmbeddingTable(std::vector<std::string> tokens, const RowMatrix& vectors,
                 std::vector<std::string> warnings = {});

  int dimension() const { return static_cast<int>(matrix_.cols()); }
  std::size_t vocab_size() const { return tokens_.size(); }
  std::size_t rows() const { return static_cast<std::size_t>(matrix_.rows()); }

  // UNK index for tokens not in the vocabulary.
  int index_of(std::string_view token) const;
  bool contains(std::string_view token) const;
  // Empty string for the reserved rows.
  const std::string& token_at(int index) const;

  const RowMatrix& matrix() const { return matrix_; }
  auto row(int index) const { return matrix_.row(index); }

  const std::vector<std::string>& warnings() const { return warnings_; }

  // Provenance, filled in by load_embeddings.
  std::string source_path;
  std::string source_sha256;

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int, Hash, std::equal_to<>> index_;
  RowMatrix matrix_;
  std::vector<std::string> warnings_;
};

// Text format: optional "count dim" header, then `token v1 ... vdim` per
// line. Keeps the first `max_vocab` distinct tokens in file order; a
// repeated token keeps its first vector and records a warning.
EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               std::optional<std::size_t> max_vocab = std::nullopt);

struct EncodedExample {
  std::vector<int> indices;  // length max_len, PAD-filled
  int true_length = 0;

  bool operator==(const EncodedExample&) const = default;
};

EncodedExample encode(std::span<const std::string> tokens,
                      const EmbeddingTable& table, int max_len);

// Inverse of encode for in-vocabulary positions; UNK decodes to "<unk>".
std::vector<std::string> decode(const EncodedExample& encoded,
                                const EmbeddingTable& table);

}  // namespace hsd
