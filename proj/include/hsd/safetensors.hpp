#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace hsd {

// Row-major tensor as stored in a safetensors file, widened to double.
struct Tensor {
  std::vector<std::int64_t> shape;
  std::vector<double> data;

  std::int64_t numel() const;
};

using TensorMap = std::map<std::string, Tensor>;

// Reads F64, F32, F16 and BF16 tensors.
TensorMap read_safetensors(const std::filesystem::path& path,
                           std::map<std::string, std::string>* metadata = nullptr);

enum class StoreType { F32, F64 };

void write_safetensors(const std::filesystem::path& path, const TensorMap& tensors,
                       StoreType type = StoreType::F64,
                       const std::map<std::string, std::string>& metadata = {});

}  // namespace hsd
