#include "hsd/safetensors.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>

#include "hsd/errors.hpp"

namespace hsd {
namespace {

static_assert(std::endian::native == std::endian::little,
              "safetensors I/O assumes a little-endian host");

float half_to_float(std::uint16_t h) {
  const std::uint32_t sign = static_cast<std::uint32_t>(h & 0x8000) << 16;
  std::uint32_t exp = (h >> 10) & 0x1F;
  std::uint32_t mant = h & 0x3FF;
  std::uint32_t bits = 0;
  if (exp == 0) {
    if (mant == 0) {
      bits = sign;
    } else {
      exp = 127 - 15 + 1;
      while ((mant & 0x400) == 0) {
        mant <<= 1;
        --exp;
      }
      mant &= 0x3FF;
      bits = sign | (exp << 23) | (mant << 13);
    }
  } else if (exp == 31) {
    bits = sign | 0x7F800000 | (mant << 13);
  } else {
    bits = sign | ((exp + 127 - 15) << 23) | (mant << 13);
  }
  return std::bit_cast<float>(bits);
}

}  // namespace

std::int64_t Tensor::numel() const {
  std::int64_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

TensorMap read_safetensors(const std::filesystem::path& path,
                           std::map<std::string, std::string>* metadata) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::uint64_t header_len = 0;
  in.read(reinterpret_cast<char*>(&header_len), sizeof header_len);
  if (!in || header_len > (100u << 20)) {
    throw ValidationError(path.string() + ": not a safetensors file");
  }
  std::string header(header_len, '\0');
  in.read(header.data(), static_cast<std::streamsize>(header_len));
  const auto json = nlohmann::json::parse(header, nullptr, false);
  if (!in || json.is_discarded() || !json.is_object()) {
    throw ValidationError(path.string() + ": malformed safetensors header");
  }
  const std::streamoff data_start = static_cast<std::streamoff>(8 + header_len);

  TensorMap tensors;
  for (const auto& [name, info] : json.items()) {
    if (name == "__metadata__") {
      if (metadata != nullptr) {
        for (const auto& [k, v] : info.items()) {
          if (v.is_string()) (*metadata)[k] = v.get<std::string>();
        }
      }
      continue;
    }
    Tensor t;
    t.shape = info.at("shape").get<std::vector<std::int64_t>>();
    const auto offsets = info.at("data_offsets").get<std::vector<std::uint64_t>>();
    const std::string dtype = info.at("dtype").get<std::string>();
    const std::size_t count = static_cast<std::size_t>(t.numel());
    std::size_t width = 0;
    if (dtype == "F64") width = 8;
    else if (dtype == "F32") width = 4;
    else if (dtype == "F16" || dtype == "BF16") width = 2;
    else throw ValidationError(path.string() + ": unsupported dtype " + dtype + " for " + name);
    if (offsets.size() != 2 || offsets[1] - offsets[0] != count * width) {
      throw ValidationError(path.string() + ": inconsistent offsets for " + name);
    }
    std::vector<char> raw(count * width);
    in.seekg(data_start + static_cast<std::streamoff>(offsets[0]));
    in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (!in) throw ValidationError(path.string() + ": truncated data for " + name);
    t.data.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      const char* p = raw.data() + i * width;
      if (width == 8) {
        double v;
        std::memcpy(&v, p, 8);
        t.data[i] = v;
      } else if (width == 4) {
        float v;
        std::memcpy(&v, p, 4);
        t.data[i] = v;
      } else {
        std::uint16_t h;
        std::memcpy(&h, p, 2);
        t.data[i] = dtype == "F16"
                        ? static_cast<double>(half_to_float(h))
                        : static_cast<double>(std::bit_cast<float>(static_cast<std::uint32_t>(h) << 16));
      }
    }
    tensors.emplace(name, std::move(t));
  }
  return tensors;
}

void write_safetensors(const std::filesystem::path& path, const TensorMap& tensors,
                       StoreType type,
                       const std::map<std::string, std::string>& metadata) {
  const std::size_t width = type == StoreType::F64 ? 8 : 4;
  nlohmann::json header = nlohmann::json::object();
  if (!metadata.empty()) header["__metadata__"] = metadata;
  std::uint64_t offset = 0;
  for (const auto& [name, t] : tensors) {
    if (static_cast<std::size_t>(t.numel()) != t.data.size()) {
      throw RuntimeFailure("tensor " + name + ": shape does not match data");
    }
    const std::uint64_t bytes = t.data.size() * width;
    header[name] = {{"dtype", type == StoreType::F64 ? "F64" : "F32"},
                    {"shape", t.shape},
                    {"data_offsets", {offset, offset + bytes}}};
    offset += bytes;
  }
  std::string header_text = header.dump();
  while ((header_text.size() + 8) % 8 != 0) header_text.push_back(' ');

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeFailure("cannot write " + path.string());
  const std::uint64_t len = header_text.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
  for (const auto& [name, t] : tensors) {
    if (type == StoreType::F64) {
      out.write(reinterpret_cast<const char*>(t.data.data()),
                static_cast<std::streamsize>(t.data.size() * 8));
    } else {
      std::vector<float> narrow(t.data.begin(), t.data.end());
      out.write(reinterpret_cast<const char*>(narrow.data()),
                static_cast<std::streamsize>(narrow.size() * 4));
    }
  }
  if (!out) throw RuntimeFailure("write failed for " + path.string());
}

}  // namespace hsd
