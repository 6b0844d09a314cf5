#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spx/tensor.hpp"

namespace spx::nn {

// On-disk layout, all integers little-endian uint32:
//   "SPX1" | version | parameter count |
//   per parameter: name length | name bytes | rank | dims... | float32 values
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  Shape shape;
  std::vector<float> values;

  friend bool operator==(const NamedTensor&, const NamedTensor&) = default;
};

std::vector<std::uint8_t> encode_checkpoint(const std::vector<NamedTensor>& params);
std::vector<NamedTensor> decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const std::filesystem::path& path, const std::vector<NamedTensor>& params);
std::vector<NamedTensor> load_checkpoint(const std::filesystem::path& path);

}  // namespace spx::nn
