#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "spx/grid.hpp"

namespace spx::io {

enum class PgmDepth { Bits8, Bits16 };

// Binary P5. Values are clamped to [0, 1] and stored as lround(v * maxval);
// 16-bit samples are big-endian.
std::vector<std::uint8_t> encode_pgm(const Image& image, PgmDepth depth);
// Returns sample / maxval.
Image decode_pgm(const std::vector<std::uint8_t>& bytes);

void write_pgm(const std::filesystem::path& path, const Image& image, PgmDepth depth);
Image read_pgm(const std::filesystem::path& path);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace spx::io
