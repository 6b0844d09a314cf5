#include "spx/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "spx/error.hpp"

namespace spx::io {

std::vector<std::uint8_t> encode_pgm(const Image& image, PgmDepth depth) {
  if (image.height() == 0 || image.width() == 0) throw Error(ErrorKind::Shape, "cannot encode an empty image");
  const unsigned maxval = depth == PgmDepth::Bits8 ? 255u : 65535u;
  const std::string header =
      "P5\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n" + std::to_string(maxval) + "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + image.size() * (depth == PgmDepth::Bits8 ? 1 : 2));
  for (double v : image.values()) {
    if (!std::isfinite(v)) throw Error(ErrorKind::Numeric, "non-finite pixel in PGM output");
    const auto q = static_cast<unsigned>(std::lround(std::clamp(v, 0.0, 1.0) * maxval));
    if (depth == PgmDepth::Bits16) out.push_back(static_cast<std::uint8_t>(q >> 8));
    out.push_back(static_cast<std::uint8_t>(q & 0xFF));
  }
  return out;
}

Image decode_pgm(const std::vector<std::uint8_t>& bytes) {
  std::size_t pos = 0;
  auto fail = [](const std::string& why) { return Error(ErrorKind::Io, "malformed PGM: " + why); };
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto number = [&] {
    skip_space();
    unsigned long v = 0;
    std::size_t digits = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos++] - '0');
      if (++digits > 9) throw fail("header value too large");
    }
    if (digits == 0) throw fail("expected a number");
    return v;
  };

  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') throw fail("missing P5 magic");
  pos = 2;
  const auto width = number();
  const auto height = number();
  const auto maxval = number();
  if (width == 0 || height == 0) throw fail("zero dimension");
  if (maxval == 0 || maxval > 65535) throw fail("maxval out of range");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw fail("missing separator after header");
  ++pos;

  const std::size_t bps = maxval > 255 ? 2 : 1;
  const std::size_t count = width * height;
  if (bytes.size() - pos != count * bps) throw fail("pixel data length mismatch");
  Image img(height, width);
  auto vals = img.values();
  for (std::size_t i = 0; i < count; ++i) {
    unsigned q = bytes[pos + i * bps];
    if (bps == 2) q = (q << 8) | bytes[pos + i * bps + 1];
    if (q > maxval) throw fail("sample exceeds maxval");
    vals[i] = static_cast<double>(q) / static_cast<double>(maxval);
  }
  return img;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorKind::Io, "cannot write " + path.string());
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_bytes(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::string read_text(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  return {bytes.begin(), bytes.end()};
}

void write_pgm(const std::filesystem::path& path, const Image& image, PgmDepth depth) {
  write_bytes(path, encode_pgm(image, depth));
}

Image read_pgm(const std::filesystem::path& path) { return decode_pgm(read_bytes(path)); }

}  // namespace spx::io
