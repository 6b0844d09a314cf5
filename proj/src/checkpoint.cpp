#include "spx/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "spx/error.hpp"

namespace spx::nn {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::string text(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error(ErrorKind::Load, "checkpoint is truncated");
  }
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const std::vector<NamedTensor>& params) {
  std::vector<std::uint8_t> out{'S', 'P', 'X', '1'};
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    if (numel(p.shape) != p.values.size())
      throw Error(ErrorKind::Shape, "checkpoint tensor '" + p.name + "' has inconsistent shape");
    put_u32(out, static_cast<std::uint32_t>(p.name.size()));
    out.insert(out.end(), p.name.begin(), p.name.end());
    put_u32(out, static_cast<std::uint32_t>(p.shape.size()));
    for (auto d : p.shape) put_u32(out, static_cast<std::uint32_t>(d));
    for (float v : p.values) put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

std::vector<NamedTensor> decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  Reader in(bytes);
  if (in.text(4) != "SPX1") throw Error(ErrorKind::Load, "not a checkpoint (bad magic)");
  const auto version = in.u32();
  if (version != kCheckpointVersion)
    throw Error(ErrorKind::Load, "unsupported checkpoint version " + std::to_string(version));
  const auto count = in.u32();
  std::vector<NamedTensor> out;
  out.reserve(count);
  for (std::uint32_t k = 0; k < count; ++k) {
    NamedTensor t;
    t.name = in.text(in.u32());
    const auto rank = in.u32();
    if (rank > 8) throw Error(ErrorKind::Load, "checkpoint tensor rank too large");
    for (std::uint32_t r = 0; r < rank; ++r) t.shape.push_back(in.u32());
    t.values.resize(numel(t.shape));
    for (auto& v : t.values) v = std::bit_cast<float>(in.u32());
    out.push_back(std::move(t));
  }
  if (!in.done()) throw Error(ErrorKind::Load, "trailing bytes after checkpoint records");
  return out;
}

void save_checkpoint(const std::filesystem::path& path, const std::vector<NamedTensor>& params) {
  const auto bytes = encode_checkpoint(params);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Io, "cannot write " + path.string());
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

std::vector<NamedTensor> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::Load, "cannot open checkpoint " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace spx::nn
